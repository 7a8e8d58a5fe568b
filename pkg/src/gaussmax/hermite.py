"""Hermite polynomials and the weighted integrals built on them.

Two polynomial families appear throughout the package: the physicists'
polynomials ``H_n`` (weight e^{-x^2}) and the unit-variance variant
``Hbar_n`` (weight e^{-x^2/2}), related by ``Hbar_n(x) = 2^{n/2} H_n(x/sqrt 2)``.
On top of them sit two integrals that the density bounds consume:

* ``I_n(v) = int_v^inf e^{-t^2/2} H_n(t) dt`` (closed form, finite or v=-inf),
* ``J_n(x) = int e^{-y^2/2} H_n(a y + b x) dy = (2b)^n sqrt(2 pi) Hbar_n(x)``
  for ``a^2 + b^2 = 1/2``,

plus a Gaussian-weight quadrature utility for the remaining y-integrals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy import integrate
from scipy.special import ndtr

MAX_DEGREE = 200
SQRT_2PI = math.sqrt(2.0 * math.pi)


class HermiteKind(str, Enum):
    PHYSICISTS = "physicists"   # H_{n+1} = 2x H_n - 2n H_{n-1}
    MODIFIED = "modified"       # Hbar_{n+1} = x Hbar_n - n Hbar_{n-1}


class WeightKind(str, Enum):
    EXP_MINUS_Y2_OVER_2 = "exp_minus_y2_over_2"


def _check_degree(n: int) -> int:
    n = int(n)
    if n < 0:
        raise ValueError("polynomial degree must be nonnegative")
    if n > MAX_DEGREE:
        raise ValueError(
            f"degree {n} exceeds the supported cap {MAX_DEGREE}; beyond it "
            "the double-factorial coefficients overflow double precision"
        )
    return n


def _double_factorial(m: int) -> float:
    """m!! with the boundary convention (-1)!! = 0!! = 1."""
    if m <= 0:
        return 1.0
    out = 1.0
    while m > 1:
        out *= m
        m -= 2
    return out


def _eval_all(kind: HermiteKind, n: int, x) -> np.ndarray:
    """All degrees 0..n at once; shape (n+1,) + shape(x)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n == 0:
        return out
    if kind is HermiteKind.PHYSICISTS:
        out[1] = 2.0 * x
        for k in range(1, n):
            out[k + 1] = 2.0 * x * out[k] - 2.0 * k * out[k - 1]
    else:
        out[1] = x
        for k in range(1, n):
            out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def hermite_eval(kind: HermiteKind, n: int, x):
    """Evaluate H_n(x) (physicists') or Hbar_n(x) (modified) by recurrence.

    Parameters
    ----------
    kind : HermiteKind
    n : int
        Degree, 0 <= n <= MAX_DEGREE.
    x : float or ndarray

    Returns
    -------
    float or ndarray matching the shape of x.
    """
    kind = HermiteKind(kind)
    n = _check_degree(n)
    vals = _eval_all(kind, n, x)[n]
    return float(vals) if np.ndim(x) == 0 else vals


def tail_integral_In(n: int, v):
    """``I_n(v) = int_v^inf e^{-t^2/2} H_n(t) dt``.

    Accepts finite v (scalar or array) or ``v = -inf`` (scalar), for which
    the full-line value ``1_{n even} 2^{n/2} (n-1)!! sqrt(2 pi)`` is returned.
    """
    n = _check_degree(n)
    if np.ndim(v) == 0 and math.isinf(float(v)) and float(v) < 0:
        if n % 2 == 1:
            return 0.0
        return 2.0 ** (n / 2.0) * _double_factorial(n - 1) * SQRT_2PI

    varr = np.asarray(v, dtype=float)
    H = _eval_all(HermiteKind.PHYSICISTS, max(n - 1, 0), varr)
    s = np.zeros_like(varr)
    dfn = _double_factorial(n - 1)
    for k in range(0, (n - 1) // 2 + 1):
        m = n - 1 - 2 * k
        s = s + (2.0 ** k) * (dfn / _double_factorial(m)) * H[m]
    out = 2.0 * np.exp(-varr ** 2 / 2.0) * s
    if n % 2 == 0:
        # ndtr(-v) = 1 - Phi(v), accurate in both tails.
        out = out + 2.0 ** (n / 2.0) * dfn * SQRT_2PI * ndtr(-varr)
    return float(out) if np.ndim(v) == 0 else out


def weighted_integral_Jn(n: int, x, a: float, b: float):
    """``J_n(x) = int e^{-y^2/2} H_n(a y + b x) dy`` for ``a^2 + b^2 = 1/2``.

    Closed form: ``(2b)^n sqrt(2 pi) Hbar_n(x)``.
    """
    n = _check_degree(n)
    if abs(a * a + b * b - 0.5) > 1e-12:
        raise ValueError("weighted_integral_Jn requires a^2 + b^2 = 1/2 "
                         f"(got {a * a + b * b!r})")
    return (2.0 * b) ** n * SQRT_2PI * hermite_eval(HermiteKind.MODIFIED, n, x)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights approximating ``int f(y) e^{-y^2/2} dy = sum w_i f(y_i)``."""

    nodes: np.ndarray
    weights: np.ndarray
    weight_kind: WeightKind = WeightKind.EXP_MINUS_Y2_OVER_2

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=float)).copy()
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float)).copy()
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size < 1:
            raise ValueError("nodes and weights must be equal-length 1-d arrays")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
            raise ValueError("nodes and weights must be finite")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        total = float(weights.sum())
        if abs(total - SQRT_2PI) > 1e-12 * SQRT_2PI:
            raise ValueError(
                f"weights sum to {total!r}, expected sqrt(2 pi); not a rule "
                "for the weight e^{-y^2/2}"
            )
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "weight_kind", WeightKind(self.weight_kind))


def gauss_weight_rule(n: int = 64) -> QuadratureRule:
    """n-point Gauss rule for the weight e^{-y^2/2}, exact for deg < 2n.

    Built from the e^{-t^2} Gauss-Hermite rule by the substitution
    y = sqrt(2) t.
    """
    if n < 1:
        raise ValueError("need at least one node")
    t, w = hermgauss(n)
    return QuadratureRule(math.sqrt(2.0) * t, math.sqrt(2.0) * w)


DEFAULT_RULE = gauss_weight_rule(64)


def gauss_weight_integrate(f, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Approximate ``int f(y) e^{-y^2/2} dy`` with the given rule.

    ``f`` may be vectorized over an ndarray of nodes or accept scalars.
    """
    vals = np.asarray(f(rule.nodes), dtype=float)
    if vals.shape != rule.nodes.shape:
        vals = np.array([float(f(y)) for y in rule.nodes])
    if not np.all(np.isfinite(vals)):
        bad = rule.nodes[~np.isfinite(vals)][0]
        raise ValueError(f"integrand not finite at node {bad!r}")
    return float(rule.weights @ vals)


def gauss_weight_integrate_adaptive(f) -> float:
    """Adaptive cross-check of ``int f(y) e^{-y^2/2} dy`` over the whole line."""
    val, _ = integrate.quad(lambda y: f(y) * math.exp(-y * y / 2.0),
                            -np.inf, np.inf, epsabs=1e-13, epsrel=1e-11,
                            limit=300)
    return val
