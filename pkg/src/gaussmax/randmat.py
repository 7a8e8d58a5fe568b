"""GOE eigenvalue density, expected |det| of shifted GOE, and MC oracles.

The n x n Gaussian Orthogonal Ensemble (diagonal variance 1, off-diagonal
variance 1/2) has one-point eigenvalue density q_n with the expected-count
normalization ``int q_n = n``.  Writing c_k = (2^k k! sqrt(pi))^{-1/2}, the
Hermite-series form is

    e^{nu^2/2} q_n(nu) = e^{-nu^2/2} sum_{k<n} c_k^2 H_k(nu)^2
        + (1/2) sqrt(n/2) c_{n-1} c_n H_{n-1}(nu) [I_n(-inf) - 2 I_n(nu)]
        + 1_{n odd} H_{n-1}(nu) / I_{n-1}(-inf),

and the expected absolute determinant of a shifted GOE matrix follows from it:

    E |det(G_n - nu I_n)| = 2^{3/2} Gamma((n+3)/2) e^{nu^2/2} q_{n+1}(nu) / (n+1).

Direct evaluation overflows (factorials) and underflows (e^{-nu^2/2}) long
before the n <= 60 cap, so everything is computed through
w_n(nu) := e^{nu^2/2} q_n(nu) using orthonormal values u_k = c_k H_k(nu)
(three-term recurrence, O(1)-conditioned) and log-space coefficient ratios.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import streams
from .model import IsotropicModel, require_valid

MAX_SIZE = 60


def _check_size(n: int, cap: int = MAX_SIZE) -> int:
    n = int(n)
    if n < 1:
        raise ValueError("matrix size must be a positive integer")
    if n > cap:
        raise ValueError(f"matrix size {n} exceeds the supported cap {cap}")
    return n


def _log_double_factorial(m: int) -> float:
    """log(m!!) for m >= -1, with (-1)!! = 0!! = 1."""
    if m <= 0:
        return 0.0
    if m % 2 == 1:            # m = 2k-1: m!! = (2k)! / (2^k k!)
        k = (m + 1) // 2
        return math.lgamma(2 * k + 1) - k * math.log(2.0) - math.lgamma(k + 1)
    k = m // 2                # m = 2k: m!! = 2^k k!
    return k * math.log(2.0) + math.lgamma(k + 1)


def _log_ck(n: int) -> float:
    """log c_n = -(1/2) log(2^n n! sqrt(pi))."""
    return -0.5 * (n * math.log(2.0) + math.lgamma(n + 1) + 0.5 * math.log(math.pi))


def _coef_B(n: int) -> float:
    """B_n = c_n 2^{n/2} (n-1)!! sqrt(2 pi); O(n^{-1/4}), no overflow."""
    return math.exp(0.5 * math.log(2.0 * math.pi) + 0.5 * n * math.log(2.0)
                    + _log_double_factorial(n - 1) + _log_ck(n))


def _coef_A(n: int, k: int) -> float:
    """A_{n,k} = 2^k (n-1)!!/(n-1-2k)!! * c_n/c_m with m = n-1-2k; O(1)."""
    m = n - 1 - 2 * k
    return math.exp(k * math.log(2.0) + _log_double_factorial(n - 1)
                    - _log_double_factorial(m) + _log_ck(n) - _log_ck(m))


def _norm_hermites(n: int, nu: np.ndarray) -> np.ndarray:
    """u_k = c_k H_k(nu) for k = 0..n via the orthonormal recurrence."""
    u = np.empty((n + 1,) + nu.shape)
    u[0] = math.pi ** -0.25
    if n >= 1:
        u[1] = math.sqrt(2.0) * nu * u[0]
    for k in range(1, n):
        u[k + 1] = (math.sqrt(2.0 / (k + 1)) * nu * u[k]
                    - math.sqrt(k / (k + 1.0)) * u[k - 1])
    return u


def _rescaled_density(n: int, nu) -> np.ndarray:
    """w_n(nu) = e^{nu^2/2} q_n(nu), vectorized over nu."""
    nu = np.asarray(nu, dtype=float)
    u = _norm_hermites(n - 1, nu)
    ut = u * np.exp(-nu * nu / 4.0)          # ut_k = u_k e^{-nu^2/4}
    w = np.sum(ut ** 2, axis=0)              # e^{-nu^2/2} sum c_k^2 H_k^2
    # Middle term: (1/2) sqrt(n/2) c_{n-1} c_n H_{n-1} [I_n(-inf) - 2 I_n(nu)]
    #   c_n I_n(nu)    = 2 e^{-nu^2/2} sum_k A_{n,k} u_m + 1_{n even} B_n (1-Phi(nu))
    #   c_n I_n(-inf)  = 1_{n even} B_n
    P = np.zeros_like(nu)
    for k in range(0, (n - 1) // 2 + 1):
        P = P + _coef_A(n, k) * ut[n - 1 - 2 * k]
    mid = -4.0 * P * ut[n - 1]
    if n % 2 == 0:
        mid = mid + u[n - 1] * _coef_B(n) * (2.0 * ndtr(nu) - 1.0)
    w = w + 0.5 * math.sqrt(n / 2.0) * mid
    if n % 2 == 1:
        w = w + u[n - 1] / _coef_B(n - 1)
    return w


def goe_eigen_density(n: int, nu):
    """One-point GOE eigenvalue density q_n(nu), normalized to integrate to n.

    Parameters
    ----------
    n : int
        Matrix size, 1 <= n <= 60.
    nu : float or ndarray

    Returns
    -------
    float or ndarray
    """
    n = _check_size(n)
    nu_arr = np.asarray(nu, dtype=float)
    out = np.exp(-nu_arr ** 2 / 2.0) * _rescaled_density(n, nu_arr)
    return float(out) if np.ndim(nu) == 0 else out


def expected_absdet_shifted_goe(n: int, nu):
    """E |det(G_n - nu I_n)| for an n x n GOE matrix G_n.

    Uses the identity with the size-(n+1) eigenvalue density, evaluated
    through the e^{nu^2/2}-rescaled form so large nu neither under- nor
    overflows.  Requires n <= 59 (needs the density at size n+1).
    """
    n = _check_size(n, cap=MAX_SIZE - 1)
    nu_arr = np.asarray(nu, dtype=float)
    coef = 2.0 ** 1.5 * math.gamma((n + 3) / 2.0) / (n + 1)
    out = coef * _rescaled_density(n + 1, nu_arr)
    return float(out) if np.ndim(nu) == 0 else out


@dataclass(frozen=True)
class GoeEvaluation:
    """Density and expected shifted |det| of the n x n GOE at one abscissa."""

    n: int
    nu: float
    density: float
    absdet_mean: float


def goe_evaluate(n: int, nu: float) -> GoeEvaluation:
    """Convenience bundle of q_n(nu) and E|det(G_n - nu I_n)| (needs n <= 59)."""
    return GoeEvaluation(n=int(n), nu=float(nu),
                         density=goe_eigen_density(n, nu),
                         absdet_mean=expected_absdet_shifted_goe(n, nu))


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with standard error; bit-reproducible given (seed, reps)."""

    mean: float
    stderr: float
    reps: int
    seed: int


def sample_goe(n: int, rng: np.random.Generator) -> np.ndarray:
    """One GOE draw: symmetric, diagonal N(0,1), off-diagonal N(0,1/2)."""
    n = _check_size(n)
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2.0


_MC_BATCH = 1 << 18


def mc_absdet(n: int, nu: float, reps: int, seed: int) -> McEstimate:
    """MC estimate of E |det(G_n - nu I_n)| over ``reps`` independent draws.

    Replicate r consumes a fixed window of the (seed, GOE-domain) stream, so
    the estimate is bit-identical however the replicates are batched.
    """
    n = _check_size(n)
    reps = int(reps)
    if reps < 2:
        raise ValueError("reps must be at least 2 (stderr needs a sample std)")
    per_rep = n * (n + 1) // 2
    iu, ju = np.triu_indices(n)
    scale = np.where(iu == ju, 1.0, 1.0 / math.sqrt(2.0))
    diag = np.arange(n)
    vals = np.empty(reps)
    done = 0
    while done < reps:
        nb = min(_MC_BATCH, reps - done)
        z = streams.normals(seed, streams.DOMAIN_GOE, done, nb, per_rep)
        mats = np.zeros((nb, n, n))
        mats[:, iu, ju] = z * scale
        mats[:, ju, iu] = mats[:, iu, ju]
        mats[:, diag, diag] -= nu
        vals[done:done + nb] = np.abs(np.linalg.det(mats))
        done += nb
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(reps))
    return McEstimate(mean=mean, stderr=stderr, reps=reps, seed=int(seed))


def conditional_hessian_sample(model: IsotropicModel, j: int, x: float,
                               rng: np.random.Generator) -> np.ndarray:
    """Draw from the law of the field's Hessian at a critical point of level x.

    For a unit-variance isotropic model the conditional Hessian given
    {X(t) = x, X'(t) = 0} is distributed as

        sqrt(8 rho'') G_j + 2 sqrt(rho'' - rho'^2) xi I_j + 2 rho' x I_j

    with G_j a j x j GOE matrix and xi an independent standard normal
    (rho', rho'' at 0).
    """
    require_valid(model)
    j = _check_size(j)
    rp = model.rho1_0
    rpp = model.rho2_0
    g = sample_goe(j, rng)
    xi = rng.standard_normal()
    shift = 2.0 * math.sqrt(max(rpp - rp * rp, 0.0)) * xi + 2.0 * rp * x
    return math.sqrt(8.0 * rpp) * g + shift * np.eye(j)
