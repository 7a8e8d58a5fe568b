"""Hermite polynomials, Gaussian-weight tail integrals, quadrature."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst
from scipy.stats import norm

import oracles
from gaussmax import hermite
from gaussmax.hermite import HermiteKind


# --------------------------------------------------------- polynomial values

@pytest.mark.parametrize("n", range(0, 13))
def test_physicists_matches_explicit_sum(n):
    xs = np.linspace(-4.0, 4.0, 33)
    got = hermite.hermite_eval(HermiteKind.PHYSICISTS, n, xs)
    want = np.array([oracles.hermite_physicists_sum(n, x) for x in xs])
    scale = np.maximum(1.0, np.abs(want))
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-10 * scale.max())


@pytest.mark.parametrize("n", range(0, 13))
def test_modified_matches_explicit_sum(n):
    xs = np.linspace(-4.0, 4.0, 33)
    got = hermite.hermite_eval(HermiteKind.MODIFIED, n, xs)
    want = np.array([oracles.hermite_monic_sum(n, x) for x in xs])
    scale = np.maximum(1.0, np.abs(want)).max()
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-10 * scale)


def test_modified_low_degrees_are_the_monic_polynomials():
    xs = np.linspace(-3.0, 3.0, 13)
    np.testing.assert_allclose(
        hermite.hermite_eval(HermiteKind.MODIFIED, 2, xs), xs ** 2 - 1.0,
        atol=1e-12)
    np.testing.assert_allclose(
        hermite.hermite_eval(HermiteKind.MODIFIED, 3, xs), xs ** 3 - 3.0 * xs,
        atol=1e-12)


def test_cross_family_scaling_identity():
    # Hbar_n(x) = 2^{-n/2} H_n(x / sqrt 2): the two recurrences must agree.
    xs = np.linspace(-5.0, 5.0, 41)
    for n in range(0, 16):
        lhs = hermite.hermite_eval(HermiteKind.MODIFIED, n, xs)
        rhs = (2.0 ** (-n / 2.0)
               * hermite.hermite_eval(HermiteKind.PHYSICISTS, n,
                                      xs / math.sqrt(2.0)))
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_scalar_in_scalar_out():
    v = hermite.hermite_eval(HermiteKind.PHYSICISTS, 3, 1.5)
    assert isinstance(v, float)
    assert v == pytest.approx(oracles.hermite_physicists_sum(3, 1.5))


def test_degree_bounds():
    with pytest.raises(ValueError):
        hermite.hermite_eval(HermiteKind.PHYSICISTS, -1, 0.0)
    with pytest.raises(ValueError):
        hermite.hermite_eval(HermiteKind.PHYSICISTS, hermite.MAX_DEGREE + 1, 0.0)


# ------------------------------------------------------------ tail integrals

@pytest.mark.parametrize("n", range(0, 9))
@pytest.mark.parametrize("v", [-3.0, -0.7, 0.0, 1.3, 4.0])
def test_tail_integral_matches_quadrature(n, v):
    got = hermite.tail_integral_In(n, v)
    want = oracles.quad_In(n, v)
    assert got == pytest.approx(want, rel=1e-9, abs=1e-11)


def test_tail_integral_n0_is_gaussian_tail():
    for v in [-5.0, -1.0, 0.0, 2.0, 6.0]:
        want = math.sqrt(2.0 * math.pi) * norm.sf(v)
        assert hermite.tail_integral_In(0, v) == pytest.approx(want, rel=1e-13)


def test_tail_integral_full_line():
    # At v = -inf only even degrees survive: 2^{n/2} (n-1)!! sqrt(2 pi).
    assert hermite.tail_integral_In(1, -np.inf) == 0.0
    assert hermite.tail_integral_In(0, -np.inf) == pytest.approx(
        math.sqrt(2.0 * math.pi), rel=1e-14)
    assert hermite.tail_integral_In(4, -np.inf) == pytest.approx(
        4.0 * 3.0 * math.sqrt(2.0 * math.pi), rel=1e-14)
    # and the finite-v evaluation converges to it far left
    assert hermite.tail_integral_In(4, -40.0) == pytest.approx(
        hermite.tail_integral_In(4, -np.inf), rel=1e-12)


def test_tail_integral_vectorized():
    vs = np.array([-2.0, 0.0, 3.0])
    got = hermite.tail_integral_In(5, vs)
    want = [hermite.tail_integral_In(5, float(v)) for v in vs]
    np.testing.assert_allclose(got, want, rtol=1e-14)


# -------------------------------------------------------- weighted integrals

@pytest.mark.parametrize("n", range(0, 7))
def test_weighted_integral_matches_quadrature(n):
    a = 0.3
    b = math.sqrt(0.5 - a * a)
    for x in [-2.0, 0.0, 1.0, 3.0]:
        got = hermite.weighted_integral_Jn(n, x, a, b)
        want = oracles.quad_Jn(n, x, a, b)
        assert got == pytest.approx(want, rel=1e-10, abs=1e-10)


def test_weighted_integral_rejects_bad_scaling():
    with pytest.raises(ValueError):
        hermite.weighted_integral_Jn(2, 1.0, 0.5, 0.6)


# ----------------------------------------------------------------- quadrature

def test_rule_weights_sum_to_sqrt_2pi():
    rule = hermite.gauss_weight_rule(32)
    assert rule.weights.sum() == pytest.approx(math.sqrt(2.0 * math.pi),
                                               rel=1e-13)


def test_rule_is_exact_on_polynomials():
    # Gaussian moments: int y^{2k} e^{-y^2/2} dy = (2k-1)!! sqrt(2 pi).
    rule = hermite.gauss_weight_rule(16)
    for k, dfac in [(0, 1.0), (1, 1.0), (2, 3.0), (3, 15.0), (4, 105.0)]:
        got = hermite.gauss_weight_integrate(lambda y, k=k: y ** (2 * k), rule)
        assert got == pytest.approx(dfac * math.sqrt(2.0 * math.pi), rel=1e-12)
        odd = hermite.gauss_weight_integrate(lambda y, k=k: y ** (2 * k + 1),
                                             rule)
        assert abs(odd) < 1e-10


def test_adaptive_agrees_with_rule_on_smooth_integrand():
    f = lambda y: math.cos(0.7 * y) + 0.1 * y * y
    a = hermite.gauss_weight_integrate(np.vectorize(f), hermite.DEFAULT_RULE)
    b = hermite.gauss_weight_integrate_adaptive(f)
    assert a == pytest.approx(b, rel=1e-10)


def test_integrate_rejects_nonfinite():
    with pytest.raises(ValueError):
        hermite.gauss_weight_integrate(
            lambda y: np.where(np.abs(y) > 5, np.inf, 1.0),
            hermite.DEFAULT_RULE)


def test_rule_validation():
    with pytest.raises(ValueError):
        hermite.QuadratureRule(nodes=[0.0], weights=[1.0])  # wrong total
    with pytest.raises(ValueError):
        hermite.QuadratureRule(nodes=[0.0, 1.0],
                               weights=[math.sqrt(2 * math.pi), -0.0])


@settings(max_examples=30, deadline=None)
@given(n=hst.integers(0, 20), x=hst.floats(-6.0, 6.0))
def test_recurrence_consistency_property(n, x):
    """x Hbar_n = Hbar_{n+1} + n Hbar_{n-1} (the monic three-term recurrence)."""
    h_n = hermite.hermite_eval(HermiteKind.MODIFIED, n, x)
    h_up = hermite.hermite_eval(HermiteKind.MODIFIED, n + 1, x)
    h_dn = hermite.hermite_eval(HermiteKind.MODIFIED, n - 1, x) if n else 0.0
    scale = max(1.0, abs(h_n) * max(1.0, abs(x)), abs(h_up), n * abs(h_dn))
    assert abs(x * h_n - (h_up + n * h_dn)) <= 1e-11 * scale
