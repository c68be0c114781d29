import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from muntz.errors import FactorizationFail, NoConvergence, NonFinite, StepUnderflow, EvaluationFailed
from muntz.numerics import (
    DD,
    Asymptotic,
    Classification,
    GridSpec,
    LogScaleValue,
    Method,
    back_substitute_dd,
    cholesky_dd,
    cholesky_dd_partial,
    classify_integral_tail,
    classify_samples,
    dd_sum,
    forward_substitute_dd,
    integrate_halfline,
    integrate_halfline_log,
    integrate_log_u,
    log_derivative,
    logsumexp,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).filter(lambda x: abs(x) > 1e-300)


# --- log-scale values -------------------------------------------------------

@given(finite)
def test_logscale_roundtrip_within_one_ulp(x):
    v = LogScaleValue.from_float(x)
    assert v.sign == (1 if x > 0 else -1)
    # the stored logarithm is within one ulp of the exact one
    with mpmath.workdps(40):
        exact = mpmath.log(abs(mpmath.mpf(x)))
        assert abs(mpmath.mpf(v.log_mag) - exact) <= math.ulp(v.log_mag)
    # which amplifies to |log x| ulps in the decoded float
    assert abs(float(v) - x) <= (abs(v.log_mag) + 2) * math.ulp(x)


@given(finite, finite)
def test_logscale_arithmetic_matches_float(a, b):
    A, B = LogScaleValue.from_float(a), LogScaleValue.from_float(b)
    assert float(A * B) == pytest.approx(a * b, rel=1e-12)
    assert float(A / B) == pytest.approx(a / b, rel=1e-12)
    s = float(A + B)
    assert s == pytest.approx(a + b, rel=1e-9, abs=1e-9 * max(abs(a), abs(b)))


def test_logscale_zero_and_huge():
    z = LogScaleValue.zero()
    assert z.sign == 0 and z.log_mag == -math.inf
    assert float(z) == 0.0
    assert LogScaleValue(1, -math.inf).sign == 0
    big = LogScaleValue(1, 1e5)
    assert float(big) == math.inf
    assert (big * big).log_mag == 2e5
    assert (big - big).sign == 0
    with pytest.raises(ValueError):
        LogScaleValue(2, 0.0)
    with pytest.raises(ValueError):
        LogScaleValue.from_float(math.nan)


def test_logscale_ordering_and_serialization():
    vals = [LogScaleValue.from_float(x) for x in (-3.0, -0.5, 0.0, 0.25, 7.0)]
    assert sorted(vals[::-1]) == vals
    for v in vals:
        assert LogScaleValue.from_dict(v.to_dict()) == v


def test_logsumexp_large_terms():
    # Σ_{n<=200} n! without overflow
    terms = [LogScaleValue(1, math.lgamma(n + 1)) for n in range(201)]
    s = logsumexp(terms)
    exact = sum(math.factorial(n) for n in range(201))
    assert s.log_mag == pytest.approx(math.log(exact), rel=1e-15)


# --- double-double ----------------------------------------------------------

def test_dd_sum_recovers_cancelled_bits():
    vals = [1e16, 1.0, -1e16, 1e-16]
    assert float(dd_sum(vals)) == pytest.approx(1.0 + 1e-16, rel=0, abs=1e-30)
    assert math.fsum(vals) == float(dd_sum(vals))


@given(st.fractions(min_value=-100, max_value=100, max_denominator=10**6),
       st.fractions(min_value=-100, max_value=100, max_denominator=10**6))
@settings(max_examples=200)
def test_dd_ops_are_near_exact(p, q):
    a, b = DD.from_fraction(p), DD.from_fraction(q)
    scale = max(abs(p), abs(q), Fraction(1))
    tol = Fraction(2) ** -100 * scale * scale
    assert abs(Fraction(a.hi) + Fraction(a.lo) - p) <= Fraction(2) ** -104 * max(abs(p), Fraction(1))
    for got, want in ((a + b, p + q), (a - b, p - q), (a * b, p * q)):
        assert abs(Fraction(got.hi) + Fraction(got.lo) - want) <= tol
    if q != 0:
        got = a / b
        assert abs(Fraction(got.hi) + Fraction(got.lo) - p / q) <= tol * (1 + abs(p / q))


def test_dd_sqrt():
    r = DD(2.0).sqrt()
    with mpmath.workdps(40):
        err = abs(mpmath.mpf(r.hi) + mpmath.mpf(r.lo) - mpmath.sqrt(2))
    assert err < 1e-31


def _hilbert(n):
    return [[DD.from_fraction(Fraction(1, i + j + 1)) for j in range(n)] for i in range(n)]


def test_cholesky_dd_hilbert_solves_to_high_accuracy():
    # cond(H_10) ~ 1.6e13: hopeless in double, routine in double-double
    n = 10
    H = _hilbert(n)
    L = cholesky_dd(H)
    x_true = [Fraction(1)] * n
    b = [DD.from_fraction(sum(Fraction(1, i + j + 1) for j in range(n))) for i in range(n)]
    x = back_substitute_dd(L, forward_substitute_dd(L, b))
    assert max(abs(float(v) - 1.0) for v in x) < 1e-14
    assert all(abs(float(v) - float(t)) < 1e-14 for v, t in zip(x, x_true))


def test_cholesky_dd_reports_failing_pivot():
    A = [[DD(1.0), DD(2.0)], [DD(2.0), DD(1.0)]]
    with pytest.raises(FactorizationFail) as info:
        cholesky_dd(A)
    assert info.value.k == 1
    L, k = cholesky_dd_partial(A)
    assert k == 1 and float(L[1][0]) == 2.0


# --- quadrature -------------------------------------------------------------

@pytest.mark.parametrize("n", [0, 1, 2, 5, 20])
def test_laguerre_moments(n):
    # ∫ t^n e^{-2t} dt = n!/2^{n+1}
    v = integrate_halfline_log(lambda t: n * np.log(t) - 2 * t)
    assert v.log_mag == pytest.approx(math.lgamma(n + 1) - (n + 1) * math.log(2), rel=1e-13, abs=1e-14)


@pytest.mark.parametrize("x", [2.0 ** 10, 2.0 ** 20, 2.0 ** 40])
def test_huge_moments_in_log_scale(x):
    v = integrate_log_u(lambda u: (2 * x + 1) * u - 2 * np.exp(u))
    assert v.log_mag == pytest.approx(math.lgamma(2 * x + 1) - (2 * x + 1) * math.log(2), rel=1e-14)


def test_integrable_endpoint_singularity():
    v = integrate_halfline(lambda t: t ** -0.5 * np.exp(-t))
    assert float(v) == pytest.approx(math.sqrt(math.pi), rel=1e-13)


def test_finite_upper_limit_uses_extrapolation():
    # ∫_{-inf}^0 e^u du = 1, cut where the integrand is at its peak
    v = integrate_log_u(lambda u: u, hi=0.0)
    assert float(v) == pytest.approx(1.0, rel=1e-12)


def test_divergent_and_nonfinite_integrands():
    with pytest.raises(NoConvergence):
        integrate_log_u(lambda u: 0.0 * u)
    with pytest.raises(NonFinite):
        integrate_log_u(lambda u: np.where(u > 3, np.nan, -u * u))


# --- differentiation --------------------------------------------------------

def test_log_derivative_of_log_gamma():
    assert log_derivative(math.lgamma, 1.0) == pytest.approx(-0.5772156649015329, abs=1e-12)
    assert log_derivative(math.lgamma, 50.0, 1.0) == pytest.approx(float(mpmath.digamma(50)), rel=1e-12)


def test_log_derivative_underflow():
    with pytest.raises(StepUnderflow):
        log_derivative(lambda x: math.nan if abs(x - 1) > 1e-20 else 0.0, 1.0, 1e-14)


# --- tail classification ----------------------------------------------------

@pytest.mark.parametrize("power,log_power,expected", [
    (0.5, 0, Classification.CONVERGENT),
    (1.0, 0, Classification.DIVERGENT),
    (1.0, -1, Classification.DIVERGENT),
    (1.0, -2, Classification.CONVERGENT),
    (1.0, 1, Classification.DIVERGENT),
    (2.0, -5, Classification.DIVERGENT),
])
def test_asymptotic_rule(power, log_power, expected):
    assert Asymptotic(power, log_power).classify() == expected


def test_numeric_fit_and_borderline_band():
    rep = classify_integral_tail(lambda r: LogScaleValue(1, 0.5 * math.log(r)))
    assert rep.method == Method.NUMERIC
    assert rep.classification == Classification.CONVERGENT
    assert rep.exponent_estimate == pytest.approx(0.5, abs=1e-12)
    assert classify_integral_tail(lambda r: r ** 2.0).classification == Classification.DIVERGENT
    assert classify_integral_tail(lambda r: r * 1.01).classification == Classification.BORDERLINE


def test_exact_path_overrides_slope_but_keeps_it():
    # r log r fits a slope ~1.04 on the grid: too close to call numerically
    rep = classify_integral_tail(lambda r: r * (1 + math.log(r)), Asymptotic(1, 1))
    assert rep.method == Method.EXACT and rep.classification == Classification.DIVERGENT
    assert abs(rep.fitted_exponent - 1) < 0.05


def test_classifier_rejects_bad_samples():
    with pytest.raises(EvaluationFailed):
        classify_integral_tail(lambda r: -1.0)
    with pytest.raises(EvaluationFailed):
        classify_integral_tail(lambda r: 1 / 0)
    with pytest.raises(ValueError):
        classify_samples([(1.0, 0.0), (3.0, 0.0), (9.0, 0.0), (27.0, 0.0)])


def test_grid_spec():
    assert GridSpec(0, 3).points() == [1.0, 2.0, 4.0, 8.0]
    assert len(GridSpec().points()) == 41
