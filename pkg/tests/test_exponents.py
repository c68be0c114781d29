import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from muntz.exponents import (
    Arithmetic,
    Explicit,
    Geometric,
    MuntzClass,
    Power,
    gap_check,
    m_asymptotics,
    m_of_r,
    muntz_sum_class,
    power_sum,
    psi,
    sequence_from_spec,
)

EULER_GAMMA = 0.5772156649015329


def brute_m(seq, r):
    a1 = seq.term(1)
    if r <= a1:
        return Fraction(1) / Fraction(a1)
    total, k = Fraction(0), 1
    while seq.term(k) < r:
        total += 1 / Fraction(seq.term(k))
        k += 1
    return total


def test_m_of_r_arithmetic_exact():
    seq = Arithmetic(1, 1)
    assert m_of_r(seq, 3.5) == pytest.approx(11 / 6, rel=1e-15)
    # strict inequality: a_3 = 3 is not counted at r = 3
    assert m_of_r(seq, 3.0) == pytest.approx(1.5, rel=1e-15)
    assert m_of_r(seq, 0.2) == 1.0
    assert m_of_r(seq, 1.0) == 1.0


@pytest.mark.parametrize("seq", [Arithmetic(0.5, 0.75), Power(1.0, 2.0), Power(3.0, 0.5),
                                 Geometric(1.0, 2.0), Explicit((0.5, 1.0, 3.0, 7.5))])
@pytest.mark.parametrize("r", [0.1, 1.0, 2.5, 17.0, 300.0])
def test_m_of_r_matches_brute_force(seq, r):
    assert m_of_r(seq, r) == pytest.approx(float(brute_m(seq, r)), rel=1e-13)


def test_m_of_r_huge_r_uses_closed_forms():
    # harmonic numbers: H_n - log n -> γ
    r = 2.0 ** 40
    assert m_of_r(Arithmetic(1, 1), r + 0.5) - math.log(r) == pytest.approx(EULER_GAMMA, abs=1e-11)
    assert m_of_r(Power(1, 2), 2.0 ** 80) == pytest.approx(math.pi ** 2 / 6, rel=1e-11)
    assert m_of_r(Geometric(1, 2), 2.0 ** 40) == pytest.approx(2.0, abs=1e-11)


@given(st.integers(min_value=10_001, max_value=10**7), st.floats(min_value=0.3, max_value=3.0))
def test_euler_maclaurin_power_sum(n, p):
    # compare with the Hurwitz-zeta closed form ζ(p) - ζ(p, n+1)
    if abs(p - 1) < 1e-6:
        return
    import mpmath
    want = float(mpmath.zeta(p) - mpmath.zeta(p, n + 1))
    assert power_sum(p, n) == pytest.approx(want, rel=1e-12)


@given(st.floats(min_value=0.01, max_value=1e6), st.floats(min_value=0.01, max_value=1e6))
def test_m_is_nondecreasing(r1, r2):
    seq = Arithmetic(1, 1)
    lo, hi = sorted((r1, r2))
    assert m_of_r(seq, lo) <= m_of_r(seq, hi)


def test_psi_is_exp_two_m():
    seq = Arithmetic(1, 1)
    assert psi(seq, 3.5).log_mag == pytest.approx(11 / 3)


def test_gap_check():
    assert gap_check(Arithmetic(1, 0.5)) == 0.5
    assert gap_check(Geometric(1, 3)) == 2.0
    assert gap_check(Power(1, 2)) == 3.0
    assert gap_check(Power(1, 0.5)) is None
    assert gap_check(Explicit((1.0, 1.5, 4.0))) == 0.5
    assert gap_check(Explicit((2.0,))) == math.inf


def test_muntz_sum_class():
    assert muntz_sum_class(Arithmetic(1, 2)).classification == MuntzClass.DIVERGENT
    assert muntz_sum_class(Power(1, 1)).classification == MuntzClass.DIVERGENT
    assert muntz_sum_class(Power(1, 1.5)).classification == MuntzClass.CONVERGENT
    assert muntz_sum_class(Geometric(1, 2)).classification == MuntzClass.CONVERGENT
    fin = muntz_sum_class(Explicit((1.0, 2.0)))
    assert fin.classification == MuntzClass.UNKNOWN_FINITE and fin.partial_sum == 1.5


def test_m_asymptotics():
    prof = m_asymptotics(Arithmetic(1, 4))
    assert prof.rho_log == 0.25 and prof.exact and not prof.bounded
    assert m_asymptotics(Power(2, 1)).rho_log == 0.5
    assert m_asymptotics(Power(1, 2)).bounded
    assert m_asymptotics(Geometric(1, 2)).bounded
    assert m_asymptotics(Power(1, 0.5)).rho_log is None


def test_counting_profile_matches_growth():
    seq = Arithmetic(1, 4)
    slope = (m_of_r(seq, 2.0 ** 40) - m_of_r(seq, 2.0 ** 20)) / (20 * math.log(2))
    assert slope == pytest.approx(m_asymptotics(seq).rho_log, rel=1e-6)


def test_spec_roundtrip_and_validation():
    for seq in (Arithmetic(1, 1), Power(1, 2), Geometric(1, 2), Explicit((1.0, 2.0))):
        assert sequence_from_spec(seq.to_spec()) == seq
    with pytest.raises(ValueError, match="expected one of"):
        sequence_from_spec({"type": "fibonacci"})
    with pytest.raises(ValueError):
        Explicit((2.0, 1.0))
    with pytest.raises(ValueError):
        Geometric(1, 1)
