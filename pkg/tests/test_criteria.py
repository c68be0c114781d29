import math

import numpy as np
import pytest

from muntz.criteria import (
    Branch,
    Verdict,
    B_alpha_profile,
    closed_form_test,
    decide,
    default_log_C,
    envelope_f,
    necessity_test,
    sufficiency_test,
    v_r,
)
from muntz.exponents import Arithmetic, Explicit, Geometric, Power
from muntz.numerics import Method
from muntz.special import StirlingEnvelopeParams
from muntz.weight import GammaExp, ProductOsc, TrigPolynomial, log_K_ratio, x_log_phi

W = GammaExp(0.0, 1.0, 1.0)
PRODUCT_OSC = ProductOsc(1.0, TrigPolynomial(4.0, ((1.0, 1.0),)), ((1.0, 1.0),))
RS = [1.0, 3.0, 17.0, 250.0, 4096.0]


def brute_sup(w, m, r, n=4001):
    xs = np.linspace(1e-9, r, n)
    return max(v_r(w, m, float(x)) for x in xs)


@pytest.mark.parametrize("seq", [Arithmetic(1, 1), Power(1, 2), Arithmetic(1, 4)])
@pytest.mark.parametrize("r", RS[:4])
def test_envelope_matches_brute_force(seq, r):
    s = envelope_f(W, seq, r)
    brute = brute_sup(W, s.m, r)
    assert s.f_sharp >= brute - 1e-12 * max(1.0, abs(brute))
    # the grid misses the maximiser by at most one spacing
    assert s.f_sharp - brute <= 1e-5 * max(1.0, abs(brute))


def test_interior_maximiser_is_near_psi():
    # for e^{-t}, K'/K(x) = 2(ψ(2x+1) - log 2), so the root sits near e^{2m}
    s = envelope_f(W, Power(1, 2), 1e6)
    assert s.branch == Branch.INTERIOR
    assert s.x_star == pytest.approx(math.exp(2 * s.m), rel=0.01)


@pytest.mark.parametrize("w", [W, GammaExp(0, 1, 0.5), GammaExp(0.3, 2, 2), PRODUCT_OSC], ids=str)
def test_v_r_is_concave(w):
    rng = np.random.default_rng(7)
    for r in (2.0, 40.0, 900.0):
        m = 1.3
        for _ in range(40):
            x1, x2 = sorted(rng.uniform(1e-3, r, 2))
            mid = v_r(w, m, 0.5 * (x1 + x2))
            assert mid >= 0.5 * (v_r(w, m, x1) + v_r(w, m, x2)) - 1e-8


@pytest.mark.parametrize("seq", [Arithmetic(1, 1), Power(1, 2), Geometric(1, 2)])
def test_envelope_dominates_random_feasible_points(seq):
    rng = np.random.default_rng(11)
    for r in RS:
        s = envelope_f(W, seq, r)
        for x in rng.uniform(0, r, 100):
            x = max(float(x), 1e-12)
            assert s.f_sharp >= 2 * x * s.m - x_log_phi(W, x) - 1e-10 * max(1.0, abs(s.f_sharp))


def test_f_sharp_below_f_thm4():
    for seq in (Arithmetic(1, 1), Power(1, 2), Arithmetic(1, 0.5)):
        rep = necessity_test(W, seq, check_preconditions=False)
        assert rep.C_cal <= 1e-9
        # refine: eight points per octave
        fine = max(e.f_sharp - e.f_thm4 for e in (envelope_f(W, seq, float(r)) for r in np.geomspace(1, 2.0 ** 40, 321)))
        assert fine <= 1e-9


def test_case_c_is_increasing_along_grid():
    rep = necessity_test(W, Arithmetic(1, 1), check_preconditions=False)
    vals = [s.f_sharp for s in rep.samples if s.branch == Branch.INCREASING]
    assert len(vals) > 10
    assert vals == sorted(vals)


def test_case_a_dies_out_for_divergent_sequences():
    # a small D makes log K(x) steep near 0, so small r starts in case (a)
    w = GammaExp(0.0, 0.01, 1.0)
    rep = necessity_test(w, Arithmetic(1, 1), check_preconditions=False)
    branches = [s.branch for s in rep.samples]
    assert branches[0] == Branch.DECREASING
    last_a = max(i for i, b in enumerate(branches) if b == Branch.DECREASING)
    assert last_a < len(branches) // 2
    assert Branch.DECREASING not in branches[last_a + 1:]


def _thm4_gap(r_hi, n=200):
    gaps = []
    for r in np.geomspace(10, r_hi, n):
        r = float(r)
        s = envelope_f(W, Power(1, 2), r)
        if 0.5 * log_K_ratio(W, r) < 2 * s.m:
            continue  # the m-branch of the bound dominates here
        gaps.append(abs(s.f_thm4 - (r - 0.25 * math.log(2 * r + 1))))
    assert len(gaps) > n // 2
    return max(gaps)


def test_f_thm4_asymptotic():
    c3, c4 = _thm4_gap(1e3), _thm4_gap(1e4)
    assert c4 < 1.0
    assert c4 == pytest.approx(c3, abs=0.05)


# --- sufficiency ---------------------------------------------------------------

def test_B_inf_reaches_stirling_limit_region():
    # B_α(r) decreases to B_inf and stays above the Stirling envelope limit D e α / e^{log C}
    log_C = default_log_C(W, 1.0)
    prof = B_alpha_profile(W, 1.0, [2.0 ** j for j in range(0, 31)], log_C)
    logs = [b for _, b in prof]
    assert all(b2 <= b1 + 1e-12 for b1, b2 in zip(logs, logs[1:]))
    assert abs(logs[-1] - logs[-5]) < 1e-3
    assert math.exp(logs[-1]) > 0.5 * StirlingEnvelopeParams(1.0, 1.0).limit


def test_sufficiency_fires_on_arithmetic():
    rep = sufficiency_test(W, Arithmetic(1, 1))
    assert rep.fired and rep.alpha_used == 1.0 and rep.path == "B_inf"
    assert rep.B_inf > 0 and rep.report.method == Method.EXACT
    lo, hi = rep.doubling
    assert 1e-6 <= lo <= hi <= 1e6


def test_sufficiency_does_not_fire_on_bounded_psi():
    rep = sufficiency_test(W, Power(1, 2))
    assert not rep.fired and rep.reason is None


def test_gap_fail():
    rep = sufficiency_test(W, Power(1, 0.5))
    assert not rep.fired and rep.reason.startswith("GapFail")
    assert not closed_form_test(W, Power(1, 0.5)).applicable


# --- closed form and decide ----------------------------------------------------

@pytest.mark.parametrize("d,want", [(0.5, Verdict.COMPLETE), (1, Verdict.COMPLETE), (2, Verdict.COMPLETE),
                                    (4, Verdict.INCOMPLETE)])
def test_closed_form_arithmetic(d, want):
    assert closed_form_test(W, Arithmetic(1, d)).verdict == want


def test_closed_form_other_examples():
    assert closed_form_test(W, Power(1, 2)).verdict == Verdict.INCOMPLETE
    rep = closed_form_test(GammaExp(0, 1, 2), Arithmetic(1, 2))
    assert rep.verdict == Verdict.COMPLETE and rep.report.method == Method.EXACT
    # the numerical slope agrees with the exact class away from the boundary
    assert rep.report.fitted_exponent == pytest.approx(2.0, abs=0.05)
    assert not closed_form_test(PRODUCT_OSC, Arithmetic(1, 1)).applicable
    assert not closed_form_test(GammaExp(0.5, 1, 1), Arithmetic(1, 1)).applicable


def test_closed_form_forbidden_exponent():
    # α = 1/2 forbids a_k = 1/2
    assert not closed_form_test(GammaExp(0, 1, 0.5), Explicit((0.5, 2.0))).applicable
    assert closed_form_test(GammaExp(0, 1, 0.5), Explicit((0.75, 2.0))).applicable


@pytest.mark.parametrize("seq", [Arithmetic(1, 0.5), Arithmetic(1, 1), Arithmetic(1, 2), Arithmetic(1, 4),
                                 Power(1, 2), Geometric(1, 2)], ids=str)
def test_decide_agrees_with_closed_form(seq):
    rep = decide(W, seq)
    assert rep.verdict == rep.closed_form.verdict
    assert rep.verdict != Verdict.INCONSISTENT
    assert not rep.notes


def test_decide_product_osc_via_sufficiency():
    rep = decide(PRODUCT_OSC, Arithmetic(1, 1))
    assert rep.verdict == Verdict.COMPLETE
    assert rep.sufficiency.fired and not rep.closed_form.applicable


def test_incomplete_requires_preconditions():
    rep = decide(W, Power(1, 2))
    assert rep.necessity.admissible and rep.necessity.normal
    d = rep.to_dict()
    assert d["verdict"] == "Incomplete"
    assert d["necessity"]["preconditions"] == {"admissible": True, "normal": True}
