"""Completeness decision engines.

* necessity: classify ``∫_1^∞ f(r)/r² dr`` for the sharp envelope
  ``f(r) = sup_{0<x<=r} v_r(x)``, ``v_r(x) = 2x m(r) - log K(x) / 2``;
  a convergent integral means the system is incomplete.
* sufficiency: classify ``∫_1^∞ h(r)/r² dr`` with ``h = B Ψ^α``; a
  divergent integral (plus gap and doubling conditions) means complete.
* closed form: for ``w = exp(-D t**alpha)`` completeness is equivalent to
  divergence of ``∫_1^∞ Ψ(r)^α / r² dr``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import MuntzError, NotAdmissible
from .exponents import ExponentSequence, gap_check, m_asymptotics, m_of_r
from .numerics.tail import Asymptotic, Classification, DivergenceReport, GridSpec, classify_samples
from .weight import (
    CustomWeight,
    GammaExp,
    ProductOsc,
    WeightModel,
    admissibility_certificate,
    log_K_ratio,
    normality_probe,
    x_log_phi,
)

#: doubling-condition band for h(2r)/h(r)
DOUBLING_BAND = (1e-6, 1e6)
DEFAULT_GRID = GridSpec(0, 40)


class Branch(str, enum.Enum):
    DECREASING = "CaseA"
    INTERIOR = "CaseB"
    INCREASING = "CaseC"


class Verdict(str, enum.Enum):
    COMPLETE = "Complete"
    INCOMPLETE = "Incomplete"
    INDETERMINATE = "Indeterminate"
    INCONSISTENT = "Inconsistent"


# ---------------------------------------------------------------------------
# envelope


@dataclass(frozen=True)
class EnvelopeSample:
    r: float
    m: float
    f_sharp: float
    f_thm4: float
    branch: Branch
    x_star: Optional[float] = None

    def to_dict(self) -> dict:
        return {"r": self.r, "m": self.m, "f_sharp": self.f_sharp, "f_thm4": self.f_thm4,
                "branch": self.branch.value, "x_star": self.x_star}


def _x_floor(w: WeightModel) -> float:
    return 0.0 if w.moment_domain < 0 else w.moment_domain + 1e-6


def v_r(w: WeightModel, m: float, x: float) -> float:
    """``2 x m - log K(x) / 2``."""
    return 2.0 * x * m - x_log_phi(w, x)


def envelope_f(w: WeightModel, seq: ExponentSequence, r: float) -> EnvelopeSample:
    """Sharp envelope ``sup_{0<x<=r} v_r(x)`` and the cruder closed bound.

    ``v_r`` is concave because ``log K`` is convex, so its derivative
    ``2m - K'/(2K)`` is decreasing and one root search settles the supremum.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    m = m_of_r(seq, r)
    x0 = _x_floor(w)

    def dv(x):
        return 2.0 * m - 0.5 * log_K_ratio(w, x)

    ratio_r = log_K_ratio(w, r)
    f_thm4 = r * max(0.5 * ratio_r, 2.0 * m) - x_log_phi(w, r)
    d_r = 2.0 * m - 0.5 * ratio_r
    if d_r >= 0:
        return EnvelopeSample(r, m, v_r(w, m, r), f_thm4, Branch.INCREASING)
    d_0 = dv(x0)
    if d_0 <= 0:
        return EnvelopeSample(r, m, v_r(w, m, x0), f_thm4, Branch.DECREASING)
    xs = brentq(dv, x0, r, xtol=1e-14 * max(1.0, r), rtol=1e-15, maxiter=200)
    return EnvelopeSample(r, m, v_r(w, m, xs), f_thm4, Branch.INTERIOR, xs)


# ---------------------------------------------------------------------------
# reports


@dataclass
class NecessityReport:
    fired: bool
    report: Optional[DivergenceReport]
    samples: list
    admissible: Optional[bool]
    normal: Optional[bool]
    C_cal: Optional[float] = None
    shift: float = 0.0
    reason: Optional[str] = None

    @property
    def preconditions_ok(self) -> bool:
        return bool(self.admissible and self.normal)

    def to_dict(self) -> dict:
        return {"fired": self.fired, "report": self.report.to_dict() if self.report else None,
                "samples": [s.to_dict() for s in self.samples],
                "preconditions": {"admissible": self.admissible, "normal": self.normal},
                "C_cal": self.C_cal, "shift": self.shift, "reason": self.reason}


@dataclass
class SufficiencyReport:
    fired: bool
    report: Optional[DivergenceReport]
    alpha_used: Optional[float]
    B_inf: Optional[float]
    doubling: Optional[tuple]
    gap_d: Optional[float]
    log_C: Optional[float] = None
    path: Optional[str] = None
    reason: Optional[str] = None

    def to_dict(self) -> dict:
        return {"fired": self.fired, "report": self.report.to_dict() if self.report else None,
                "alpha_used": self.alpha_used, "B_inf": self.B_inf,
                "doubling": list(self.doubling) if self.doubling else None,
                "gap_d": self.gap_d, "log_C": self.log_C, "path": self.path, "reason": self.reason}


@dataclass
class ClosedFormReport:
    applicable: bool
    verdict: Optional[Verdict] = None
    report: Optional[DivergenceReport] = None
    reason: Optional[str] = None

    def to_dict(self) -> dict:
        return {"applicable": self.applicable, "verdict": self.verdict.value if self.verdict else None,
                "report": self.report.to_dict() if self.report else None, "reason": self.reason}


@dataclass
class CriterionReport:
    verdict: Verdict
    necessity: Optional[NecessityReport]
    sufficiency: Optional[SufficiencyReport]
    closed_form: Optional[ClosedFormReport]
    notes: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value,
                "necessity": self.necessity.to_dict() if self.necessity else None,
                "sufficiency": self.sufficiency.to_dict() if self.sufficiency else None,
                "closed_form": self.closed_form.to_dict() if self.closed_form else None,
                "notes": list(self.notes), **self.extras}


# ---------------------------------------------------------------------------
# helpers


def leading_alpha(w: WeightModel) -> Optional[float]:
    if isinstance(w, GammaExp):
        return w.alpha
    if isinstance(w, ProductOsc):
        return w.leading_term[1]
    if isinstance(w, CustomWeight):
        return w.alpha
    return None


def _has_gamma_asymptotics(w: WeightModel) -> bool:
    """``log K(x) = (2x/alpha) log x + O(x)`` is known for these models."""
    return isinstance(w, (GammaExp, ProductOsc))


def _exact_rate(w: WeightModel, seq: ExponentSequence) -> Optional[float]:
    """``2 alpha rho`` when the growth of ``Ψ^α`` is an exact power, else None."""
    prof = m_asymptotics(seq)
    alpha = leading_alpha(w)
    if not prof.exact or prof.rho_log is None or alpha is None:
        return None
    return 2.0 * alpha * prof.rho_log


def _numeric_note(rep: DivergenceReport, notes: list, label: str) -> None:
    if rep.fitted_exponent is None:
        return
    fit = rep.fitted_exponent
    if abs(fit - 1.0) >= 0.05:
        numeric = Classification.DIVERGENT if fit > 1.0 else Classification.CONVERGENT
        if numeric != rep.classification:
            notes.append(f"{label}: numerical slope {fit:.4f} disagrees with the exact growth class")


# ---------------------------------------------------------------------------
# necessity


def necessity_test(w: WeightModel, seq: ExponentSequence, grid: GridSpec = DEFAULT_GRID,
                   check_preconditions: bool = True, notes: Optional[list] = None,
                   precision: str = "compensated") -> NecessityReport:
    notes = [] if notes is None else notes
    admissible = normal = None
    if check_preconditions:
        try:
            cert = admissibility_certificate(w)
            admissible = cert.admissible
            if cert.assumed:
                notes.append("admissibility assumed for a custom weight, not verified")
        except NotAdmissible as exc:
            admissible = False
            notes.append(f"weight not admissible: {exc}")
        try:
            probe = normality_probe(w, precision=precision)
            normal = probe.normal
            if not normal:
                notes.append("normality probe failed: zero growth rate not established")
        except MuntzError as exc:
            normal = False
            notes.append(f"normality probe failed: {exc}")

    samples = [envelope_f(w, seq, r) for r in grid.points()]
    running = []
    top = -math.inf
    for s in samples:
        top = max(top, s.f_sharp)
        running.append(top)
    C_cal = max(s.f_sharp - s.f_thm4 for s in samples)
    # ∫(f + c)/r² has the same type as ∫ f/r²; shift so the samples are positive
    shift = 1.0 - min(0.0, running[0])
    log_g = [(s.r, math.log(f + shift)) for s, f in zip(samples, running)]

    asym = None
    rate = _exact_rate(w, seq)
    prof = m_asymptotics(seq)
    if _has_gamma_asymptotics(w):
        if prof.bounded and prof.exact:
            asym = Asymptotic(0.0, 0.0)
        elif rate is not None:
            asym = Asymptotic(min(rate, 1.0), 1.0 if rate > 1 else 0.0)
    rep = classify_samples(log_g, asym)
    if asym is not None:
        _numeric_note(rep, notes, "necessity")
    fired = rep.classification == Classification.CONVERGENT
    return NecessityReport(fired, rep, samples, admissible, normal, C_cal, shift)


# ---------------------------------------------------------------------------
# sufficiency


def default_log_C(w: WeightModel, alpha: float) -> float:
    # keeps C^{1/x} dominant over φ(x)^{-α} as x → 0+, where K(0)^{α/(2x)} blows up
    return max(0.0, alpha * x_log_phi(w, _x_floor(w) or 0.0)) + 1.0


def B_alpha_profile(w: WeightModel, alpha: float, r_values, log_C: float, per_octave: int = 8):
    """``log B_α(r) = inf_{0<x<r} F(x)``, ``F(x) = log C / x + log x - α x log φ(x) / x``.

    Returns ``[(r, log B_α(r))]`` for the increasing ``r_values``.
    """
    x_lo = max(2.0 ** -10, _x_floor(w) + 1e-3)
    r_max = max(r_values)

    def F(x):
        return log_C / x + math.log(x) - alpha * x_log_phi(w, x) / x

    n = max(2, int(math.ceil(per_octave * math.log2(r_max / x_lo))) + 1)
    xs = np.geomspace(x_lo, r_max, n)
    Fs = np.array([F(float(x)) for x in xs])
    out = []
    for r in r_values:
        idx = np.nonzero(xs < r)[0]
        if len(idx) == 0:
            out.append((r, F(min(x_lo, 0.5 * r))))
            continue
        k = int(idx[np.argmin(Fs[idx])])
        lo = xs[k - 1] if k > 0 else xs[k] * 0.5
        hi = min(xs[k + 1] if k + 1 < len(xs) else r, r)
        best = float(Fs[k])
        if hi > lo:
            res = minimize_scalar(F, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10 * hi})
            best = min(best, float(res.fun))
        out.append((r, best))
    return out


def sufficiency_test(w: WeightModel, seq: ExponentSequence, grid: GridSpec = DEFAULT_GRID,
                     notes: Optional[list] = None) -> SufficiencyReport:
    notes = [] if notes is None else notes
    d = gap_check(seq)
    if d is None or not d > 0:
        return SufficiencyReport(False, None, None, None, None, d, reason="GapFail: no uniform gap between exponents")
    alpha = leading_alpha(w)
    if alpha is None:
        return SufficiencyReport(False, None, None, None, None, d, reason="no exponent scale alpha available for this weight")
    log_C = default_log_C(w, alpha)
    rs = grid.points()
    prof = B_alpha_profile(w, alpha, rs, log_C)
    logB = [b for _, b in prof]
    log_B_inf = min(logB)
    # B_α(r) has settled when the last quarter of the grid moves by < 1e-3 in log
    q = max(1, len(logB) // 4)
    settled = abs(logB[-1] - logB[-q - 1]) < 1e-3
    B_inf = math.exp(log_B_inf) if settled else 0.0
    path = "B_inf" if settled else "B_alpha"
    log_h = []
    for (r, lb) in prof:
        lb_use = log_B_inf if settled else lb
        log_h.append((r, lb_use + 2.0 * alpha * m_of_r(seq, r)))
    ratios = [h2 - h1 for (_, h1), (_, h2) in zip(log_h, log_h[1:])]
    doubling = (math.exp(min(ratios)), math.exp(max(ratios))) if ratios else (1.0, 1.0)
    doubling_ok = DOUBLING_BAND[0] <= doubling[0] and doubling[1] <= DOUBLING_BAND[1]

    asym = None
    rate = _exact_rate(w, seq)
    prof_m = m_asymptotics(seq)
    if settled and _has_gamma_asymptotics(w):
        if prof_m.bounded and prof_m.exact:
            asym = Asymptotic(0.0, 0.0)
        elif rate is not None:
            asym = Asymptotic(rate, 0.0)
    rep = classify_samples(log_h, asym)
    if asym is not None:
        _numeric_note(rep, notes, "sufficiency")
    reason = None
    if not doubling_ok:
        reason = f"DoublingFail: h(2r)/h(r) ranges over [{doubling[0]:.3g}, {doubling[1]:.3g}]"
    fired = rep.classification == Classification.DIVERGENT and doubling_ok
    return SufficiencyReport(fired, rep, alpha, B_inf, doubling, d, log_C, path, reason)


# ---------------------------------------------------------------------------
# closed form


def _hits_forbidden(seq: ExponentSequence, value: float) -> bool:
    if value <= 0:
        return False
    n = seq.count_below(value)
    nxt = seq.term(int(n) + 1)
    return math.isclose(nxt, value, rel_tol=1e-12)


def closed_form_test(w: WeightModel, seq: ExponentSequence, grid: GridSpec = DEFAULT_GRID) -> ClosedFormReport:
    if not isinstance(w, GammaExp) or w.beta != 0:
        return ClosedFormReport(False, reason="closed form needs w = exp(-D t^alpha)")
    d = gap_check(seq)
    if d is None or not d > 0:
        return ClosedFormReport(False, reason="closed form needs a uniform gap between exponents")
    alpha = w.alpha
    if alpha < 1 and _hits_forbidden(seq, 0.5 * (1.0 / alpha - 1.0)):
        return ClosedFormReport(False, reason="an exponent equals (1/alpha - 1)/2")
    prof = m_asymptotics(seq)
    asym = None
    if prof.exact:
        asym = Asymptotic(0.0 if prof.bounded else 2.0 * alpha * prof.rho_log, 0.0)
    samples = [(r, 2.0 * alpha * m_of_r(seq, r)) for r in grid.points()]
    rep = classify_samples(samples, asym)
    verdict = {Classification.DIVERGENT: Verdict.COMPLETE,
               Classification.CONVERGENT: Verdict.INCOMPLETE}.get(rep.classification, Verdict.INDETERMINATE)
    return ClosedFormReport(True, verdict, rep)


# ---------------------------------------------------------------------------
# combined verdict


def decide(w: WeightModel, seq: ExponentSequence, grid: GridSpec = DEFAULT_GRID,
           precision: str = "compensated") -> CriterionReport:
    notes: list = []
    closed = suff = nec = None
    try:
        closed = closed_form_test(w, seq, grid)
    except MuntzError as exc:
        notes.append(f"closed form failed: {exc}")
    try:
        suff = sufficiency_test(w, seq, grid, notes)
        if suff.reason:
            notes.append(f"sufficiency: {suff.reason}")
    except MuntzError as exc:
        notes.append(f"sufficiency failed: {exc}")
    try:
        nec = necessity_test(w, seq, grid, notes=notes, precision=precision)
    except MuntzError as exc:
        notes.append(f"necessity failed: {exc}")

    s_fired = bool(suff and suff.fired)
    n_fired = bool(nec and nec.fired)
    if s_fired and n_fired:
        verdict = Verdict.INCONSISTENT
        notes.append("both engines fired: numerical or precondition failure")
    elif s_fired:
        verdict = Verdict.COMPLETE
    elif n_fired and nec.preconditions_ok:
        verdict = Verdict.INCOMPLETE
    else:
        verdict = Verdict.INDETERMINATE
        if n_fired:
            notes.append("necessity fired but its preconditions are not verified")
    if closed is not None and closed.applicable and closed.verdict in (Verdict.COMPLETE, Verdict.INCOMPLETE):
        if verdict != closed.verdict:
            notes.append(f"engines give {verdict.value}, closed form gives {closed.verdict.value}")
    return CriterionReport(verdict, nec, suff, closed, notes)
