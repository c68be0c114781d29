"""Weights on (0, ∞), their moment function K(x) and structural certificates.

``K(x) = ∫_0^∞ t^{2x} w(t)^2 dt``.  Only ``K`` and ``x log φ(x) = log K(x) / 2``
are exposed; ``φ(x) = K(x)^{1/(2x)}`` itself is never formed because it
degenerates as ``x → 0+``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import DomainError, MomentDiverges, MomentMatrixSingular, NoConvergence, NotAdmissible
from .numerics.ddouble import DD, cholesky_dd_partial, cholesky_float_partial
from .numerics.diff import log_derivative
from .numerics.logscale import LogScaleValue
from .numerics.quadrature import DecayHint, integrate_log_u
from .special import digamma, log_gamma

HP_DPS = 40


# ---------------------------------------------------------------------------
# oscillatory factors


@dataclass(frozen=True)
class TrigPolynomial:
    """``const + Σ a sin(f t) + Σ b cos(f t)`` with frequencies ``f > 0``."""

    const: float
    sin_terms: tuple = ()
    cos_terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "sin_terms", tuple((float(a), float(f)) for a, f in self.sin_terms))
        object.__setattr__(self, "cos_terms", tuple((float(b), float(f)) for b, f in self.cos_terms))
        if any(f <= 0 for _, f in self.sin_terms + self.cos_terms):
            raise ValueError("frequencies must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.const)
        for a, f in self.sin_terms:
            out = out + a * np.sin(f * t)
        for b, f in self.cos_terms:
            out = out + b * np.cos(f * t)
        return out

    def bounds(self) -> tuple[float, float]:
        amp = sum(abs(a) for a, _ in self.sin_terms) + sum(abs(b) for b, _ in self.cos_terms)
        return self.const - amp, self.const + amp

    def value_at_zero(self) -> float:
        return self.const + sum(b for b, _ in self.cos_terms)

    def square_spectrum(self) -> dict:
        """Coefficients ``A_f`` with ``self(t)**2 = Σ_f A_f e^{i f t}``."""
        b: dict = {0.0: complex(self.const)}
        for a, f in self.sin_terms:
            b[f] = b.get(f, 0) - 0.5j * a
            b[-f] = b.get(-f, 0) + 0.5j * a
        for c, f in self.cos_terms:
            b[f] = b.get(f, 0) + 0.5 * c
            b[-f] = b.get(-f, 0) + 0.5 * c
        sq: dict = {}
        for f1, c1 in b.items():
            for f2, c2 in b.items():
                sq[f1 + f2] = sq.get(f1 + f2, 0) + c1 * c2
        return {f: c for f, c in sq.items() if c != 0}

    def to_spec(self) -> dict:
        return {"const": self.const, "sin": [list(p) for p in self.sin_terms],
                "cos": [list(p) for p in self.cos_terms]}


# ---------------------------------------------------------------------------
# weight models


class WeightModel:
    """Common interface: ``log w``, ``log K``, ``K'/K`` and metadata."""

    kind: str = ""
    #: quadrature tolerance for moments; looser for non-smooth weights
    quad_rtol: float = 1e-12

    def log_w(self, t):
        raise NotImplementedError

    def log_w_u(self, u):
        """``log w(e^u)``; overridden where a direct form in ``u`` is exact."""
        with np.errstate(over="ignore"):
            return self.log_w(np.exp(u))

    @property
    def moment_domain(self) -> float:
        """``K(x) < ∞`` exactly for ``x`` above this value."""
        return -0.5

    @property
    def leading_term(self) -> Optional[tuple[float, float]]:
        """``(D_n, alpha_n)`` of the dominant exponential factor, if known."""
        return None

    def log_moment(self, x: float) -> float:
        return self.log_moment_quadrature(x)

    def log_moment_quadrature(self, x: float) -> float:
        c = 2.0 * x + 1.0

        def log_f(u):
            return c * u + 2.0 * self.log_w_u(u)

        return integrate_log_u(log_f, rtol=self.quad_rtol).log_mag

    def log_moment_hp(self, x) -> Optional[mpmath.mpf]:
        """``log K(x)`` to ``HP_DPS`` digits, or ``None`` when only double precision exists."""
        return None

    def dlog_moment(self, x: float) -> Optional[float]:
        """Closed-form ``K'/K``, or ``None``."""
        return None

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class GammaExp(WeightModel):
    """``w(t) = t**beta * exp(-D t**alpha)``."""

    beta: float = 0.0
    D: float = 1.0
    alpha: float = 1.0

    kind = "gamma_exp"

    def __post_init__(self):
        if not (self.D > 0 and self.alpha > 0):
            raise DomainError("GammaExp needs D > 0 and alpha > 0")

    def log_w(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return self.beta * np.log(t) - self.D * t ** self.alpha

    def log_w_u(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(over="ignore"):
            return self.beta * u - self.D * np.exp(self.alpha * u)

    @property
    def moment_domain(self) -> float:
        return -self.beta - 0.5

    @property
    def leading_term(self):
        return (self.D, self.alpha)

    def _s(self, x):
        return (2.0 * x + 2.0 * self.beta + 1.0) / self.alpha

    def log_moment(self, x: float) -> float:
        s = self._s(x)
        return log_gamma(s) - s * math.log(2.0 * self.D) - math.log(self.alpha)

    def log_moment_hp(self, x):
        with mpmath.workdps(HP_DPS):
            x = mpmath.mpf(x)
            s = (2 * x + 2 * mpmath.mpf(self.beta) + 1) / mpmath.mpf(self.alpha)
            return mpmath.loggamma(s) - s * mpmath.log(2 * mpmath.mpf(self.D)) - mpmath.log(mpmath.mpf(self.alpha))

    def dlog_moment(self, x: float) -> float:
        return (2.0 / self.alpha) * (digamma(self._s(x)) - math.log(2.0 * self.D))

    def to_spec(self) -> dict:
        return {"type": "gamma_exp", "beta": self.beta, "D": self.D, "alpha": self.alpha}


@dataclass(frozen=True)
class ProductOsc(WeightModel):
    """``w(t) = osc(t) * t**beta * Π_k exp(-D_k t**alpha_k)``.

    ``osc`` is the bounded factor (the ``μ`` of the admissibility
    decomposition), ``t**beta Π exp(...)`` is ``ν``.  When ``osc`` is a
    :class:`TrigPolynomial` and the only non-constant exponential term has
    ``alpha = 1`` the moments have a closed form through
    ``∫ t^{s-1} e^{-(λ - i f) t} dt = Γ(s) (λ - i f)^{-s}``; otherwise the
    moments are computed by quadrature (``method="quadrature"`` forces it).
    """

    beta: float
    osc: Callable
    terms: tuple
    osc_lo: Optional[float] = None
    osc_hi: Optional[float] = None
    method: str = "auto"

    kind = "product_osc"

    def __post_init__(self):
        terms = tuple((float(D), float(a)) for D, a in self.terms)
        if not terms:
            raise ValueError("ProductOsc needs at least one exponential term")
        alphas = [a for _, a in terms]
        if alphas[0] < 0 or any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("term exponents must satisfy 0 <= alpha_1 < ... < alpha_n")
        object.__setattr__(self, "terms", terms)
        lo, hi = self.osc_lo, self.osc_hi
        if isinstance(self.osc, TrigPolynomial):
            blo, bhi = self.osc.bounds()
            lo = blo if lo is None else max(lo, blo)
            hi = bhi if hi is None else min(hi, bhi)
        if lo is None or hi is None:
            raise ValueError("callable osc factors need explicit osc_lo and osc_hi")
        if not (0 < lo <= hi):
            raise ValueError("osc bounds must satisfy 0 < osc_lo <= osc_hi")
        object.__setattr__(self, "osc_lo", float(lo))
        object.__setattr__(self, "osc_hi", float(hi))
        if self.method not in ("auto", "quadrature"):
            raise ValueError("method must be 'auto' or 'quadrature'")

    def log_nu_u(self, u):
        u = np.asarray(u, dtype=float)
        out = self.beta * u
        with np.errstate(over="ignore"):
            for D, a in self.terms:
                out = out - D * np.exp(a * u)
        return out

    def log_w(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return self.log_nu_u(np.log(t)) + np.log(np.abs(self.osc(t)))

    def log_w_u(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            t = np.exp(u)
            osc = np.where(np.isfinite(t), np.abs(self.osc(np.where(np.isfinite(t), t, 0.0))), 1.0)
            return self.log_nu_u(u) + np.log(osc)

    @property
    def moment_domain(self) -> float:
        return -self.beta - 0.5

    @property
    def leading_term(self):
        return self.terms[-1]

    @property
    def closed_form(self) -> bool:
        moving = [(D, a) for D, a in self.terms if a > 0]
        return (self.method == "auto" and isinstance(self.osc, TrigPolynomial)
                and len(moving) == 1 and moving[0][1] == 1.0 and moving[0][0] > 0)

    def _closed_parts(self):
        lam = 2.0 * next(D for D, a in self.terms if a > 0)
        const = -2.0 * sum(D for D, a in self.terms if a == 0)
        spec = self.osc.square_spectrum()
        return lam, const, spec

    def _spectral_sum(self, s: float):
        lam, _, spec = self._closed_parts()
        total, deriv = 0j, 0j
        for f, A in spec.items():
            L = cmath.log(1 - 1j * f / lam)
            e = cmath.exp(-s * L)
            total += A * e
            deriv -= A * L * e
        return total.real, deriv.real

    def log_moment(self, x: float) -> float:
        if not self.closed_form:
            return self.log_moment_quadrature(x)
        lam, const, _ = self._closed_parts()
        s = 2.0 * x + 2.0 * self.beta + 1.0
        R, _ = self._spectral_sum(s)
        return log_gamma(s) - s * math.log(lam) + const + math.log(R)

    def dlog_moment(self, x: float) -> Optional[float]:
        if not self.closed_form:
            return None
        lam, _, _ = self._closed_parts()
        s = 2.0 * x + 2.0 * self.beta + 1.0
        R, dR = self._spectral_sum(s)
        return 2.0 * (digamma(s) - math.log(lam) + dR / R)

    def log_moment_hp(self, x):
        if not self.closed_form:
            return None
        lam, const, spec = self._closed_parts()
        with mpmath.workdps(HP_DPS):
            lam = mpmath.mpf(lam)
            s = 2 * mpmath.mpf(x) + 2 * mpmath.mpf(self.beta) + 1
            R = mpmath.fsum(mpmath.mpc(A) * mpmath.power(1 - 1j * mpmath.mpf(f) / lam, -s)
                            for f, A in spec.items())
            return mpmath.loggamma(s) - s * mpmath.log(lam) + const + mpmath.log(mpmath.re(R))

    def to_spec(self) -> dict:
        if not isinstance(self.osc, TrigPolynomial):
            raise TypeError("only trigonometric osc factors are serializable")
        return {"type": "product_osc", "beta": self.beta, "osc": self.osc.to_spec(),
                "terms": [list(t) for t in self.terms]}


@dataclass(frozen=True)
class CustomWeight(WeightModel):
    """User-supplied ``log w``; moments by quadrature.

    ``alpha`` optionally names the exponent scale used by the sufficiency
    test (the analogue of the exponential exponent of the other models).
    """

    log_w_eval: Callable
    decay_hint: DecayHint
    alpha: Optional[float] = None
    name: str = "custom"
    spec: Optional[dict] = field(default=None, compare=False)
    quad_rtol: float = 1e-12

    kind = "custom"

    def log_w(self, t):
        return np.asarray(self.log_w_eval(np.asarray(t, dtype=float)), dtype=float)

    @property
    def moment_domain(self) -> float:
        # a weight bounded near t = 0 has finite moments for x > -1/2
        return -0.5 if self.spec is None else float(self.spec.get("moment_domain", -0.5))

    @property
    def leading_term(self):
        return (self.decay_hint.rate, self.decay_hint.power)

    def to_spec(self) -> dict:
        if self.spec is None:
            raise TypeError("callable custom weights are not serializable")
        return dict(self.spec)


def table_weight(t: Sequence[float], w: Sequence[float], decay_rate: float, decay_power: float,
                 small_t_power: float = 0.0, alpha: Optional[float] = None) -> CustomWeight:
    """Weight interpolated log-linearly in ``log t`` from samples.

    Beyond the last node ``w`` decays as ``exp(-rate t**power)``; below the
    first node it behaves like ``t**small_t_power``.
    """
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    lw = np.log(w)
    if t.ndim != 1 or len(t) < 2 or len(t) != len(lw):
        raise ValueError("table needs matching t and w arrays of length >= 2")
    if (t <= 0).any() or (np.diff(t) <= 0).any() or not np.isfinite(lw).all():
        raise ValueError("table t must be positive and increasing, w positive")
    lt = np.log(t)
    t_max = t[-1]

    def log_w_eval(tt):
        tt = np.asarray(tt, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            ltt = np.log(tt)
            mid = np.interp(ltt, lt, lw)
            left = lw[0] + small_t_power * (ltt - lt[0])
            right = lw[-1] - decay_rate * (tt ** decay_power - t_max ** decay_power)
        return np.where(ltt < lt[0], left, np.where(tt > t_max, right, mid))

    spec = {"type": "table", "t": t.tolist(), "w": w.tolist(),
            "decay": {"rate": decay_rate, "power": decay_power}, "small_t_power": small_t_power}
    if alpha is not None:
        spec["alpha"] = alpha
    spec["moment_domain"] = -0.5 - small_t_power
    # piecewise-linear log w has kinks: the trapezoid rule converges like h^2 only
    return CustomWeight(log_w_eval, DecayHint(decay_rate, decay_power), alpha, "table", spec, quad_rtol=1e-9)


WEIGHT_TYPES = ("gamma_exp", "product_osc", "table")


def weight_from_spec(spec: dict) -> WeightModel:
    t = spec["type"]
    if t == "gamma_exp":
        return GammaExp(float(spec.get("beta", 0.0)), float(spec["D"]), float(spec["alpha"]))
    if t == "product_osc":
        o = spec["osc"]
        osc = TrigPolynomial(float(o["const"]), tuple(map(tuple, o.get("sin", []))),
                             tuple(map(tuple, o.get("cos", []))))
        return ProductOsc(float(spec.get("beta", 0.0)), osc, tuple(map(tuple, spec["terms"])))
    if t == "table":
        d = spec["decay"]
        return table_weight(spec["t"], spec["w"], float(d["rate"]), float(d["power"]),
                            float(spec.get("small_t_power", 0.0)), spec.get("alpha"))
    raise ValueError(f"unknown weight type {t!r}; expected one of {', '.join(WEIGHT_TYPES)}")


# ---------------------------------------------------------------------------
# moment function


def _check_domain(w: WeightModel, x: float) -> None:
    if not x > w.moment_domain:
        raise MomentDiverges(f"K({x!r}) diverges: need x > {w.moment_domain!r}")


def moment_K(w: WeightModel, x: float, method: str = "auto") -> LogScaleValue:
    """``K(x) = ∫_0^∞ t^{2x} w(t)^2 dt`` in log-scale.

    ``method="quadrature"`` bypasses any closed form.
    """
    _check_domain(w, x)
    if method == "quadrature":
        return LogScaleValue(1, w.log_moment_quadrature(x))
    if method != "auto":
        raise ValueError("method must be 'auto' or 'quadrature'")
    return LogScaleValue(1, w.log_moment(x))


def moment_K_hp(w: WeightModel, x) -> tuple[mpmath.mpf, bool]:
    """``(log K(x), extended)``; ``extended`` is False when only double precision is available."""
    _check_domain(w, float(x))
    v = w.log_moment_hp(x)
    if v is None:
        with mpmath.workdps(HP_DPS):
            return mpmath.mpf(w.log_moment(float(x))), False
    return v, True


def x_log_phi(w: WeightModel, x: float) -> float:
    """``x log φ(x) = log K(x) / 2``."""
    return 0.5 * moment_K(w, x).log_mag


def log_K_ratio(w: WeightModel, x: float, method: str = "auto") -> float:
    """``K'(x)/K(x)``, closed form where available, else numerical."""
    _check_domain(w, x)
    if method == "auto":
        v = w.dlog_moment(x)
        if v is not None:
            return v
    elif method != "numeric":
        raise ValueError("method must be 'auto' or 'numeric'")
    room = x - w.moment_domain
    scale = min(0.25, 0.5 * room)
    return log_derivative(w.log_moment, x, scale)


# ---------------------------------------------------------------------------
# admissibility


@dataclass
class ConditionCheck:
    condition: str
    status: str  # "Pass", "Fail" or "Skipped"
    evidence: dict

    def to_dict(self) -> dict:
        return {"condition": self.condition, "status": self.status, "evidence": self.evidence}


@dataclass
class AdmissibilityCertificate:
    gamma_spec: dict
    C0: Optional[float]
    C_scale: Optional[float]
    a_exp: Optional[int]
    checks: list
    assumed: bool = False

    @property
    def admissible(self) -> bool:
        return not self.assumed and all(c.status == "Pass" for c in self.checks)

    def to_dict(self) -> dict:
        return {"gamma_spec": self.gamma_spec, "C0": self.C0, "C_scale": self.C_scale,
                "a_exp": self.a_exp, "assumed": self.assumed, "admissible": self.admissible,
                "checks": [c.to_dict() for c in self.checks]}


def _factor_parts(w: WeightModel):
    """``(log ν(e^u), μ(0+), leading (D, alpha))`` for the structured models."""
    if isinstance(w, GammaExp):
        return w.log_w_u, 1.0, (w.D, w.alpha), w.beta
    if isinstance(w, ProductOsc):
        if isinstance(w.osc, TrigPolynomial):
            mu0 = w.osc.value_at_zero()
        else:
            mu0 = float(w.osc(np.array([1e-12]))[0])
        return w.log_nu_u, mu0, w.terms[-1], w.beta
    raise TypeError("structured weight expected")


def admissibility_certificate(w: WeightModel) -> AdmissibilityCertificate:
    """Witness for the four admissibility conditions.

    The majorant is ``γ(t) = exp(3 D_n t**alpha_n)``, whose power series
    ``Σ (3 D_n)^k / k! t^{k alpha_n}`` has positive coefficients.
    """
    if isinstance(w, CustomWeight):
        checks = [ConditionCheck(c, "Skipped", {"reason": "custom weight: assumed, not verified"})
                  for c in ("majorant", "scaled_integrability", "mu_limit", "nu_integrability")]
        return AdmissibilityCertificate({}, None, None, None, checks, assumed=True)
    log_nu_u, mu0, (Dn, an), beta = _factor_parts(w)
    if not beta > -0.5:
        raise NotAdmissible(f"beta = {beta!r} must exceed -1/2")
    if not Dn > 0 or not an > 0:
        raise NotAdmissible("the leading exponential term needs D_n > 0 and alpha_n > 0")

    rate = 3.0 * Dn
    gamma_spec = {
        "leading_rate": rate, "leading_power": an,
        "coefficients": [rate ** k / math.factorial(k) for k in range(6)],
        "exponents": [an * k for k in range(6)],
    }
    # least integer C >= 2 with C**alpha_n > 3/2
    C_scale = max(2, math.floor(1.5 ** (1.0 / an)) + 1)
    a_exp = max(1, math.floor(beta + 0.5) + 1)
    checks = []

    # majorant: -2 log w(t) <= 3 D_n t^alpha_n beyond C0
    def margin(t):
        t = np.asarray(t, dtype=float)
        return rate * t ** an + 2.0 * w.log_w(t)

    t_stop = max(10.0, (1e4 / rate) ** (1.0 / an))
    scan = np.geomspace(1e-3, t_stop, 400)
    ok = margin(scan) >= 0
    bad = np.nonzero(~ok)[0]
    if len(bad) and bad[-1] == len(scan) - 1:
        C0 = None
        checks.append(ConditionCheck("majorant", "Fail", {"reason": "1/w^2 <= gamma not reached on the scan"}))
    else:
        start = scan[bad[-1] + 1] if len(bad) else scan[0]
        C0 = 2.0 * float(start)
        verify = np.geomspace(C0 * (1 + 1e-9), 10.0 * C0, 200)
        worst = float(margin(verify).min())
        checks.append(ConditionCheck("majorant", "Pass" if worst >= 0 else "Fail",
                                     {"C0": C0, "grid": [C0, 10.0 * C0], "min_log_margin": worst}))

    # scaled integrability: ∫ γ(t/C) w^2 dt < ∞
    lc = math.log(C_scale)
    try:
        val = integrate_log_u(lambda u: u + rate * np.exp(an * (u - lc)) + 2.0 * w.log_w_u(u))
        checks.append(ConditionCheck("scaled_integrability", "Pass",
                                     {"C_scale": C_scale, "log_integral": val.log_mag}))
    except (NoConvergence, ArithmeticError) as exc:
        checks.append(ConditionCheck("scaled_integrability", "Fail", {"C_scale": C_scale, "reason": str(exc)}))

    # μ(0+) finite and positive
    checks.append(ConditionCheck("mu_limit", "Pass" if (math.isfinite(mu0) and mu0 > 0) else "Fail",
                                 {"mu_at_0": mu0}))

    # witness exponent: ∫_0^1 (t^{a-1} / ν(t))^2 dt < ∞
    try:
        val = integrate_log_u(lambda u: u + 2.0 * (a_exp - 1) * u - 2.0 * log_nu_u(u), hi=0.0, rtol=1e-10)
        checks.append(ConditionCheck("nu_integrability", "Pass", {"a": a_exp, "log_integral": val.log_mag}))
    except (NoConvergence, ArithmeticError) as exc:
        checks.append(ConditionCheck("nu_integrability", "Fail", {"a": a_exp, "reason": str(exc)}))

    cert = AdmissibilityCertificate(gamma_spec, C0, float(C_scale), a_exp, checks)
    if not cert.admissible:
        failed = [c.condition for c in checks if c.status != "Pass"]
        err = NotAdmissible(f"admissibility checks failed: {', '.join(failed)}")
        err.certificate = cert
        raise err
    return cert


# ---------------------------------------------------------------------------
# normality probe


@dataclass
class NormalityReport:
    zeros: list  # (n, x_{1,n})
    fitted_c: float
    fitted_lambda: float
    verdict: str  # "NormalPolyRate", "NormalExpRate" or "Fail"
    attained_n: int
    precision: str
    notes: list = field(default_factory=list)

    @property
    def normal(self) -> bool:
        return self.verdict != "Fail"

    def to_dict(self) -> dict:
        return {"zeros": [[n, x] for n, x in self.zeros], "fitted_c": self.fitted_c,
                "fitted_lambda": self.fitted_lambda, "verdict": self.verdict,
                "attained_n": self.attained_n, "precision": self.precision, "notes": list(self.notes)}


def recurrence_from_moments(log_moments, precision: str = "compensated"):
    """Jacobi-matrix entries from ``log μ_j`` (``j = 0..2N``), Golub-Welsch style.

    The Hankel matrix is equilibrated by ``sqrt(μ_{2i} μ_{2j})`` and
    factored; returns ``(diag, offdiag, attained)`` where ``attained`` is the
    largest degree whose recurrence coefficients are available.
    """
    N = (len(log_moments) - 1) // 2
    with mpmath.workdps(HP_DPS):
        lm = [mpmath.mpf(v) for v in log_moments]
        Hn = [[mpmath.exp(lm[i + j] - (lm[2 * i] + lm[2 * j]) / 2) for j in range(N + 1)] for i in range(N + 1)]
        d = [mpmath.exp(lm[2 * i] / 2) for i in range(N + 1)]
        if precision == "compensated":
            A = [[DD.from_mpf(v) for v in row] for row in Hn]
            L, fail = cholesky_dd_partial(A)
            # r_ij = L[j][i] * d_j (upper factor of the raw Hankel matrix)
            def r(i, j):
                return L[j][i] * DD.from_mpf(d[j])
        else:
            A = np.array([[float(v) for v in row] for row in Hn])
            Lf, fail = cholesky_float_partial(A)
            df = [float(v) for v in d]

            def r(i, j):
                return DD(Lf[j, i] * df[j])
    k = N + 1 if fail is None else fail
    attained = min(k, N)
    diag, off = [], []
    for j in range(attained):
        a = r(j, j + 1) / r(j, j)
        if j > 0:
            a = a - r(j - 1, j) / r(j - 1, j - 1)
        diag.append(float(a))
        if j + 1 < attained:
            off.append(float(r(j + 1, j + 1) / r(j, j)))
    return diag, off, attained, fail


def normality_probe(w: WeightModel, n_max: int = 12, precision: str = "compensated") -> NormalityReport:
    """Largest orthogonal-polynomial zeros ``x_{1,n}`` and their growth rate."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    logs, extended = [], True
    for j in range(2 * n_max + 1):
        v, ext = moment_K_hp(w, mpmath.mpf(j) / 2)
        logs.append(v)
        extended = extended and ext
    prec = precision if extended else "double"
    notes = [] if extended else ["moments available in double precision only"]
    diag, off, attained, fail = recurrence_from_moments(logs, prec if prec == "compensated" else "double")
    if attained < 1:
        raise MomentMatrixSingular(0, "moment matrix is not positive definite at working precision")
    if fail is not None:
        notes.append(f"Hankel factorization lost positive definiteness at pivot {fail}")
    zeros = []
    for n in range(1, attained + 1):
        if n == 1:
            x1 = diag[0]
        else:
            x1 = float(eigvalsh_tridiagonal(np.array(diag[:n]), np.array(off[: n - 1]),
                                            select="i", select_range=(n - 1, n - 1))[0])
        if zeros and not x1 > zeros[-1][1]:
            notes.append(f"largest zero stopped increasing at n={n}; probe truncated")
            break
        zeros.append((n, x1))
    return _normality_verdict(zeros, prec, notes)


def _normality_verdict(zeros, precision, notes) -> NormalityReport:
    ns = np.array([n for n, _ in zeros], dtype=float)
    xs = np.array([x for _, x in zeros], dtype=float)
    c_bound = float(max(math.log(max(x, 1.0)) / n for n, x in zeros))
    if len(zeros) < 4:
        notes.append("too few zeros to fit a growth rate")
        return NormalityReport(zeros, c_bound, math.nan, "Fail", len(zeros), precision, notes)
    lx = np.log(xs)
    up = slice(len(zeros) // 2, None)
    lam = float(np.polyfit(np.log(ns[up]), lx[up], 1)[0])
    loglog_slopes = np.diff(lx) / np.diff(np.log(ns))
    semilog_slopes = np.diff(lx) / np.diff(ns)
    tail = len(loglog_slopes) // 2

    def settles(slopes, slack):
        ref = float(np.median(slopes[tail:]))
        return bool(slopes[-1] <= 1.25 * ref + slack)

    if settles(loglog_slopes, 0.1):
        verdict = "NormalPolyRate"
    elif settles(semilog_slopes, 0.01):
        verdict = "NormalExpRate"
    else:
        verdict = "Fail"
    return NormalityReport(zeros, c_bound, lam, verdict, len(zeros), precision, notes)
