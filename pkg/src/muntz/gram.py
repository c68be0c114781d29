"""Best approximation of ``t^b`` from ``span{t^{a_k}}`` in ``L²_w(0, ∞)``.

``<t^p, t^q>_w = K((p + q)/2)``, so Gram matrices are matrices of moments.
They are Hilbert-like: entries span hundreds of orders of magnitude and the
condition number grows geometrically with ``n``.  Entries are formed from
high-precision log-moments, equilibrated to unit diagonal
(``E_ij = G_ij / sqrt(G_ii G_jj)``) and factored in double-double.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np

from .errors import FactorizationFail, MomentDiverges, NegativeRadicand
from .exponents import ExponentSequence
from .numerics.ddouble import DD, EPS, cholesky_dd_partial, cholesky_float_partial, dd_dot
from .numerics.logscale import LogScaleValue
from .weight import HP_DPS, WeightModel, moment_K_hp

#: stop sweeps once the factor-diagonal condition estimate exceeds this
COND_CUTOFF = {"compensated": 1e24, "double": 1e12}
_UNIT = {"compensated": EPS, "double": 2.0 ** -53}


@dataclass
class GramSystem:
    weight: WeightModel
    exps: tuple
    log_K: dict  # exponent sum/2 -> log K as mpf
    E: list  # equilibrated matrix, DD (compensated) or float entries
    factor: list  # lower factor of the leading ``attained`` block
    attained: int
    failure_index: Optional[int]
    cond_estimate: float
    precision: str
    extended_moments: bool = True

    @property
    def n(self) -> int:
        return len(self.exps)

    @property
    def G(self) -> list:
        """Raw Gram matrix as log-scale values."""
        a = self.exps
        return [[LogScaleValue(1, float(self.log_K[_key(a[i], a[j])])) for j in range(self.n)]
                for i in range(self.n)]

    def cond_prefix(self, n: int) -> float:
        diag = [float(self.factor[i][i]) for i in range(n)]
        return (max(diag) / min(diag)) ** 2


def _key(p: float, q: float) -> float:
    return 0.5 * (p + q)


def _log_moment(w: WeightModel, x: float, cache: dict):
    if x not in cache:
        v, ext = moment_K_hp(w, x)
        cache[x] = v
        cache.setdefault("_double", False)
        if not ext:
            cache["_double"] = True
    return cache[x]


def build_gram(w: WeightModel, exps: Sequence[float], precision: str = "compensated",
               allow_partial: bool = False) -> GramSystem:
    """Assemble and factor the Gram matrix of ``t^{a_i}``.

    With ``allow_partial`` a loss of positive definiteness truncates the
    system to the leading block that factored; otherwise it raises
    :class:`FactorizationFail`.
    """
    if precision not in COND_CUTOFF:
        raise ValueError("precision must be 'compensated' or 'double'")
    a = tuple(float(v) for v in exps)
    if not a:
        raise ValueError("need at least one exponent")
    if len(set(a)) != len(a):
        raise ValueError("exponents must be distinct")
    if min(a) <= w.moment_domain:
        raise MomentDiverges(f"K({min(a)!r}) diverges for this weight")
    cache: dict = {}
    n = len(a)
    with mpmath.workdps(HP_DPS):
        lk = {}
        for i in range(n):
            for j in range(i, n):
                x = _key(a[i], a[j])
                lk[x] = _log_moment(w, x, cache)
        diag = [lk[a[i]] for i in range(n)]
        E_mp = [[mpmath.exp(lk[_key(a[i], a[j])] - (diag[i] + diag[j]) / 2) for j in range(n)] for i in range(n)]
    extended = not cache.get("_double", False)
    if not extended:
        precision = "double"
    if precision == "compensated":
        E = [[DD.from_mpf(v) for v in row] for row in E_mp]
        L, fail = cholesky_dd_partial(E)
    else:
        E = np.array([[float(v) for v in row] for row in E_mp])
        Lf, fail = cholesky_float_partial(E)
        L = [[DD(float(v)) for v in row] for row in Lf]
        E = [[DD(float(v)) for v in row] for row in E]
    if fail is not None and not allow_partial:
        raise FactorizationFail(fail)
    attained = n if fail is None else fail
    if attained == 0:
        raise FactorizationFail(0)
    sys_ = GramSystem(w, a, lk, E, L, attained, fail, 0.0, precision, extended)
    sys_.cond_estimate = sys_.cond_prefix(attained)
    return sys_


def _border(sys: GramSystem, b: float, n: int):
    """Equilibrated cross moments ``K((b + a_i)/2) / sqrt(K(a_i) K(b))`` and ``log K(b)``."""
    w = sys.weight
    cache: dict = {}
    with mpmath.workdps(HP_DPS):
        lkb = _log_moment(w, b, cache)
        col = []
        for i in range(n):
            ai = sys.exps[i]
            lc = _log_moment(w, _key(b, ai), cache)
            col.append(mpmath.exp(lc - (lkb + sys.log_K[ai]) / 2))
    if sys.precision == "compensated":
        return [DD.from_mpf(v) for v in col], lkb
    return [DD(float(v)) for v in col], lkb


def _forward(sys: GramSystem, c: list, n: int) -> list:
    L = sys.factor
    y: list = []
    compensated = sys.precision == "compensated"
    for i in range(n):
        acc = c[i] - dd_dot(L[i][:i], y)
        v = acc / L[i][i]
        y.append(v if compensated else DD(float(v)))
    return y


def _radicand(y: list, n: int) -> DD:
    acc = DD(1.0)
    for v in y[:n]:
        acc = acc - v * v
    return acc


def _dist_from_radicand(rho: DD, log_Kb, tol: float) -> float:
    if rho.hi < 0:
        if -rho.hi > tol:
            raise NegativeRadicand(f"residual norm squared is {float(rho):.3e} (tolerance {tol:.1e})")
        return 0.0
    return math.exp(0.5 * float(log_Kb)) * math.sqrt(float(rho))


def _radicand_tol(sys: GramSystem, n: int) -> float:
    return 64.0 * _UNIT[sys.precision] * max(1.0, sys.cond_prefix(n))


def distance_to_span(sys: GramSystem, b: float) -> float:
    """``dist(t^b, span{t^{a_i}})`` in ``L²_w``.

    Equals ``sqrt(K(b)) * sqrt(1 - |y|²)`` where ``L y = ĉ`` solves against
    the equilibrated factor; small negative radicands within rounding are
    clamped to 0, larger ones raise :class:`NegativeRadicand`.
    """
    n = sys.attained
    if any(math.isclose(b, ai, rel_tol=0, abs_tol=0) for ai in sys.exps[:n]):
        return 0.0
    if not b > sys.weight.moment_domain:
        raise MomentDiverges(f"K({b!r}) diverges for this weight")
    c, lkb = _border(sys, b, n)
    y = _forward(sys, c, n)
    return _dist_from_radicand(_radicand(y, n), lkb, _radicand_tol(sys, n))


def projection_coefficients(sys: GramSystem, b: float) -> list:
    """Coefficients ``c`` of the best approximation ``Σ c_i t^{a_i}`` of ``t^b``."""
    n = sys.attained
    cvec, lkb = _border(sys, b, n)
    y = _forward(sys, cvec, n)
    L = sys.factor
    z = [DD(0.0)] * n
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for k in range(i + 1, n):
            acc = acc - L[k][i] * z[k]
        z[i] = acc / L[i][i]
    # undo equilibration: coef_i = z_i sqrt(K(b) / K(a_i))
    return [float(z[i]) * math.exp(0.5 * float(lkb - sys.log_K[sys.exps[i]])) for i in range(n)]


def residual_inner_products(sys: GramSystem, b: float) -> list:
    """``<t^b - P t^b, t^{a_j}> / sqrt(K(b) K(a_j))`` for each basis function."""
    n = sys.attained
    cvec, _ = _border(sys, b, n)
    y = _forward(sys, cvec, n)
    L = sys.factor
    # z solves E z = ĉ through the factor; the residual is ĉ - E z
    z = [DD(0.0)] * n
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for k in range(i + 1, n):
            acc = acc - L[k][i] * z[k]
        z[i] = acc / L[i][i]
    return [float(cvec[j] - dd_dot(sys.E[j][:n], z)) for j in range(n)]


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepRow:
    n: int
    dist: float
    cond_estimate: float


@dataclass
class SweepResult:
    rows: list
    target_b: float
    attained_n: int
    failure_index: Optional[int] = None
    precision: str = "compensated"
    notes: list = field(default_factory=list)

    def pairs(self) -> list:
        return [(r.n, r.dist) for r in self.rows]

    def to_dict(self) -> dict:
        return {"target_b": self.target_b, "attained_n": self.attained_n,
                "failure_index": self.failure_index, "precision": self.precision,
                "rows": [[r.n, r.dist, r.cond_estimate] for r in self.rows], "notes": list(self.notes)}


def error_sweep(w: WeightModel, seq: ExponentSequence, b: float, n_values: Sequence[int],
                precision: str = "compensated", cond_cutoff: Optional[float] = None) -> SweepResult:
    """Distances from ``t^b`` to the spans of the first ``n`` exponents.

    One factorization of the largest system serves every ``n``: the
    forward solve is prefix-consistent, so ``dist_n² = K(b)(1 - Σ_{i<n} y_i²)``
    and the sequence is nonincreasing by construction.
    """
    n_values = [int(n) for n in n_values]
    if not n_values or any(n < 1 for n in n_values) or any(q <= p for p, q in zip(n_values, n_values[1:])):
        raise ValueError("n_values must be positive and strictly increasing")
    exps = seq.first(n_values[-1])
    notes = []
    if len(exps) < n_values[-1]:
        notes.append(f"sequence has only {len(exps)} exponents")
    sys = build_gram(w, exps, precision, allow_partial=True)
    cutoff = cond_cutoff if cond_cutoff is not None else COND_CUTOFF[sys.precision]
    if not sys.extended_moments:
        notes.append("moments available in double precision only")
    if sys.failure_index is not None:
        notes.append(f"factorization lost positive definiteness at pivot {sys.failure_index}")
    c, lkb = _border(sys, b, sys.attained)
    y = _forward(sys, c, sys.attained)
    rows = []
    attained = 0
    for n in n_values:
        if n > sys.attained:
            break
        cond = sys.cond_prefix(n)
        if cond > cutoff:
            notes.append(f"condition estimate {cond:.2e} exceeds {cutoff:.0e} at n={n}; sweep truncated")
            break
        if b in sys.exps[:n]:
            dist = 0.0
        else:
            dist = _dist_from_radicand(_radicand(y, n), lkb, _radicand_tol(sys, n))
        rows.append(SweepRow(n, dist, cond))
        attained = n
    return SweepResult(rows, float(b), attained, sys.failure_index, sys.precision, notes)


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["n", "dist", "cond_estimate"])
        for r in result.rows:
            wr.writerow([r.n, repr(r.dist), repr(r.cond_estimate)])
