"""The product ``H(z) = Π_k (a_k - z)/(a_k + z) · exp(2z/a_k)`` and its bounds.

On ``Re z >= 0`` one expects ``|H(z)| <= (C Ψ(r))^x`` everywhere and
``|H(z)| >= (C₂ Ψ(r))^x`` away from discs of radius ``d/3`` around the
exponents (``x = Re z``, ``r = |z|``).  The ``check_*`` functions fit the
best constants on a grid.

With ``u = z/a``, ``log((1-u)/(1+u)) + 2u = -2 Σ_{j>=1} u^{2j+1}/(2j+1)``.
Beyond a cutoff where ``|u| <= 1/2`` the tail of the product is summed
through this series, with the power sums ``Σ_{k>M} a_k^{-p}`` in closed form
(Hurwitz zeta or geometric series).
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy.special import zeta

from .errors import DomainError, GridViolation, TailBoundFail
from .exponents import Arithmetic, ExponentSequence, Explicit, Geometric, Power, gap_check, m_of_r

DEFAULT_TAIL_TOL = 1e-10
_MAX_TERMS = 5_000_000
_SERIES_U = 0.5


@dataclass(frozen=True)
class FuchsProduct:
    seq: ExponentSequence
    tail_tol: float = DEFAULT_TAIL_TOL
    max_terms: int = _MAX_TERMS
    exclusion_radius: float = field(init=False)

    def __post_init__(self):
        d = gap_check(self.seq)
        if d is None or not d > 0:
            raise ValueError("the Fuchs product needs a uniform gap between exponents")
        object.__setattr__(self, "exclusion_radius", min(d, 1e300) / 3.0)


@dataclass(frozen=True)
class HValue:
    """``H(z)`` as ``log|H|`` and ``arg H`` in ``(-π, π]``; ``log_abs = -inf`` at zeros."""

    log_abs: float
    arg: float
    cutoff: int
    tail_bound: float

    @property
    def is_zero(self) -> bool:
        return self.log_abs == -math.inf

    def __complex__(self) -> complex:
        if self.is_zero:
            return 0j
        return cmath.rect(math.exp(self.log_abs), self.arg)


def _tail_power_sum(seq: ExponentSequence, M: int, p: int) -> float:
    """``Σ_{k>M} a_k^{-p}``."""
    if isinstance(seq, Arithmetic):
        return seq.d ** -p * float(zeta(p, seq.a1 / seq.d + M))
    if isinstance(seq, Power):
        return seq.c ** -p * float(zeta(seq.p * p, M + 1))
    if isinstance(seq, Geometric):
        return seq.a1 ** -p * seq.q ** (-p * M) / -math.expm1(-p * math.log(seq.q))
    raise TypeError(f"no closed tail for {seq!r}")


def _cutoff(fp: FuchsProduct, r: float) -> int:
    seq = fp.seq
    if isinstance(seq, Explicit):
        return len(seq)
    M = int(seq.count_below(r / _SERIES_U)) + 1
    if M > fp.max_terms:
        raise TailBoundFail(f"|z| = {r:g} needs {M} explicit factors before the tail series applies",
                            required_cutoff=seq.term(M))
    return M


def _direct(a: np.ndarray, z: complex) -> tuple[float, float]:
    u = z / a
    small = np.abs(u) < 0.1
    out = np.empty(len(a), dtype=complex)
    us = u[small]
    u2 = us * us
    acc = np.zeros_like(us)
    for j in range(7, 0, -1):
        acc = acc * u2 + 1.0 / (2 * j + 1)
    out[small] = -2.0 * us * u2 * acc
    ub = u[~small]
    out[~small] = np.log(1.0 - ub) - np.log(1.0 + ub) + 2.0 * ub
    return math.fsum(out.real), math.fsum(out.imag)


def eval_H(fp: FuchsProduct, z: complex, cutoff: Optional[int] = None) -> HValue:
    """``H(z)`` for ``Re z >= 0``; ``cutoff`` overrides the number of explicit factors."""
    z = complex(z)
    if z.real < 0:
        raise DomainError("H is evaluated on Re z >= 0 only")
    seq = fp.seq
    r = abs(z)
    if r == 0:
        return HValue(0.0, 0.0, 0, 0.0)
    M = _cutoff(fp, r) if cutoff is None else int(cutoff)
    if isinstance(seq, Explicit):
        M = min(M, len(seq))
    elif cutoff is not None and seq.term(M + 1) * _SERIES_U < r:
        raise TailBoundFail("cutoff too small for the tail series", required_cutoff=r / _SERIES_U)
    a = np.array(seq.first(M), dtype=float)
    if np.any(a == z):
        return HValue(-math.inf, 0.0, M, 0.0)
    re, im = _direct(a, z) if M else (0.0, 0.0)
    tail_bound = 0.0
    if not isinstance(seq, Explicit):
        if isinstance(seq, Power) and 3 * seq.p <= 1:
            raise TailBoundFail("Σ a_k^-3 diverges: the product does not converge", required_cutoff=math.inf)
        s3 = _tail_power_sum(seq, M, 3)
        tail_bound = (4.0 / 3.0) * r ** 3 * s3
        # |terms| of the series decay at least like (|z|/a_{M+1})^2
        q = (r / seq.term(M + 1)) ** 2
        zp = z ** 3
        tail = 0j
        j = 1
        while True:
            S = s3 if j == 1 else _tail_power_sum(seq, M, 2 * j + 1)
            term = -2.0 * zp * S / (2 * j + 1)
            tail += term
            if abs(term) * q / (1.0 - q) < 1e-3 * fp.tail_tol or S == 0.0:
                break
            zp *= z * z
            j += 1
            if j > 200:
                raise TailBoundFail("tail series did not converge", required_cutoff=seq.term(M + 1))
        re += tail.real
        im += tail.imag
    arg = math.remainder(im, 2.0 * math.pi)
    return HValue(re, arg, M, tail_bound)


# ---------------------------------------------------------------------------
# bound fits


@dataclass
class BoundRow:
    z: complex
    log_abs_H: float
    bound_rhs: float


@dataclass
class BoundFit:
    constant: float
    extreme: float  # max violation (upper) or min margin (lower)
    rows: list

    def to_dict(self) -> dict:
        return {"constant": self.constant, "extreme": self.extreme,
                "rows": [[r.z.real, r.z.imag, r.log_abs_H, r.bound_rhs] for r in self.rows]}


def _values(fp: FuchsProduct, grid: Iterable[complex]):
    out = []
    for z in grid:
        z = complex(z)
        h = eval_H(fp, z)
        out.append((z, h.log_abs, 2.0 * m_of_r(fp.seq, abs(z))))
    return out


def check_upper_bound(fp: FuchsProduct, grid: Iterable[complex]) -> BoundFit:
    """Least ``C >= 1`` with ``log|H(z)| <= x (log C + 2 m(r))`` on the grid."""
    vals = _values(fp, grid)
    log_C = 0.0
    for z, lh, m2 in vals:
        if z.real > 0 and lh > -math.inf:
            log_C = max(log_C, lh / z.real - m2)
    rows, worst = [], -math.inf
    for z, lh, m2 in vals:
        rhs = z.real * (log_C + m2)
        rows.append(BoundRow(z, lh, rhs))
        if lh > -math.inf:
            worst = max(worst, lh - rhs)
    return BoundFit(math.exp(log_C), worst, rows)


def _inside_exclusion(fp: FuchsProduct, z: complex) -> Optional[float]:
    rad = fp.exclusion_radius
    seq = fp.seq
    lo = max(z.real - rad, 0.0)
    k = int(seq.count_below(lo)) + 1
    while True:
        a = seq.term(k)
        if not math.isfinite(a) or a > z.real + rad:
            return None
        if abs(z - a) <= rad:
            return a
        k += 1


def check_lower_bound(fp: FuchsProduct, grid: Iterable[complex]) -> BoundFit:
    """Largest ``C₂`` with ``log|H(z)| >= x (log C₂ + 2 m(r))`` on the grid."""
    grid = [complex(z) for z in grid]
    for z in grid:
        a = _inside_exclusion(fp, z)
        if a is not None:
            raise GridViolation(f"z = {z!r} lies within {fp.exclusion_radius:g} of the exponent {a!r}")
    vals = _values(fp, grid)
    log_C2 = math.inf
    for z, lh, m2 in vals:
        if z.real > 0:
            log_C2 = min(log_C2, lh / z.real - m2)
    if log_C2 == math.inf:
        log_C2 = 0.0
    rows, margin = [], math.inf
    for z, lh, m2 in vals:
        rhs = z.real * (log_C2 + m2)
        rows.append(BoundRow(z, lh, rhs))
        margin = min(margin, lh - rhs)
    return BoundFit(math.exp(log_C2), margin, rows)


def quarter_disc_grid(r_max: float, n_radii: int = 24, n_angles: int = 9, r_min: float = 0.1) -> list:
    """Polar grid on ``{|z| <= r_max, Re z >= 0, Im z >= 0}``, both axes included."""
    radii = np.geomspace(r_min, r_max, n_radii)
    angles = np.linspace(0.0, 0.5 * math.pi, n_angles)
    pts = [complex(r * math.cos(t), r * math.sin(t)) for r in radii for t in angles]
    # the ray cos(π/2) is not exactly 0; pin the imaginary axis
    return [complex(0.0, z.imag) if abs(z.real) < 1e-12 * abs(z) else z for z in pts]


def lower_bound_grid(fp: FuchsProduct, r_max: float, n_radii: int = 24, n_angles: int = 9) -> list:
    """``quarter_disc_grid`` with points inside the exclusion discs removed."""
    return [z for z in quarter_disc_grid(r_max, n_radii, n_angles) if _inside_exclusion(fp, z) is None]


def write_fuchs_csv(fit: BoundFit, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["re_z", "im_z", "log_abs_H", "bound_rhs"])
        for r in fit.rows:
            wr.writerow([repr(r.z.real), repr(r.z.imag), repr(r.log_abs_H), repr(r.bound_rhs)])
