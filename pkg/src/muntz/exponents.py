"""Exponent sequences, the counting function m(r) and Ψ(r) = exp(2 m(r))."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .numerics.logscale import LogScaleValue
from .special import digamma

#: partial sums with at most this many terms are summed term by term
_DIRECT_TERMS = 2000
_EM_SPLIT = 10_000


class ExponentSequence:
    """Strictly increasing positive exponents ``a_1 < a_2 < ...``."""

    kind: str = ""
    finite: bool = False

    def term(self, k: int) -> float:
        raise NotImplementedError

    def first(self, n: int) -> list[float]:
        if self.finite:
            n = min(n, len(self))
        return [self.term(k) for k in range(1, n + 1)]

    def count_below(self, r: float) -> float:
        """Number of terms with ``a_k < r`` (a float once past 2**53)."""
        raise NotImplementedError

    def _sum_first(self, n) -> float:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


def _adjust_count(seq: ExponentSequence, n: int, r: float) -> int:
    while seq.term(n + 1) < r:
        n += 1
    while n > 0 and seq.term(n) >= r:
        n -= 1
    return n


@dataclass(frozen=True)
class Explicit(ExponentSequence):
    values: tuple

    kind = "explicit"
    finite = True

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("explicit sequence needs at least one exponent")
        if vals[0] <= 0 or any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("exponents must be positive and strictly increasing")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def term(self, k: int) -> float:
        return self.values[k - 1] if k <= len(self.values) else math.inf

    def count_below(self, r: float) -> float:
        return sum(1 for v in self.values if v < r)

    def _sum_first(self, n) -> float:
        return math.fsum(1.0 / v for v in self.values[: int(n)])

    def to_spec(self) -> dict:
        return {"type": "explicit", "values": list(self.values)}


@dataclass(frozen=True)
class Arithmetic(ExponentSequence):
    a1: float
    d: float

    kind = "arithmetic"

    def __post_init__(self):
        if not (self.a1 > 0 and self.d > 0):
            raise ValueError("arithmetic sequence needs a1 > 0 and d > 0")

    def term(self, k: int) -> float:
        return self.a1 + (k - 1) * self.d

    def count_below(self, r: float) -> float:
        if r <= self.a1:
            return 0
        est = (r - self.a1) / self.d
        if est > 2.0 ** 52:
            return math.ceil(est)
        return _adjust_count(self, max(int(math.ceil(est)) - 1, 0), r)

    def _sum_first(self, n) -> float:
        if n <= _DIRECT_TERMS:
            return math.fsum(1.0 / self.term(k) for k in range(1, int(n) + 1))
        c = self.a1 / self.d
        return (digamma(c + n) - digamma(c)) / self.d

    def to_spec(self) -> dict:
        return {"type": "arithmetic", "a1": self.a1, "d": self.d}


@dataclass(frozen=True)
class Power(ExponentSequence):
    c: float
    p: float

    kind = "power"

    def __post_init__(self):
        if not (self.c > 0 and self.p > 0):
            raise ValueError("power sequence needs c > 0 and p > 0")

    def term(self, k: int) -> float:
        return self.c * k ** self.p

    def count_below(self, r: float) -> float:
        if r <= self.c:
            return 0
        est = (r / self.c) ** (1.0 / self.p)
        if est > 2.0 ** 52:
            return math.ceil(est)
        return _adjust_count(self, max(int(math.ceil(est)) - 1, 0), r)

    def _sum_first(self, n) -> float:
        return power_sum(self.p, n) / self.c

    def to_spec(self) -> dict:
        return {"type": "power", "c": self.c, "p": self.p}


@dataclass(frozen=True)
class Geometric(ExponentSequence):
    a1: float
    q: float

    kind = "geometric"

    def __post_init__(self):
        if not (self.a1 > 0 and self.q > 1):
            raise ValueError("geometric sequence needs a1 > 0 and q > 1")

    def term(self, k: int) -> float:
        return self.a1 * self.q ** (k - 1)

    def count_below(self, r: float) -> float:
        if r <= self.a1:
            return 0
        est = math.log(r / self.a1) / math.log(self.q) + 1
        return _adjust_count(self, max(int(math.ceil(est)) - 1, 0), r)

    def _sum_first(self, n) -> float:
        return -math.expm1(-n * math.log(self.q)) / (self.a1 * -math.expm1(-math.log(self.q)))

    def to_spec(self) -> dict:
        return {"type": "geometric", "a1": self.a1, "q": self.q}


def power_sum(p: float, n) -> float:
    """``sum_{k=1}^{n} k**(-p)``; Euler-Maclaurin beyond ``_EM_SPLIT`` terms."""
    if n <= _EM_SPLIT:
        return math.fsum(k ** -p for k in range(1, int(n) + 1))
    M = _EM_SPLIT
    head = math.fsum(k ** -p for k in range(1, M + 1))
    n = float(n)
    lr = math.log(n / M)
    if abs(1.0 - p) < 1e-12:
        integral = lr
    else:
        integral = M ** (1.0 - p) * math.expm1((1.0 - p) * lr) / (1.0 - p)
    tail = integral + 0.5 * (n ** -p - M ** -p)
    # B_2/2!, B_4/4!, B_6/6! times f^(2j-1)
    for coef, order in ((1.0 / 12.0, 1), (-1.0 / 720.0, 3), (1.0 / 30240.0, 5)):
        rising = math.prod(p + i for i in range(order))
        tail += coef * (-rising) * (n ** (-p - order) - M ** (-p - order))
    return head + tail


def m_of_r(seq: ExponentSequence, r: float) -> float:
    """Counting function: ``1/a_1`` for ``r <= a_1``, else ``sum_{a_k < r} 1/a_k``."""
    a1 = seq.term(1)
    if r <= a1:
        return 1.0 / a1
    return seq._sum_first(seq.count_below(r))


def psi(seq: ExponentSequence, r: float) -> LogScaleValue:
    """``Ψ(r) = exp(2 m(r))`` in log-scale."""
    return LogScaleValue(1, 2.0 * m_of_r(seq, r))


def gap_check(seq: ExponentSequence, probe_count: Optional[int] = None) -> Optional[float]:
    """Lower bound ``d > 0`` on the gaps ``a_{k+1} - a_k``, or ``None``.

    Structured sequences are decided exactly; explicit lists use the
    smallest adjacent gap among the first ``probe_count`` entries.
    """
    if isinstance(seq, Arithmetic):
        return seq.d
    if isinstance(seq, Geometric):
        return seq.a1 * (seq.q - 1.0)
    if isinstance(seq, Power):
        return seq.c * (2.0 ** seq.p - 1.0) if seq.p >= 1 else None
    if isinstance(seq, Explicit):
        vals = seq.values if probe_count is None else seq.values[: max(probe_count, 2)]
        if len(vals) < 2:
            return math.inf
        d = min(b - a for a, b in zip(vals, vals[1:]))
        return d if d > 0 else None
    raise TypeError(f"unsupported sequence {seq!r}")


class MuntzClass(str, enum.Enum):
    DIVERGENT = "Divergent"
    CONVERGENT = "Convergent"
    UNKNOWN_FINITE = "UnknownFinite"


@dataclass(frozen=True)
class MuntzSum:
    classification: MuntzClass
    partial_sum: Optional[float] = None


def muntz_sum_class(seq: ExponentSequence) -> MuntzSum:
    """Classify ``sum 1/a_k`` (the classical Müntz condition)."""
    if isinstance(seq, Arithmetic):
        return MuntzSum(MuntzClass.DIVERGENT)
    if isinstance(seq, Power):
        return MuntzSum(MuntzClass.DIVERGENT if seq.p <= 1 else MuntzClass.CONVERGENT)
    if isinstance(seq, Geometric):
        return MuntzSum(MuntzClass.CONVERGENT)
    if isinstance(seq, Explicit):
        return MuntzSum(MuntzClass.UNKNOWN_FINITE, seq._sum_first(len(seq)))
    raise TypeError(f"unsupported sequence {seq!r}")


@dataclass(frozen=True)
class CountingProfile:
    """Growth class of m(r): ``rho_log * log r + O(1)``, or bounded."""

    rho_log: Optional[float]
    bounded: bool
    exact: bool

    def __post_init__(self):
        if self.bounded and self.rho_log not in (0, 0.0):
            raise ValueError("a bounded profile has rho_log = 0")


def m_asymptotics(seq: ExponentSequence) -> CountingProfile:
    if isinstance(seq, Arithmetic):
        return CountingProfile(1.0 / seq.d, False, True)
    if isinstance(seq, Power):
        if seq.p > 1:
            return CountingProfile(0.0, True, True)
        if seq.p == 1:
            return CountingProfile(1.0 / seq.c, False, True)
        # m(r) grows like a positive power of r: no logarithmic rate
        return CountingProfile(None, False, False)
    if isinstance(seq, Geometric):
        return CountingProfile(0.0, True, True)
    if isinstance(seq, Explicit):
        return CountingProfile(0.0, True, False)
    raise TypeError(f"unsupported sequence {seq!r}")


SEQUENCE_TYPES = ("arithmetic", "power", "geometric", "explicit")


def sequence_from_spec(spec: dict) -> ExponentSequence:
    t = spec["type"]
    if t == "arithmetic":
        return Arithmetic(float(spec["a1"]), float(spec["d"]))
    if t == "power":
        return Power(float(spec["c"]), float(spec["p"]))
    if t == "geometric":
        return Geometric(float(spec["a1"]), float(spec["q"]))
    if t == "explicit":
        return Explicit(tuple(spec["values"]))
    raise ValueError(f"unknown sequence type {t!r}; expected one of {', '.join(SEQUENCE_TYPES)}")


def first_exponents(seq: ExponentSequence, n: int) -> Sequence[float]:
    return seq.first(n)
