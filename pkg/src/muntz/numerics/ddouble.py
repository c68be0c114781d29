"""Double-double ("two-word") arithmetic and the dense kernels built on it.

A double-double is an unevaluated sum ``hi + lo`` of two floats with
``|lo| <= ulp(hi)/2``, giving roughly 106 bits of significand.  The error-free
transformations are the classical ones of Knuth (two-sum) and Dekker
(splitting product); no FMA is assumed.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ..errors import FactorizationFail

_SPLITTER = 134217729.0  # 2**27 + 1

EPS = 2.0 ** -104


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a: float, b: float):
    s = a + b
    return s, b - (s - a)


def _split(a: float):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


class DD:
    """Immutable double-double number."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi: float, lo: float = 0.0):
        self.hi = float(hi)
        self.lo = float(lo)

    @classmethod
    def from_mpf(cls, x) -> DD:
        hi = float(x)
        return cls(hi, float(x - hi))

    @classmethod
    def from_fraction(cls, q) -> DD:
        hi = float(q)
        return cls(hi, float(q - type(q)(hi)))

    def __float__(self) -> float:
        return self.hi + self.lo

    def __repr__(self) -> str:
        return f"DD({self.hi!r}, {self.lo!r})"

    def __neg__(self) -> DD:
        return DD(-self.hi, -self.lo)

    def __abs__(self) -> DD:
        return -self if self.hi < 0 else self

    def __add__(self, other) -> DD:
        if not isinstance(other, DD):
            s, e = _two_sum(self.hi, float(other))
            e += self.lo
            return DD(*_quick_two_sum(s, e))
        s, e = _two_sum(self.hi, other.hi)
        t, f = _two_sum(self.lo, other.lo)
        e += t
        s, e = _quick_two_sum(s, e)
        e += f
        return DD(*_quick_two_sum(s, e))

    __radd__ = __add__

    def __sub__(self, other) -> DD:
        return self + (-other if isinstance(other, DD) else -float(other))

    def __rsub__(self, other) -> DD:
        return (-self) + other

    def __mul__(self, other) -> DD:
        if not isinstance(other, DD):
            b = float(other)
            p, e = _two_prod(self.hi, b)
            e += self.lo * b
            return DD(*_quick_two_sum(p, e))
        p, e = _two_prod(self.hi, other.hi)
        e += self.hi * other.lo + self.lo * other.hi
        return DD(*_quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other) -> DD:
        if not isinstance(other, DD):
            other = DD(float(other))
        q1 = self.hi / other.hi
        r = self - other * q1
        q2 = r.hi / other.hi
        r = r - other * q2
        q3 = r.hi / other.hi
        q1, q2 = _quick_two_sum(q1, q2)
        return DD(q1, q2) + q3

    def __rtruediv__(self, other) -> DD:
        return DD(float(other)) / self

    def sqrt(self) -> DD:
        if self.hi < 0:
            raise ValueError("sqrt of negative double-double")
        if self.hi == 0:
            return DD(0.0)
        x = math.sqrt(self.hi)
        # one Newton step on the residual doubles the precision
        p, e = _two_prod(x, x)
        r = (self - DD(p, e)).hi
        return DD(*_quick_two_sum(x, r / (2.0 * x)))

    def _cmp(self, other) -> float:
        d = self - other
        return d.hi

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __eq__(self, other) -> bool:
        return self._cmp(other) == 0

    __hash__ = None


ZERO = DD(0.0)


def dd_sum(values: Iterable) -> DD:
    """Compensated accumulation of floats or double-doubles."""
    acc = ZERO
    for v in values:
        acc = acc + v
    return acc


def dd_dot(a: Sequence[DD], b: Sequence[DD]) -> DD:
    acc = ZERO
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def cholesky_dd_partial(A: Sequence[Sequence[DD]]):
    """``(L, k)``: lower factor columns before the first non-positive pivot ``k``.

    ``k`` is ``None`` when the factorization completes.  Column ``k - 1``
    is finished, below-diagonal entries included.
    """
    n = len(A)
    L = [[ZERO] * n for _ in range(n)]
    for j in range(n):
        row_j = L[j]
        s = A[j][j] - dd_dot(row_j[:j], row_j[:j])
        if not s.hi > 0:
            return L, j
        ljj = s.sqrt()
        row_j[j] = ljj
        for i in range(j + 1, n):
            row_i = L[i]
            row_i[j] = (A[i][j] - dd_dot(row_i[:j], row_j[:j])) / ljj
    return L, None


def cholesky_dd(A: Sequence[Sequence[DD]]) -> list[list[DD]]:
    """Lower Cholesky factor of a symmetric matrix in double-double.

    Raises :class:`FactorizationFail` with the (0-based) pivot index at
    which a non-positive pivot appears.
    """
    L, k = cholesky_dd_partial(A)
    if k is not None:
        raise FactorizationFail(k)
    return L


def cholesky_float_partial(A: np.ndarray):
    """Double-precision counterpart of :func:`cholesky_dd_partial`."""
    A = np.asarray(A, dtype=float)
    n = len(A)
    L = np.zeros_like(A)
    for j in range(n):
        s = A[j, j] - L[j, :j] @ L[j, :j]
        if not s > 0:
            return L, j
        L[j, j] = math.sqrt(s)
        L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L, None


def forward_substitute_dd(L: Sequence[Sequence[DD]], b: Sequence[DD]) -> list[DD]:
    """Solve ``L y = b`` for lower-triangular ``L``."""
    y: list[DD] = []
    for i, bi in enumerate(b):
        y.append((bi - dd_dot(L[i][:i], y)) / L[i][i])
    return y


def back_substitute_dd(L: Sequence[Sequence[DD]], y: Sequence[DD]) -> list[DD]:
    """Solve ``L^T x = y`` for lower-triangular ``L``."""
    n = len(y)
    x = [ZERO] * n
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for k in range(i + 1, n):
            acc = acc - L[k][i] * x[k]
        x[i] = acc / L[i][i]
    return x
