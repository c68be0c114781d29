"""Signed numbers stored as (sign, natural-log magnitude)."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class LogScaleValue:
    """A real number ``sign * exp(log_mag)``.

    ``sign`` is one of -1, 0, +1.  For ``sign == 0`` the magnitude is
    ``-inf`` by convention.  Quantities like Gamma(20001) or
    ``K(2**40)`` are representable because only the logarithm is stored.
    """

    sign: int
    log_mag: float = -math.inf

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign == 0:
            object.__setattr__(self, "log_mag", -math.inf)
        elif math.isnan(self.log_mag):
            raise ValueError("log_mag is NaN")
        elif self.log_mag == -math.inf:
            object.__setattr__(self, "sign", 0)

    @classmethod
    def from_float(cls, x: float) -> LogScaleValue:
        if math.isnan(x):
            raise ValueError("cannot encode NaN")
        if x == 0.0:
            return cls(0)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, log_mag: float, sign: int = 1) -> LogScaleValue:
        return cls(sign, log_mag)

    @classmethod
    def zero(cls) -> LogScaleValue:
        return cls(0)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_mag)
        except OverflowError:
            return self.sign * math.inf

    def log(self) -> float:
        """Natural log of a positive value."""
        if self.sign <= 0:
            raise ValueError("log of a non-positive LogScaleValue")
        return self.log_mag

    def __neg__(self) -> LogScaleValue:
        return LogScaleValue(-self.sign, self.log_mag)

    def __abs__(self) -> LogScaleValue:
        return LogScaleValue(abs(self.sign), self.log_mag)

    def __mul__(self, other) -> LogScaleValue:
        other = _coerce(other)
        s = self.sign * other.sign
        if s == 0:
            return LogScaleValue(0)
        return LogScaleValue(s, self.log_mag + other.log_mag)

    __rmul__ = __mul__

    def __truediv__(self, other) -> LogScaleValue:
        other = _coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScaleValue")
        if self.sign == 0:
            return LogScaleValue(0)
        return LogScaleValue(self.sign * other.sign, self.log_mag - other.log_mag)

    def __pow__(self, p: float) -> LogScaleValue:
        if self.sign < 0:
            raise ValueError("real power of a negative LogScaleValue")
        if self.sign == 0:
            return LogScaleValue(0) if p > 0 else LogScaleValue(1, 0.0 if p == 0 else math.inf)
        return LogScaleValue(1, p * self.log_mag)

    def __add__(self, other) -> LogScaleValue:
        other = _coerce(other)
        if other.sign == 0:
            return self
        if self.sign == 0:
            return other
        big, small = (self, other) if self.log_mag >= other.log_mag else (other, self)
        ratio = math.exp(small.log_mag - big.log_mag)
        if big.sign == small.sign:
            return LogScaleValue(big.sign, big.log_mag + math.log1p(ratio))
        if ratio == 1.0:
            return LogScaleValue(0)
        return LogScaleValue(big.sign, big.log_mag + math.log1p(-ratio))

    __radd__ = __add__

    def __sub__(self, other) -> LogScaleValue:
        return self + (-_coerce(other))

    def __rsub__(self, other) -> LogScaleValue:
        return _coerce(other) - self

    def _key(self):
        return (self.sign, self.sign * self.log_mag) if self.sign else (0, 0.0)

    def __lt__(self, other) -> bool:
        return self._key() < _coerce(other)._key()

    def __le__(self, other) -> bool:
        return self._key() <= _coerce(other)._key()

    def __gt__(self, other) -> bool:
        return self._key() > _coerce(other)._key()

    def __ge__(self, other) -> bool:
        return self._key() >= _coerce(other)._key()

    def to_dict(self) -> dict:
        return {"sign": self.sign, "log_mag": None if self.sign == 0 else self.log_mag}

    @classmethod
    def from_dict(cls, d: dict) -> LogScaleValue:
        return cls(d["sign"]) if d["sign"] == 0 else cls(d["sign"], d["log_mag"])


def _coerce(x) -> LogScaleValue:
    if isinstance(x, LogScaleValue):
        return x
    return LogScaleValue.from_float(float(x))


def logsumexp(values) -> LogScaleValue:
    """Sum of positive log-scale values with a single pivot (compensated)."""
    logs = [v.log_mag for v in values if v.sign != 0]
    if any(v.sign < 0 for v in values):
        raise ValueError("logsumexp expects non-negative values")
    if not logs:
        return LogScaleValue(0)
    pivot = max(logs)
    return LogScaleValue(1, pivot + math.log(math.fsum(math.exp(l - pivot) for l in logs)))
