"""Gamma-function family on the positive real axis.

``log_gamma`` is assembled from the Binet function ``J`` (Stirling's series
for large arguments, the exact shift recurrence below), so ``J`` itself is
available to full relative precision even where ``log Γ`` is huge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .numerics.quadrature import integrate_halfline_log

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_SERIES_FROM = 10.0

# B_2, B_4, ..., B_24
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
    Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
    Fraction(-174611, 330), Fraction(854513, 138), Fraction(-236364091, 2730),
]
_BINET_COEFFS = [float(b / ((2 * k) * (2 * k - 1))) for k, b in enumerate(_BERNOULLI, start=1)]
_DIGAMMA_COEFFS = [float(b / (2 * k)) for k, b in enumerate(_BERNOULLI, start=1)]


def _check_positive(x: float, name: str) -> float:
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise DomainError(f"{name} requires a finite x > 0, got {x!r}")
    return x


def binet_J(x: float) -> float:
    """Binet function ``J(x) = log Γ(x) - (x - 1/2) log x + x - log(2π)/2``."""
    x = _check_positive(x, "binet_J")
    shift = 0.0
    # J(x) = J(x+1) + (x + 1/2) log(1 + 1/x) - 1
    while x < _SERIES_FROM:
        shift += (x + 0.5) * math.log1p(1.0 / x) - 1.0
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    for c in reversed(_BINET_COEFFS):
        acc = acc * inv2 + c
    return shift + acc * inv


def log_gamma(x: float) -> float:
    """Natural log of Γ(x) for x > 0."""
    x = _check_positive(x, "log_gamma")
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + binet_J(x)


def digamma(x: float) -> float:
    """Logarithmic derivative Γ'/Γ(x) for x > 0."""
    x = _check_positive(x, "digamma")
    shift = 0.0
    while x < _SERIES_FROM:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    acc = 0.0
    for c in reversed(_DIGAMMA_COEFFS):
        acc = acc * inv2 + c
    return shift + math.log(x) - 0.5 / x - acc * inv2


def gamma_remainder_I(z: float) -> float:
    """``I(z) = 2 ∫_0^∞ t / ((t² + z²)(e^{2πt} - 1)) dt`` by quadrature."""
    z = _check_positive(z, "gamma_remainder_I")
    two_pi = 2.0 * math.pi

    def log_integrand(t):
        t = np.asarray(t, dtype=float)
        a = two_pi * t
        # log(e^a - 1), split to stay accurate at both ends
        log_em1 = np.where(a > 30.0, a + np.log1p(-np.exp(-np.minimum(a, 700.0))),
                           np.log(np.expm1(np.minimum(a, 30.0))))
        return np.log(t) - np.log(t * t + z * z) - log_em1

    return 2.0 * float(integrate_halfline_log(log_integrand))


@dataclass(frozen=True)
class StirlingEnvelopeParams:
    """Parameters ``(D, alpha)`` of the weight ``exp(-D t**alpha)``."""

    D: float
    alpha: float
    C: float = field(init=False)
    C_exceeds_one: bool = field(init=False)

    def __post_init__(self):
        if not (self.D > 0 and self.alpha > 0):
            raise DomainError("Stirling envelope needs D > 0 and alpha > 0")
        a, D = self.alpha, self.D
        c = math.sqrt(2 * D * math.e * a) / (math.exp(a * a / 12) * (2 * math.pi / a) ** (a / 4))
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "C_exceeds_one", c > 1)

    @property
    def limit(self) -> float:
        """``lim_{x→∞} b(D, alpha, x) = D e alpha``."""
        return self.D * math.e * self.alpha


def log_stirling_envelope_b(params: StirlingEnvelopeParams, x: float) -> float:
    x = float(x)
    if not x > 0:
        raise DomainError(f"stirling envelope needs x > 0, got {x!r}")
    D, a = params.D, params.alpha
    y = 2 * x + 1
    log_lead = math.log(2 * D * math.e * a * x / y)
    log_inner = (math.log(2 * D * math.e * a / y) + 0.5 * a * math.log(a * y / (2 * math.pi))
                 - a * a / (12 * y))
    return log_lead + log_inner / (2 * x)


def stirling_envelope_b(params: StirlingEnvelopeParams, x: float) -> float:
    """Lower bound ``b(D, alpha, x)`` for ``x / φ(x)**alpha`` of ``w = exp(-D t**alpha)``."""
    return math.exp(log_stirling_envelope_b(params, x))
