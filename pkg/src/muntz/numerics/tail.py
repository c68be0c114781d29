"""Convergence classification of ``∫_1^∞ g(r) / r**2 dr``."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import EvaluationFailed
from .logscale import LogScaleValue

#: fitted exponents closer than this to 1 are not decided numerically
BORDERLINE_BAND = 0.05


class Classification(str, enum.Enum):
    DIVERGENT = "Divergent"
    CONVERGENT = "Convergent"
    BORDERLINE = "Borderline"


class Method(str, enum.Enum):
    EXACT = "ExactAsymptotic"
    NUMERIC = "NumericFit"


@dataclass(frozen=True)
class GridSpec:
    """Geometric grid ``r_j = base**j`` for ``j = j_min..j_max``."""

    j_min: int = 0
    j_max: int = 40
    base: float = 2.0

    def points(self) -> list[float]:
        return [self.base ** j for j in range(self.j_min, self.j_max + 1)]


@dataclass(frozen=True)
class Asymptotic:
    """``g(r) = r**power * (log r)**log_power * (factor bounded above and below)``."""

    power: float
    log_power: float = 0.0

    def classify(self) -> Classification:
        if self.power > 1 or (self.power == 1 and self.log_power >= -1):
            return Classification.DIVERGENT
        return Classification.CONVERGENT


@dataclass
class DivergenceReport:
    classification: Classification
    exponent_estimate: float
    method: Method
    samples: list = field(default_factory=list)
    log_exponent: float = 0.0
    fitted_exponent: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "exponent_estimate": self.exponent_estimate,
            "log_exponent": self.log_exponent,
            "fitted_exponent": self.fitted_exponent,
            "method": self.method.value,
            "samples": [[r, lg] for r, lg in self.samples],
        }


def fit_exponent(samples) -> float:
    """Least-squares slope of ``log g`` against ``log r`` over the upper half."""
    r = np.array([s[0] for s in samples], dtype=float)
    lg = np.array([s[1] for s in samples], dtype=float)
    half = len(r) // 2
    x, y = np.log(r[half:]), lg[half:]
    if len(x) < 2:
        raise ValueError("need at least four grid points for a slope fit")
    return float(np.polyfit(x, y, 1)[0])


def classify_integral_tail(
    g: Callable[[float], LogScaleValue],
    asymptotic: Optional[Asymptotic] = None,
    grid: GridSpec = GridSpec(),
    band: float = BORDERLINE_BAND,
) -> DivergenceReport:
    """Classify convergence of ``∫_1^∞ g(r)/r**2 dr``.

    With ``asymptotic`` the answer follows from the supplied growth class and
    the samples are kept as evidence; otherwise the slope of ``log g`` versus
    ``log r`` over the upper half of the grid decides, refusing to call
    anything within ``band`` of the critical exponent 1.
    """
    samples = []
    for r in grid.points():
        try:
            v = g(r)
        except Exception as exc:  # noqa: BLE001 - re-raised with context
            raise EvaluationFailed(f"g could not be evaluated at r={r!r}: {exc}") from exc
        if not isinstance(v, LogScaleValue):
            v = LogScaleValue.from_float(float(v))
        if v.sign <= 0 or not math.isfinite(v.log_mag):
            raise EvaluationFailed(f"g(r) must be positive and finite, got {v!r} at r={r!r}")
        samples.append((r, v.log_mag))
    fitted = fit_exponent(samples)
    if asymptotic is not None:
        return DivergenceReport(asymptotic.classify(), asymptotic.power, Method.EXACT, samples,
                                log_exponent=asymptotic.log_power, fitted_exponent=fitted)
    if abs(fitted - 1.0) < band:
        cls = Classification.BORDERLINE
    elif fitted > 1.0:
        cls = Classification.DIVERGENT
    else:
        cls = Classification.CONVERGENT
    return DivergenceReport(cls, fitted, Method.NUMERIC, samples, fitted_exponent=fitted)


def classify_samples(samples, asymptotic: Optional[Asymptotic] = None,
                     band: float = BORDERLINE_BAND) -> DivergenceReport:
    """Same as :func:`classify_integral_tail` for pre-computed ``(r, log g)`` pairs."""
    table = dict(samples)
    grid_r = [s[0] for s in samples]

    def g(r):
        return LogScaleValue(1, table[r])

    j = [round(math.log2(r)) for r in grid_r]
    grid = GridSpec(j[0], j[-1])
    if grid.points() != grid_r:
        raise ValueError("samples must lie on a base-2 geometric grid")
    return classify_integral_tail(g, asymptotic, grid, band)
