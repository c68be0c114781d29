"""Numerical differentiation by Richardson-extrapolated central differences."""

from __future__ import annotations

import math
from typing import Callable

from ..errors import NonFinite, StepUnderflow

_EPS = 2.0 ** -52


def log_derivative(F_log: Callable[[float], float], x: float, scale: float = 0.25,
                   max_halvings: int = 12) -> float:
    """``d/dx F_log(x)`` by Ridders' extrapolation of central differences.

    ``scale`` is the initial half-step; it must keep ``x ± scale`` inside
    the domain of ``F_log``.  The tableau is abandoned as soon as the error
    estimate grows, which happens once rounding noise dominates.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    floor = 1e3 * _EPS * max(1.0, abs(x))
    h = scale
    prev_row: list[float] = []
    best, best_err = math.nan, math.inf
    for _ in range(max_halvings):
        if h < floor:
            if math.isfinite(best):
                return best
            raise StepUnderflow(f"step {h:g} fell below the precision floor {floor:g} at x={x:g}")
        d = (F_log(x + h) - F_log(x - h)) / (2.0 * h)
        if not math.isfinite(d):
            raise NonFinite(f"non-finite difference quotient at x={x!r}, h={h!r}")
        row = [d]
        for j, p in enumerate(prev_row, start=1):
            row.append(row[-1] + (row[-1] - p) / (4.0 ** j - 1.0))
            err = max(abs(row[-1] - row[-2]), abs(row[-1] - p))
            if err < best_err:
                best, best_err = row[-1], err
        if prev_row and abs(row[-1] - prev_row[-1]) > 2.0 * best_err:
            break
        prev_row = row
        h *= 0.5
    if not math.isfinite(best):
        best = prev_row[-1] if prev_row else d
    return best
