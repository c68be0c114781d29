"""Half-line quadrature in log-scale.

Everything is integrated in the variable ``u = log t``.  The substitution
maps ``(0, inf)`` onto the whole line, turns the algebraic endpoint
behaviour ``t**s`` (``s > -1``) into an exponentially decaying left tail and
an ``exp(-D t**alpha)`` factor into a double-exponentially decaying right
tail.  On such integrands the trapezoidal rule converges geometrically, so
step halving with a successive-difference test is both cheap and reliable.

The integrand is handled through its logarithm, with the peak value
factored out, so moments such as ``K(2**40)`` never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import NoConvergence, NonFinite
from .logscale import LogScaleValue

#: depth below the peak (in natural-log units) treated as negligible
_CUT = 80.0
_SCAN_STEP = 0.25
_SCAN_HALF_WIDTH = 50.0
_MAX_EXTENT = 1e6


@dataclass(frozen=True)
class DecayHint:
    """Integrand (or weight) decays at least like ``exp(-rate * t**power)``."""

    rate: float
    power: float

    def __post_init__(self):
        if not (self.rate > 0 and self.power > 0):
            raise ValueError("decay hint needs rate > 0 and power > 0")


def _as_vectorized(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def call(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        try:
            out = np.asarray(fn(u), dtype=float)
            if out.shape == u.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(fn(float(v))) for v in u.ravel()]).reshape(u.shape)

    return call


def _checked(L: Callable, u: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        vals = L(u)
    if np.isnan(vals).any() or np.isposinf(vals).any():
        bad = u[np.isnan(vals) | np.isposinf(vals)][0]
        raise NonFinite(f"integrand is not finite at node u={bad!r} (t={math.exp(min(bad, 709.0))!r})")
    return vals


def _locate_peak(L, lo: float, hi: float):
    a = lo if math.isfinite(lo) else -_SCAN_HALF_WIDTH
    b = hi if math.isfinite(hi) else _SCAN_HALF_WIDTH
    if a >= b:
        a, b = (b - 2 * _SCAN_HALF_WIDTH, b) if not math.isfinite(lo) else (a, a + 2 * _SCAN_HALF_WIDTH)
    grid = np.linspace(a, b, max(9, int((b - a) / _SCAN_STEP) + 1))
    vals = _checked(L, grid)
    best = float(vals.max())

    # push the scan outwards on open sides until the integrand is negligible
    def extend(edge: float, direction: float) -> tuple[float, float]:
        nonlocal best
        step = 1.0
        u = edge
        val = float(_checked(L, np.array([u]))[0])
        while val > best - _CUT:
            u += direction * step
            if abs(u) > _MAX_EXTENT:
                raise NoConvergence("integrand does not decay: tail integral diverges or decays too slowly")
            # tail past a finite bound is outside the domain
            if direction > 0 and u >= hi:
                u = hi
                val = float(_checked(L, np.array([u]))[0])
                best = max(best, val)
                break
            if direction < 0 and u <= lo:
                u = lo
                val = float(_checked(L, np.array([u]))[0])
                best = max(best, val)
                break
            val = float(_checked(L, np.array([u]))[0])
            best = max(best, val)
            step *= 1.6
        return u, val

    right = b
    left = a
    if not math.isfinite(hi):
        right, _ = extend(b, +1.0)
    if not math.isfinite(lo):
        left, _ = extend(a, -1.0)
    if best == -math.inf:
        return None
    # rescan the (possibly extended) range to find the global maximum
    if right - left > b - a + 1e-12:
        grid = np.linspace(left, right, max(9, int((right - left) / _SCAN_STEP) + 1))
        vals = _checked(L, grid)
    k = int(np.argmax(vals))
    ua, ub = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(lambda v: -float(_checked(L, np.array([v]))[0]), bounds=(ua, ub),
                          method="bounded", options={"xatol": 1e-12 * max(1.0, abs(grid[k]))})
    u_star = float(res.x) if -res.fun >= vals[k] else float(grid[k])
    l_star = max(float(-res.fun), float(vals[k]))
    return u_star, l_star, left, right


def _edge(L, u_star: float, l_star: float, bound: float, direction: float) -> float:
    """Point beyond which the integrand is below ``l_star - _CUT``."""
    step = 1e-9 * max(1.0, abs(u_star))
    inner = u_star
    while True:
        u = u_star + direction * step
        if (direction > 0 and u >= bound) or (direction < 0 and u <= bound):
            return bound
        if float(_checked(L, np.array([u]))[0]) < l_star - _CUT:
            outer = u
            break
        inner = u
        step *= 2.0
        if step > 2 * _MAX_EXTENT:
            raise NoConvergence("integrand does not decay away from its peak")
    for _ in range(60):
        mid = 0.5 * (inner + outer)
        if float(_checked(L, np.array([mid]))[0]) < l_star - _CUT:
            outer = mid
        else:
            inner = mid
    return outer


def integrate_log_u(
    log_f: Callable,
    lo: float = -math.inf,
    hi: float = math.inf,
    rtol: float = 1e-12,
    max_level: int = 17,
) -> LogScaleValue:
    """``∫ exp(log_f(u)) du`` over ``(lo, hi)`` as a :class:`LogScaleValue`.

    ``log_f`` should accept numpy arrays; scalar-only callables are
    vectorized automatically.
    """
    L = _as_vectorized(log_f)
    located = _locate_peak(L, lo, hi)
    if located is None:
        return LogScaleValue(0)
    u_star, l_star, _, _ = located
    a = _edge(L, u_star, l_star, lo if math.isfinite(lo) else -_MAX_EXTENT, -1.0)
    b = _edge(L, u_star, l_star, hi if math.isfinite(hi) else _MAX_EXTENT, +1.0)
    # Romberg is needed only when a finite bound cuts through non-negligible mass
    cut_open = False
    for bound in (a, b):
        if bound in (lo, hi) and float(_checked(L, np.array([bound]))[0]) > l_star - _CUT:
            cut_open = True
    # the log-integrand is only known to about eps*|log peak|
    tol = max(rtol, 16 * 2.0 ** -52 * max(1.0, abs(l_star)))
    total = _trapezoid_sequence(L, a, b, l_star, tol, max_level, romberg=cut_open)
    if total <= 0:
        return LogScaleValue(0)
    return LogScaleValue(1, l_star + math.log(total))


def _trapezoid_sequence(L, a, b, l_star, rtol, max_level, romberg):
    n = 16
    h = (b - a) / n
    nodes = np.linspace(a, b, n + 1)
    f = np.exp(_checked(L, nodes) - l_star)
    s = math.fsum(f[1:-1]) + 0.5 * (f[0] + f[-1])
    estimates = [h * s]
    table = [[h * s]]
    agreed = 0
    for level in range(1, max_level + 1):
        mids = a + h * (np.arange(n) + 0.5)
        s += math.fsum(np.exp(_checked(L, mids) - l_star))
        n *= 2
        h *= 0.5
        t = h * s
        if romberg:
            row = [t]
            for j, prev in enumerate(table[-1], start=1):
                row.append(row[-1] + (row[-1] - prev) / (4.0 ** j - 1.0))
            table.append(row)
            est, prev_est = row[-1], table[-2][-1]
        else:
            est, prev_est = t, estimates[-1]
        estimates.append(est)
        if abs(est - prev_est) <= rtol * abs(est):
            agreed += 1
            if level >= 4 and agreed >= 2:
                return est
        else:
            agreed = 0
    raise NoConvergence(
        f"trapezoid refinement did not reach rtol={rtol:g} with {n} intervals "
        f"(last change {abs(estimates[-1] - estimates[-2]) / abs(estimates[-1]):.2e})"
    )


def integrate_halfline_log(log_integrand: Callable, rtol: float = 1e-12, max_level: int = 17) -> LogScaleValue:
    """``∫_0^∞ exp(log_integrand(t)) dt`` for a log-integrand given in ``t``."""
    Lt = _as_vectorized(log_integrand)

    def log_f(u):
        return u + Lt(np.exp(u))

    return integrate_log_u(log_f, rtol=rtol, max_level=max_level)


def integrate_halfline(
    integrand: Callable,
    decay_hint: Optional[DecayHint] = None,
    rtol: float = 1e-12,
    max_level: int = 17,
) -> LogScaleValue:
    """``∫_0^∞ integrand(t) dt`` for a non-negative integrand.

    ``decay_hint`` documents the tail; the log-variable scan finds the tail
    on its own, so the hint only has to be correct, not tight.
    """
    f = _as_vectorized(integrand)

    def log_f(u):
        with np.errstate(divide="ignore"):
            vals = f(np.exp(u))
        if (vals < 0).any():
            raise ValueError("integrand must be non-negative")
        with np.errstate(divide="ignore"):
            return u + np.log(vals)

    return integrate_log_u(log_f, rtol=rtol, max_level=max_level)
