"""Foundation arithmetic: log-scale values, double-double, quadrature, tails."""

from .ddouble import (
    DD,
    back_substitute_dd,
    cholesky_dd,
    cholesky_dd_partial,
    cholesky_float_partial,
    dd_sum,
    forward_substitute_dd,
)
from .diff import log_derivative
from .logscale import LogScaleValue, logsumexp
from .quadrature import DecayHint, integrate_halfline, integrate_halfline_log, integrate_log_u
from .tail import (
    BORDERLINE_BAND,
    Asymptotic,
    Classification,
    DivergenceReport,
    GridSpec,
    Method,
    classify_integral_tail,
    classify_samples,
    fit_exponent,
)

__all__ = [
    "DD", "cholesky_dd", "cholesky_dd_partial", "cholesky_float_partial", "forward_substitute_dd", "back_substitute_dd", "dd_sum",
    "log_derivative", "LogScaleValue", "logsumexp",
    "DecayHint", "integrate_halfline", "integrate_halfline_log", "integrate_log_u",
    "BORDERLINE_BAND", "Asymptotic", "Classification", "DivergenceReport", "GridSpec",
    "Method", "classify_integral_tail", "classify_samples", "fit_exponent",
]
