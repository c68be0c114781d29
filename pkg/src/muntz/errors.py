"""Exception hierarchy shared by all modules."""


class MuntzError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MuntzError, ValueError):
    """Argument outside the mathematical domain of a function."""


class NonFinite(MuntzError, ArithmeticError):
    """An integrand or objective returned NaN or an infinity."""


class NoConvergence(MuntzError, ArithmeticError):
    """Adaptive refinement stalled before reaching the tolerance."""


class StepUnderflow(MuntzError, ArithmeticError):
    """Finite-difference step fell below the precision floor."""


class EvaluationFailed(MuntzError):
    """A tabulated function could not be evaluated at a grid point."""


class MomentDiverges(DomainError):
    """The moment integral K(x) is infinite for the requested x."""


class NotAdmissible(MuntzError):
    """Weight fails one of the admissibility conditions."""


class TailBoundFail(MuntzError):
    """Infinite product truncation cannot meet the requested tolerance."""

    def __init__(self, message, required_cutoff=None):
        super().__init__(message)
        self.required_cutoff = required_cutoff


class GridViolation(MuntzError, ValueError):
    """A grid point lies inside an excluded region."""


class PrecisionError(MuntzError, ArithmeticError):
    """Working precision was exhausted; results would be meaningless."""


class FactorizationFail(PrecisionError):
    """Cholesky factorization lost positive definiteness at pivot ``k``."""

    def __init__(self, k, message=None):
        super().__init__(message or f"factorization lost positive definiteness at pivot {k}")
        self.k = k


class MomentMatrixSingular(FactorizationFail):
    """Hankel moment matrix is numerically singular."""


class NegativeRadicand(PrecisionError):
    """Projection residual is negative beyond rounding tolerance."""


class SpecError(MuntzError, ValueError):
    """Job description failed validation.

    ``errors`` is a list of ``(json_pointer, message)`` pairs.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{p or '/'}: {m}" for p, m in self.errors))
