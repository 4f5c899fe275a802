"""Exception types shared across the library."""


class SBetasError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SBetasError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(SBetasError, ValueError):
    """Array arguments have inconsistent or unexpected shapes."""


class DataError(SBetasError, ValueError):
    """Input data violates the simplex contract or a file is malformed."""


class ConfigError(SBetasError, ValueError):
    """A configuration value is missing, unknown, or out of range."""


class DegenerateDataError(SBetasError, ValueError):
    """An estimator received data from which no valid parameters follow."""


class ConvergenceError(SBetasError, RuntimeError):
    """An iterative solver stopped without reaching its tolerance.

    Carries the final residual and the last iterate so callers can decide
    whether to surface the failure or fall back.
    """

    def __init__(self, message, residual=None, last_iterate=None):
        super().__init__(message)
        self.residual = residual
        self.last_iterate = last_iterate


class AssignmentError(SBetasError, RuntimeError):
    """A point could not be scored against any cluster."""
