"""Exception hierarchy shared across the package.

CLI exit codes: ValidationError/ParseError -> 2, NumericalError -> 3,
OSError -> 4.
"""


class TailclustError(Exception):
    """Base class for all package errors."""


class ValidationError(TailclustError):
    """Input violates a documented precondition or invariant."""


class ParseError(ValidationError):
    """A file could not be parsed; message carries the offending line."""


class NumericalError(TailclustError):
    """A numerical procedure failed (singularity, no exceedances, ...)."""


class SingularityError(NumericalError):
    """A block matrix stayed singular after the maximum ridge.

    Carries the condition report of the failed solve.
    """

    def __init__(self, message, condition_report=None):
        super().__init__(message)
        self.condition_report = condition_report
