"""Exception hierarchy shared by all gbspec modules."""


class GbspecError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(GbspecError, ValueError):
    """An argument is outside the documented domain of an operation."""


class ConstraintError(GbspecError, ValueError):
    """A section-space feasibility constraint is violated (e.g. trigonometric
    phase too large for the interval width)."""


class ValidationError(GbspecError, ValueError):
    """Input data (problem coefficients, geometry maps, config files) failed
    a validation check."""


class NumericalError(GbspecError, RuntimeError):
    """A numerical routine failed to converge or produced unusable output."""


class ExprError(GbspecError, ValueError):
    """Expression parsing or evaluation failure.

    ``position`` is the byte offset into the source string when the error was
    detected while parsing, or ``None`` for evaluation-time errors.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position
