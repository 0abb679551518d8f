"""Exception hierarchy shared across the toolkit.

Two families matter for callers: ``ValidationError`` means the inputs were
bad (the CLI maps it to exit code 2), ``NumericalError`` means a computation
could not be completed to the requested accuracy (exit code 3).
"""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ToolkitError):
    """Invalid parameters, malformed data, or a violated precondition."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ParameterError(ValidationError):
    """An argument is outside its documented range."""


class DomainError(ValidationError):
    """A point or stencil leaves the region the operation covers."""


class DataError(ValidationError):
    """Inconsistent or malformed payload data."""


class CapacityError(ValidationError):
    """A finite sequence is too short for the requested operation."""

    def __init__(self, message, required_length=None):
        super().__init__(message)
        self.required_length = required_length


class SymbolError(ValidationError):
    """A symbol violates its declared analyticity class."""


class BoundaryZeroError(ValidationError):
    """A zero sits on the unit circle, so no inner-outer split exists."""


class SingularityError(ValidationError):
    """Evaluation requested exactly at a singular point."""


class NumericalError(ToolkitError):
    """A computation ran but could not meet its accuracy contract."""


class ConditioningError(NumericalError):
    """A Gram or normal matrix is too ill-conditioned to invert reliably."""


class AccuracyError(NumericalError):
    """Requested truncation or tolerance cannot be certified."""
