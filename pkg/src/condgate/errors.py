"""Exception hierarchy.

Every error raised for bad user input derives from :class:`ValidationError`;
errors caused by a problem that is too large to evaluate derive from
:class:`CostGuardError`. The CLI maps the first family to exit code 1 and the
second to exit code 2.
"""


class CondGateError(Exception):
    """Base class for all package errors."""


class ValidationError(CondGateError, ValueError):
    """Input violates a documented precondition."""


class NotHermitianError(ValidationError):
    pass


class NotUnitaryError(ValidationError):
    pass


class ModeIndexError(ValidationError):
    """A mode index is out of range or two indices that must differ coincide."""


class DimensionMismatchError(ValidationError):
    pass


class PatternError(ValidationError):
    """An ancilla pattern does not match the mode partition."""


class CircuitSyntaxError(ValidationError):
    """The circuit document is not well-formed JSON."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class CircuitSchemaError(ValidationError):
    """The circuit document is valid JSON but has the wrong structure."""


class UnknownElementError(ValidationError):
    pass


class SingularParameterizationError(ValidationError):
    """The factored normal form does not exist for the given network."""


class UnsupportedPatternError(ValidationError):
    pass


class CostGuardError(CondGateError):
    """The requested computation exceeds a configured size limit."""

    def __init__(self, message, size=None, limit=None):
        super().__init__(message)
        self.size = size
        self.limit = limit
