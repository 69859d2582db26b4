"""Exception types raised on invalid inputs.

Every validation failure derives from :class:`ValidationError` so callers
(the CLI in particular) can separate bad input from internal faults.
"""


class ValidationError(ValueError):
    """Input violates a documented constraint."""


class DimensionError(ValidationError):
    pass


class NotHermitianError(ValidationError):
    pass


class NotPsdError(ValidationError):
    pass


class NotAStateError(ValidationError):
    pass


class InvalidPovmError(ValidationError):
    pass


class ConditioningError(ValidationError):
    """Conditioning on an outcome whose probability is (numerically) zero."""


class CounterexampleError(AssertionError):
    """A randomized property check found a violating sample."""

    def __init__(self, message: str, dump: dict):
        super().__init__(message)
        self.dump = dump
