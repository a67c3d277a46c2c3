"""Exception types raised by snwit."""


class SnwitError(ValueError):
    """Base class for all parameter and input errors."""


class InvalidDimensionError(SnwitError):
    pass


class IncompatibleParametersError(SnwitError):
    pass


class OutOfRangeError(SnwitError):
    pass


class NonPositiveElementError(SnwitError):
    """Raised when some E = I/M + tH has a negative eigenvalue."""

    def __init__(self, message, worst_eigenvalue):
        super().__init__(message)
        self.worst_eigenvalue = worst_eigenvalue


class DegenerateError(SnwitError):
    pass


class DomainError(SnwitError):
    pass


class InvalidKError(SnwitError):
    pass


class DimensionMismatchError(SnwitError):
    pass


class UnsupportedError(SnwitError):
    pass


class NotAStateError(SnwitError):
    pass


class ResolutionError(SnwitError):
    """Grid too coarse to resolve the conditional width."""
