"""Exception hierarchy shared by all fockop modules."""


class FockopError(Exception):
    """Base class for every error raised by fockop."""


class ParameterError(FockopError, ValueError):
    """Invalid parameters (space tuple, quadrature sizes, symbol options)."""


class RangeError(FockopError, OverflowError):
    """A quantity left the representable floating-point range."""


class NumericalError(FockopError, ArithmeticError):
    """Base class for failures of a numerical procedure."""


class NoConvergenceError(NumericalError):
    """A series or iteration did not reach the requested tolerance."""


class DivergenceError(NumericalError):
    """A quadrature produced non-finite values or failed to stabilise."""


class SymbolParseError(FockopError, ValueError):
    """Malformed symbol expression; ``position`` is the 0-based offset."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
