"""Exception hierarchy shared by every module in the package."""


class MSRError(Exception):
    """Base class for all errors raised by msrcode."""


class ParameterError(MSRError, ValueError):
    """Invalid (n, k, d) or field parameters."""


class UnsupportedParameters(ParameterError):
    """Parameters that are valid in principle but outside what the construction covers."""


class UnrecoverableError(MSRError):
    """Too many erasures, or too few helpers, to recover the requested data."""


class SingularMatrixError(MSRError, ArithmeticError):
    """Raised by the linear solver when elimination finds no pivot.

    ``column`` is the index of the column that had no nonzero pivot.
    """

    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"singular matrix: no pivot in column {column}")


class ConstructionError(MSRError, AssertionError):
    """An internal invariant of the code construction was violated."""


class ShardFormatError(MSRError):
    """Malformed, inconsistent or corrupted shard file."""
