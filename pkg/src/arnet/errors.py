"""Exception hierarchy.

Every error raised by the library derives from :class:`ArnetError`.  The two
intermediate classes decide the CLI exit code: :class:`DataError` maps to 2 and
:class:`NumericalError` to 3.
"""


class ArnetError(ValueError):
    """Base class for all library errors."""


class DataError(ArnetError):
    """Input data or arguments violate a documented precondition."""


class NumericalError(ArnetError):
    """A quantity is undefined or infeasible for the given values."""


class InvalidDimension(DataError):
    pass


class InvalidParameters(DataError):
    pass


class InvalidEdge(DataError):
    pass


class InvalidQ(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class InsufficientData(DataError):
    pass


class WindowTooShort(DataError):
    pass


class EmptyCommunity(DataError):
    pass


class IncompleteField(DataError):
    pass


class ParseError(DataError):
    """Malformed series file.  ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class MalformedHeader(ParseError):
    pass


class MalformedLine(ParseError):
    pass


class IndexOutOfRange(ParseError):
    pass


class DuplicateEdge(ParseError):
    pass


class DiagonalEdge(ParseError):
    pass


class NonCanonicalEdge(ParseError):
    """An undirected edge written as ``i j`` with ``i > j``."""


class DegenerateEdge(NumericalError):
    pass


class VarianceUndefined(NumericalError):
    pass


class CIUndefined(NumericalError):
    pass


class CategoryDegenerate(NumericalError):
    pass


class AllEdgesDegenerate(NumericalError):
    pass


class ZeroDegree(NumericalError):
    pass


class InfeasibleParameters(NumericalError):
    pass
