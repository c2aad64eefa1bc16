"""Exception and warning types shared across the package."""


class DagcraftError(Exception):
    """Base class for all errors raised by this package."""


class CycleError(DagcraftError):
    """Adding an edge would create a directed cycle."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("edge would create cycle: " + " -> ".join(self.cycle))


class UnknownNodeError(DagcraftError):
    pass


class DuplicateEdgeError(DagcraftError):
    pass


class UnknownEdgeError(DagcraftError):
    pass


class OutOfRangeError(DagcraftError):
    pass


class ParseError(DagcraftError):
    """Malformed CSV input; carries 1-based row/column location when known."""

    def __init__(self, message, row=None, col=None):
        self.row = row
        self.col = col
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", col {col})" if col is not None else ")")
        super().__init__(message + loc)


class MissingColumnError(DagcraftError):
    pass


class NonNumericCellError(ParseError):
    pass


class InsufficientRowsError(DagcraftError):
    pass


class SingularDesignError(DagcraftError):
    """The design matrix for one equation is rank deficient.

    Carries the offending child node so the caller can point the
    conversation at the collinear parents instead of silently dropping one.
    """

    def __init__(self, child, message=None):
        self.child = child
        super().__init__(message or f"rank-deficient design for equation of {child!r}")


class SingularSampleCovError(DagcraftError):
    pass


class MissingRawPError(DagcraftError):
    pass


class DegenerateColumnWarning(UserWarning):
    """A column has zero variance; pairs involving it are excluded."""


class SmallResampleWarning(UserWarning):
    """Resampling replicate count is too low for stable p-values."""
