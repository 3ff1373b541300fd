class GeoComplexityError(ValueError):
    """Base class for all errors raised by this package."""


class EmptyDatasetError(GeoComplexityError):
    def __init__(self, msg: str = "empty dataset"):
        super().__init__(msg)


class DimensionMismatchError(GeoComplexityError):
    def __init__(self, msg: str = "dimension mismatch"):
        super().__init__(msg)


class DegenerateDatasetError(GeoComplexityError):
    """Raised when the total variance is zero, so FVU and PC1 are undefined."""

    def __init__(self, msg: str = "degenerate dataset"):
        super().__init__(msg)


class GraphError(GeoComplexityError):
    """Invalid node id, edge, or grammar application site."""
