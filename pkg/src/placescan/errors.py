"""Exception hierarchy shared across the package."""


class PlaceScanError(Exception):
    """Base class for all package errors."""


class DimensionError(PlaceScanError):
    """A vector or scan has the wrong number of entries."""


class UnknownLabelError(PlaceScanError):
    """A label string or index does not name one of the four classes."""


class SchemaError(PlaceScanError):
    """A CSV header does not match the canonical schema."""


class RowError(PlaceScanError):
    """A CSV data row failed to parse; carries a 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyDatasetError(PlaceScanError):
    """A dataset with zero rows was constructed or requested."""


class InvalidPoseError(PlaceScanError):
    """A sensor pose lies outside the scene's free space."""


class InsufficientDataError(PlaceScanError):
    """Too few rows to fit the requested estimator."""


class DegenerateFeatureError(PlaceScanError):
    """A feature column is constant; the power-transform exponent is undefined."""


class DegenerateTrainingError(PlaceScanError):
    """Training data contains fewer than two distinct classes."""


class StratificationError(PlaceScanError):
    """A class has fewer members than the requested number of folds."""


class UndefinedCurveError(PlaceScanError):
    """A precision-recall curve was requested for a class with no positives."""
