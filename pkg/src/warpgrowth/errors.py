"""Exception types raised across the warpgrowth package."""


class WarpGrowthError(Exception):
    """Base class for all warpgrowth-specific errors."""


class GridError(WarpGrowthError):
    """Time grid is malformed: non-consecutive months, empty window, too few points."""


class SchemaError(WarpGrowthError):
    """Input file violates the expected schema (header, duplicate names)."""


class EmptyPanelError(WarpGrowthError):
    """An operation left the panel with no usable series."""


class MissingDataError(WarpGrowthError):
    """Missing values inside a window where complete data is required."""


class WindowError(WarpGrowthError):
    """Requested fit window is too short or no admissible window exists."""


class RateError(WarpGrowthError):
    """Growth rate is outside its valid domain (alpha must be positive)."""


class EmptySampleError(WarpGrowthError):
    """A sample statistic was requested on an empty sample."""


class SampleSizeError(WarpGrowthError):
    """Sample too small for the requested estimator (covariance needs n >= 2)."""


class NumericalError(WarpGrowthError):
    """A numerical routine received input outside its tolerance (e.g. asymmetry)."""


class DegenerateRegressorError(WarpGrowthError):
    """Regressor has zero variance; the regression line is undefined."""


class ConfigError(WarpGrowthError):
    """Configuration is inconsistent (e.g. simulation truth incompatible with cap)."""
