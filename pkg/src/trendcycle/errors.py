"""Exception hierarchy shared across the package."""


class TrendCycleError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(TrendCycleError, ValueError):
    """An argument violates a documented precondition."""


class DataError(TrendCycleError, ValueError):
    """Malformed input data (CSV content, dates, gaps)."""


class ConfigError(TrendCycleError, ValueError):
    """Malformed configuration (coefficient tables, JSON specs)."""


class NumericalError(TrendCycleError, ArithmeticError):
    """A numerical computation failed (rank deficiency, singular system)."""


class NumericalRankError(NumericalError):
    """A design or KKT matrix is numerically rank deficient."""


class InvalidSpecError(NumericalError):
    """An asymmetric-filter specification leads to an unsolvable system."""


class DegenerateSeriesError(NumericalError):
    """A series statistic is undefined (e.g. zero denominator in a ratio)."""


class DegenerateFilterError(NumericalError):
    """A filter operation produced an unusable weight sequence."""


class TooManyOutliersError(NumericalError):
    """Outlier regressors exhaust the degrees of freedom of a window."""
