"""Trend-cycle extraction for monthly series.

Linear moving averages (Henderson, Musgrave, cascade filters), robust
moving averages built from declared shocks, robust windowed estimators,
small-sample confidence intervals for linear smoothers, and a real-time
vintage evaluation toolkit.
"""

from .errors import (
    ConfigError,
    DataError,
    DegenerateFilterError,
    DegenerateSeriesError,
    InvalidArgumentError,
    InvalidSpecError,
    NumericalError,
    NumericalRankError,
    TooManyOutliersError,
    TrendCycleError,
)
from .filters import (
    FilterSet,
    MmsreSpec,
    MovingAverage,
    apply_filter_set,
    clf_filter_set,
    cut_and_normalize,
    henderson_kernel,
    icr,
    local_poly_filter,
    mmsre_asym_filter,
    musgrave_filter_set,
    musgrave_slope_ratio,
    preserves_polynomial,
    select_henderson_length,
    x11_musgrave_ratio,
)
from .outliers import OutlierKind, OutlierSpec, load_outlier_specs
from .robust import (
    RobustFilterPlan,
    robust_apply,
    robust_asym_filter,
    robust_symmetric_filter,
)
from .series import Month, TimeSeries, TrendEstimate

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateFilterError",
    "DegenerateSeriesError",
    "FilterSet",
    "InvalidArgumentError",
    "InvalidSpecError",
    "MmsreSpec",
    "Month",
    "MovingAverage",
    "NumericalError",
    "NumericalRankError",
    "OutlierKind",
    "OutlierSpec",
    "RobustFilterPlan",
    "TimeSeries",
    "TooManyOutliersError",
    "TrendCycleError",
    "TrendEstimate",
    "apply_filter_set",
    "clf_filter_set",
    "cut_and_normalize",
    "henderson_kernel",
    "icr",
    "load_outlier_specs",
    "local_poly_filter",
    "mmsre_asym_filter",
    "musgrave_filter_set",
    "musgrave_slope_ratio",
    "preserves_polynomial",
    "robust_apply",
    "robust_asym_filter",
    "robust_symmetric_filter",
    "select_henderson_length",
    "x11_musgrave_ratio",
]
