"""Robust windowed estimators of a local trend level.

Six estimators slide over the series: the moving median (med), the
repeated median (rm), least median of squares (lms), least trimmed squares
(lts), least quartile difference (lqd) and deepest regression (dr).  All
model a local line (lms/lts also a local parabola) and return the fitted
level at the window centre.  Window sizes never exceed 23, so every
estimator is computed exactly by enumeration; tie-breaking rules are fixed
to keep results deterministic.

The per-window fitters live in a compiled extension with a NumPy fallback,
selected at import time (see ``_backend``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import InvalidArgumentError
from ..series import TimeSeries, TrendEstimate
from ._backend import available_backends, backend_name, kernels

__all__ = [
    "WindowFit",
    "available_backends",
    "backend_name",
    "default_coverage",
    "dr_window",
    "lms_window",
    "lqd_window",
    "lts_window",
    "med_window",
    "METHODS",
    "regression_depth",
    "rm_window",
    "robust_smooth",
]

METHODS = ("med", "rm", "lms", "lts", "lqd", "dr")


@dataclass(frozen=True)
class WindowFit:
    """A local fit: the level is the trend-cycle estimate at the centre."""

    method: str
    degree: int
    level: float
    slope: float = 0.0
    curvature: float = 0.0
    objective: float | None = None
    npoints: int = 0


def _prepare(values, offsets) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(values, dtype=float)
    if y.ndim != 1:
        raise InvalidArgumentError("window values must be one-dimensional")
    if offsets is None:
        if y.size % 2 == 0:
            raise InvalidArgumentError(
                "offsets are required for windows of even length"
            )
        h = (y.size - 1) // 2
        x = np.arange(-h, h + 1, dtype=float)
    else:
        x = np.asarray(offsets, dtype=float)
        if x.shape != y.shape:
            raise InvalidArgumentError("offsets and values must have equal length")
        if x.size > 1 and not (np.diff(x) > 0).all():
            raise InvalidArgumentError("offsets must be strictly increasing")
    keep = np.isfinite(y)
    return x[keep], y[keep]


def default_coverage(npoints: int, degree: int) -> int:
    """h_p = floor((m + p + 1)/2) with p regressors, clamped to feasible fits."""
    return min(max((npoints + degree + 1) // 2, degree + 2), npoints)


def med_window(values, offsets=None) -> WindowFit | None:
    """Moving-median level; even counts average the two central values."""
    x, y = _prepare(values, offsets)
    if y.size < 1:
        return None
    level = float(np.median(y))
    return WindowFit("med", 0, level, 0.0, 0.0, float(np.abs(y - level).sum()), y.size)


def rm_window(values, offsets=None) -> WindowFit | None:
    """Repeated-median line fit."""
    x, y = _prepare(values, offsets)
    if y.size < 2:
        return None
    level, slope = kernels.rm_fit(x, y)
    return WindowFit("rm", 1, level, slope, 0.0, None, y.size)


def lms_window(values, degree: int = 1, offsets=None, cover: int | None = None) -> WindowFit | None:
    """Exact least-median-of-squares fit (degree 1 or 2)."""
    if degree not in (1, 2):
        raise InvalidArgumentError("lms supports degree 1 or 2")
    x, y = _prepare(values, offsets)
    if y.size < degree + 2:
        return None
    if cover is None:
        cover = default_coverage(y.size, degree)
    if not degree + 2 <= cover <= y.size:
        raise InvalidArgumentError("cover must lie between degree+2 and the window size")
    b0, b1, b2, obj = kernels.lms_fit(x, y, degree, cover)
    return WindowFit("lms", degree, b0, b1, b2, obj, y.size)


def lts_window(
    values, degree: int = 1, coverage: int | None = None, offsets=None
) -> WindowFit | None:
    """Exact least-trimmed-squares fit (degree 1 or 2)."""
    if degree not in (1, 2):
        raise InvalidArgumentError("lts supports degree 1 or 2")
    x, y = _prepare(values, offsets)
    if y.size < degree + 2:
        return None
    if coverage is None:
        coverage = default_coverage(y.size, degree)
    if not degree + 2 <= coverage <= y.size:
        raise InvalidArgumentError("coverage must lie between degree+2 and the window size")
    b0, b1, b2, obj = kernels.lts_fit(x, y, degree, coverage)
    return WindowFit("lts", degree, b0, b1, b2, obj, y.size)


def lqd_window(values, offsets=None) -> WindowFit | None:
    """Least-quartile-difference slope with the median-based level."""
    x, y = _prepare(values, offsets)
    if y.size < 3:
        return None
    hp = (y.size + 2) // 2
    k = hp * (hp - 1) // 2
    slope, obj = kernels.lqd_slope(x, y, k)
    level = float(np.median(y - slope * x))
    return WindowFit("lqd", 1, level, slope, 0.0, obj, y.size)


def dr_window(values, offsets=None) -> WindowFit | None:
    """Deepest-regression line fit (maximum regression depth)."""
    x, y = _prepare(values, offsets)
    if y.size < 2:
        return None
    b0, b1, depth = kernels.dr_fit(x, y)
    return WindowFit("dr", 1, b0, b1, 0.0, float(depth), y.size)


def regression_depth(level: float, slope: float, values, offsets=None) -> int:
    """Regression depth of the line (level, slope) on a window."""
    x, y = _prepare(values, offsets)
    if y.size == 0:
        raise InvalidArgumentError("window is empty")
    return int(kernels.rdepth(y - level - slope * x))


_FITTERS: dict[str, Callable[..., WindowFit | None]] = {
    "med": lambda v, o, d, cov: med_window(v, o),
    "rm": lambda v, o, d, cov: rm_window(v, o),
    "lms": lambda v, o, d, cov: lms_window(v, degree=d, offsets=o, cover=cov),
    "lts": lambda v, o, d, cov: lts_window(v, degree=d, coverage=cov, offsets=o),
    "lqd": lambda v, o, d, cov: lqd_window(v, o),
    "dr": lambda v, o, d, cov: dr_window(v, o),
}


def robust_smooth(
    series: TimeSeries,
    method: str,
    h: int = 6,
    degree: int = 1,
    boundary: str = "na_pad",
    coverage: int | None = None,
) -> TrendEstimate:
    """Slide a robust window estimator over a monthly series.

    ``boundary`` selects the treatment of the first/last h periods:

    * ``na_pad``: refit on whatever part of the window is available, as if
      the series were padded with h missing values on both sides;
    * ``extrapolate``: extend the outermost full-window fit linearly,
      TC(n-h+q) = TC(n-h) + q * slope(n-h) (and mirrored at the start).
    """
    method = method.lower()
    if method not in METHODS:
        raise InvalidArgumentError(f"unknown method {method!r}; choose from {METHODS}")
    if degree == 2 and method not in ("lms", "lts"):
        raise InvalidArgumentError("degree 2 is only supported for lms and lts")
    if degree not in (1, 2):
        raise InvalidArgumentError("degree must be 1 or 2")
    if boundary not in ("na_pad", "extrapolate"):
        raise InvalidArgumentError("boundary must be 'na_pad' or 'extrapolate'")
    if coverage is not None and method != "lts":
        raise InvalidArgumentError("coverage is only meaningful for lts")
    y = series.values
    n = len(y)
    if n < 2 * h + 1:
        raise InvalidArgumentError(f"series must have at least {2 * h + 1} observations")

    fitter = _FITTERS[method]
    estimates = np.full(n, np.nan)
    ids = [""] * n

    def fit_at(t: int) -> WindowFit | None:
        lo = max(0, t - h)
        hi = min(n - 1, t + h)
        offsets = np.arange(lo - t, hi - t + 1, dtype=float)
        return fitter(y[lo : hi + 1], offsets, degree, coverage)

    if boundary == "na_pad":
        span = range(n)
    else:
        span = range(h, n - h)
    for t in span:
        fit = fit_at(t)
        if fit is None:
            ids[t] = f"{method}_missing"
            continue
        estimates[t] = fit.level
        ids[t] = f"{method}{degree if degree == 2 else ''}_w{fit.npoints}"

    if boundary == "extrapolate":
        last = fit_at(n - 1 - h)
        first = fit_at(h)
        for q in range(1, h + 1):
            if last is not None:
                estimates[n - 1 - h + q] = last.level + q * last.slope
                ids[n - 1 - h + q] = f"{method}_extrap{q}"
            if first is not None:
                estimates[h - q] = first.level - q * first.slope
                ids[h - q] = f"{method}_extrap{q}r"

    return TrendEstimate(series.start, estimates, tuple(ids))
