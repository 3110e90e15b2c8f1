"""Henderson/Musgrave moving averages robust to declared shocks.

The local polynomial design behind the Henderson filter is augmented with
outlier regressors, which makes the resulting weights orthogonal to the
declared shock patterns: the trend estimate no longer reacts to them.  The
asymmetric (end-of-series) filters minimise the expected squared revision to
the robust symmetric filter under the augmented constraints.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidSpecError, TooManyOutliersError
from .filters import (
    FilterSet,
    MmsreSpec,
    MovingAverage,
    constrained_revision_filter,
    henderson_kernel,
    local_poly_filter,
    mmsre_asym_filter,
    musgrave_filter_set,
    musgrave_slope_ratio,
    poly_columns,
)
from .outliers import OutlierSpec, check_unique, regressor_columns
from .series import Month, TimeSeries, TrendEstimate

logger = logging.getLogger(__name__)


def robust_symmetric_filter(
    h: int,
    specs: Sequence[OutlierSpec],
    t: Month,
    degree: int = 3,
    kernel: np.ndarray | None = None,
) -> tuple[MovingAverage, tuple[OutlierSpec, ...]]:
    """Centered robust filter at period ``t``.

    Augments the local polynomial design with the active outlier columns and
    extracts the constant:  theta = K [X O] ([X O]' K [X O])^-1 e1.  The
    filter reproduces degree-``degree`` trends and annihilates the modelled
    shock patterns.  Returns the filter and the specs actually active at t.
    """
    if kernel is None:
        kernel = henderson_kernel(h)
    js = np.arange(-h, h + 1)
    x = poly_columns(js, degree)
    o, active = regressor_columns(specs, t, js, h, x)
    design = np.column_stack([x, o]) if o.size else x
    if design.shape[1] > design.shape[0]:
        raise TooManyOutliersError(
            f"{design.shape[1]} design columns exceed the {design.shape[0]}-term window"
        )
    xkx = design.T @ (kernel[:, None] * design)
    e1 = np.zeros(design.shape[1])
    e1[0] = 1.0
    try:
        beta = np.linalg.solve(xkx, e1)
    except np.linalg.LinAlgError as exc:
        raise TooManyOutliersError("augmented design is rank deficient") from exc
    theta = kernel * (design @ beta)
    return MovingAverage(h, h, theta), active


def robust_asym_filter(
    sym_r: MovingAverage,
    spec: MmsreSpec,
    specs: Sequence[OutlierSpec],
    t: Month,
    side: str = "end",
) -> MovingAverage:
    """Asymmetric filter minimising revision MSE to the robust filter ``sym_r``.

    The constraints extend the polynomial-preservation ones with the active
    outlier columns: [U_p O_p]' v = [U O]' sym_r.  ``side`` selects which
    part of the window is observed: "end" keeps offsets j <= q (end of
    series), "start" keeps j >= -q (start of series, mirror situation).

    Raises InvalidSpecError when the observed constraint matrix is rank
    deficient (e.g. consecutive outliers squeezed at the boundary); callers
    fall back to the linear asymmetric filter in that case.
    """
    if sym_r.lower != sym_r.upper:
        raise InvalidArgumentError("reference robust filter must be centered")
    h = sym_r.lower
    if spec.q >= h:
        raise InvalidArgumentError("future horizon must be smaller than the half-window")
    js = np.arange(-h, h + 1)
    if side == "end":
        observed = js <= spec.q
    elif side == "start":
        observed = js >= -spec.q
    else:
        raise InvalidArgumentError("side must be 'end' or 'start'")

    u = poly_columns(js, spec.preserve_degree)
    model_design = poly_columns(js, max(spec.model_degree, 3))
    o, active = regressor_columns(specs, t, js, h, model_design)
    if o.size and not np.any(o[observed] != 0.0):
        # shocks entirely in the unobserved part: keep the plain modelling
        plain = mmsre_asym_filter(local_poly_filter(h, 3, henderson_kernel(h)), spec)
        return plain if side == "end" else plain.reversed()
    cols = np.column_stack([u, o]) if o.size else u
    bias = None
    if spec.model_degree > spec.preserve_degree:
        bias = js.astype(float) ** (spec.preserve_degree + 1)
    v = constrained_revision_filter(sym_r.weights, observed, cols, bias, spec.slope_ratio)
    if side == "end":
        return MovingAverage(h, spec.q, v)
    return MovingAverage(spec.q, h, v)


@dataclass(frozen=True)
class PeriodFilter:
    """The filter applied at one period, with its provenance."""

    period: Month
    kind: str  # "sym", "asym_end" or "asym_start"
    q: int  # available horizon on the short side (h for "sym")
    ma: MovingAverage
    fallback: bool
    active: tuple[OutlierSpec, ...]


@dataclass(frozen=True)
class RobustFilterPlan:
    """Per-period filters produced by a robust smoothing run."""

    start: Month
    h: int
    periods: tuple[PeriodFilter, ...]
    base: FilterSet = field(repr=False)

    def __len__(self) -> int:
        return len(self.periods)

    def at(self, period: Month) -> PeriodFilter:
        return self.periods[period - self.start]


def robust_apply(
    series: TimeSeries,
    specs: Sequence[OutlierSpec],
    h: int = 6,
    r: float = 3.5,
    degree: int = 3,
) -> tuple[TrendEstimate, RobustFilterPlan]:
    """Smooth a series with per-period robust Henderson/Musgrave filters.

    Filters vary with t near any declared shock and degenerate to the plain
    Henderson/Musgrave members elsewhere.  Specs dated after the last
    observation are ignored (they are not observable yet).  A period where
    the robust asymmetric construction fails keeps the linear asymmetric
    filter and is flagged in the plan.
    """
    y = series.values
    n = len(y)
    if n < 2 * h + 1:
        raise InvalidArgumentError(f"series must have at least {2 * h + 1} observations")
    if not np.isfinite(y).all():
        raise InvalidArgumentError("robust moving averages require a complete series")
    specs = check_unique(tuple(specs))
    usable = tuple(s for s in specs if s.date <= series.end and s.date >= series.start)
    for s in specs:
        if s not in usable:
            logger.warning("outlier %s outside the observed span; ignored", s)

    base = musgrave_filter_set(h, r)
    ratio = musgrave_slope_ratio(r)
    kernel = henderson_kernel(h)
    estimates = np.empty(n)
    ids: list[str] = [""] * n
    period_filters: list[PeriodFilter] = []

    for t in range(n):
        period = series.start + t
        if h <= t <= n - 1 - h:
            ma, active = _period_symmetric(base, usable, period, h, degree, kernel)
            kind, q, fallback = "sym", h, False
            window = y[t - h : t + h + 1]
        elif t > n - 1 - h:
            q = n - 1 - t
            ma, active, fallback = _period_asym(
                base, usable, period, h, q, degree, kernel, ratio, side="end"
            )
            kind = "asym_end"
            window = y[t - h : t + q + 1]
        else:
            q = t
            ma, active, fallback = _period_asym(
                base, usable, period, h, q, degree, kernel, ratio, side="start"
            )
            kind = "asym_start"
            window = y[t - q : t + h + 1]
        estimates[t] = float(ma.weights @ window)
        tag = "robust_" if active else f"{base.name}_"
        suffix = "sym" if kind == "sym" else f"q{q}" + ("r" if kind == "asym_start" else "")
        ids[t] = tag + suffix + ("!" if fallback else "")
        period_filters.append(PeriodFilter(period, kind, q, ma, fallback, active))

    plan = RobustFilterPlan(series.start, h, tuple(period_filters), base)
    return TrendEstimate(series.start, estimates, tuple(ids)), plan


def _period_symmetric(base, specs, period, h, degree, kernel):
    js = np.arange(-h, h + 1)
    o, active = regressor_columns(specs, period, js, h, poly_columns(js, degree))
    if not active:
        return base.symmetric, tuple()
    ma, active = robust_symmetric_filter(h, active, period, degree, kernel)
    return ma, active


def _period_asym(base, specs, period, h, q, degree, kernel, ratio, side):
    plain = base.asymmetric[q] if side == "end" else base.asymmetric[q].reversed()
    js = np.arange(-h, h + 1)
    o, active = regressor_columns(specs, period, js, h, poly_columns(js, degree))
    if not active:
        return plain, tuple(), False
    sym_r, active = robust_symmetric_filter(h, active, period, degree, kernel)
    mmsre = MmsreSpec(preserve_degree=0, slope_ratio=ratio, q=q, model_degree=1)
    try:
        ma = robust_asym_filter(sym_r, mmsre, active, period, side=side)
    except InvalidSpecError:
        logger.warning(
            "robust asymmetric filter infeasible at %s (q=%d, %s side); "
            "using the linear filter",
            period,
            q,
            side,
        )
        return plain, active, True
    return ma, active, False


def write_plan_csv(path, plan: RobustFilterPlan) -> None:
    """Export the plan as (period, filter_kind, q, fallback_flag) rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["period", "filter_kind", "q", "fallback_flag"])
        for pf in plan.periods:
            writer.writerow([str(pf.period), pf.kind, pf.q, int(pf.fallback)])


def plan_coefficient_rows(plan: RobustFilterPlan):
    """Coefficient export rows (filter_id, q, j, weight) for a robust plan."""
    for pf in plan.periods:
        fid = f"robust_{pf.kind}_{pf.period}" + ("_fallback" if pf.fallback else "")
        for j, w in zip(pf.ma.offsets, pf.ma.weights):
            yield fid, pf.q, int(j), float(w)
