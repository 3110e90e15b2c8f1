"""Outlier regressors for robust moving averages.

Three shock shapes are supported: additive outliers assigned to the
irregular (``ao``), additive outliers assigned to the trend-cycle
(``ao_trend``) and level shifts (``ls``).  Each spec contributes, per
evaluation period, one regressor column over the filter window; the robust
filter construction appends these columns to the local polynomial design.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, InvalidArgumentError
from .series import Month

logger = logging.getLogger(__name__)


class OutlierKind(str, Enum):
    AO = "ao"
    AO_TREND = "ao_trend"
    LS = "ls"


@dataclass(frozen=True)
class OutlierSpec:
    """A typed shock anchored at a calendar month."""

    kind: OutlierKind
    date: Month

    @classmethod
    def parse(cls, text: str) -> "OutlierSpec":
        """Parse the CLI grammar ``kind:YYYY-MM``."""
        try:
            kind_text, date_text = text.split(":", 1)
            kind = OutlierKind(kind_text.strip().lower())
        except ValueError as exc:
            raise ConfigError(
                f"invalid outlier {text!r}: expected kind:YYYY-MM with kind in "
                "{ao, ao_trend, ls}"
            ) from exc
        return cls(kind, Month.parse(date_text))

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.date}"


def check_unique(specs: Sequence[OutlierSpec]) -> tuple[OutlierSpec, ...]:
    seen = set()
    for spec in specs:
        key = (spec.kind, spec.date)
        if key in seen:
            raise ConfigError(f"duplicate outlier spec {spec}")
        seen.add(key)
    return tuple(specs)


def load_outlier_specs(path) -> tuple[OutlierSpec, ...]:
    """Load specs from the JSON schema [{"kind": ..., "date": "YYYY-MM"}, ...]."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read outlier spec file {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise ConfigError(f"{path}: expected a JSON array of outlier objects")
    specs = []
    for item in raw:
        try:
            specs.append(OutlierSpec(OutlierKind(item["kind"]), Month.parse(item["date"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: malformed outlier entry {item!r}") from exc
    return check_unique(specs)


def regressor_column(
    spec: OutlierSpec, t: Month, offsets: np.ndarray, h: int
) -> np.ndarray | None:
    """Regressor values over window offsets j (periods t+j) for one spec.

    ``h`` is the half-window of the underlying symmetric model; asymmetric
    windows pass their own offset range but keep the same h.  Returns None
    when the spec is inactive at ``t`` (no support in the window, or the
    shape degenerates to a constant there).

    For level shifts the estimate must track the pre-shock level while
    t < t0 and the post-shock level from the break onwards, so the column
    is the dummy of the side of the break that the estimate has to ignore
    (a robust filter is orthogonal to every column it models).  The break
    period itself belongs to the post-break side: the shifted level applies
    from its date, which keeps a pure step exactly reproducible.

    For trend-assigned additive outliers the shock is carried by the trend
    estimate for the h periods starting at t0; the estimate at t0 + h would
    turn the complement dummy into a level break, so that period reverts to
    the plain additive-outlier column.
    """
    o = spec.date - t
    js = offsets
    if spec.kind is OutlierKind.AO:
        col = (js == o).astype(float)
    elif spec.kind is OutlierKind.AO_TREND:
        if o > 0 or o == -h:
            col = (js == o).astype(float)
        elif -h < o <= 0:
            col = (js != o).astype(float)
        else:
            return None
    elif spec.kind is OutlierKind.LS:
        if t < spec.date:
            col = (js >= o).astype(float)
        else:
            col = (js < o).astype(float)
    else:  # pragma: no cover - exhaustive enum
        raise InvalidArgumentError(f"unknown outlier kind {spec.kind}")
    if col.min() == col.max():
        return None
    return col


def regressor_columns(
    specs: Iterable[OutlierSpec],
    t: Month,
    offsets: np.ndarray,
    h: int,
    design: np.ndarray,
    rank_tol: float = 1e-9,
) -> tuple[np.ndarray, tuple[OutlierSpec, ...]]:
    """Active regressor columns at evaluation period ``t``.

    ``design`` holds the polynomial columns already in the model; a spec
    whose column is collinear with the design (or with previously accepted
    columns) is deactivated for this period with a logged warning.

    Returns the (window x n_active) matrix and the active specs.
    """
    offsets = np.asarray(offsets)
    current = np.asarray(design, dtype=float)
    cols: list[np.ndarray] = []
    active: list[OutlierSpec] = []
    base_rank = np.linalg.matrix_rank(current, tol=rank_tol)
    for spec in specs:
        col = regressor_column(spec, t, offsets, h)
        if col is None:
            continue
        candidate = np.column_stack([current, col])
        if np.linalg.matrix_rank(candidate, tol=rank_tol) <= base_rank:
            logger.warning("outlier %s collinear with the design at %s; dropped", spec, t)
            continue
        current = candidate
        base_rank += 1
        cols.append(col)
        active.append(spec)
    if not cols:
        return np.empty((len(offsets), 0)), tuple()
    return np.column_stack(cols), tuple(active)
