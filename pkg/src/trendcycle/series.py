"""Monthly time series and estimate containers."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DataError, InvalidArgumentError

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


@dataclass(frozen=True, order=True)
class Month:
    """A calendar month, the time unit of every series in this package."""

    year: int
    month: int

    def __post_init__(self) -> None:
        if not 1 <= self.month <= 12:
            raise InvalidArgumentError(f"month out of range: {self.month}")

    @property
    def ordinal(self) -> int:
        return self.year * 12 + (self.month - 1)

    @classmethod
    def from_ordinal(cls, ordinal: int) -> "Month":
        return cls(ordinal // 12, ordinal % 12 + 1)

    @classmethod
    def parse(cls, text: str) -> "Month":
        m = _MONTH_RE.match(text.strip())
        if m is None:
            raise DataError(f"invalid period {text!r}, expected YYYY-MM")
        return cls(int(m.group(1)), int(m.group(2)))

    def __add__(self, months: int) -> "Month":
        return Month.from_ordinal(self.ordinal + months)

    def __sub__(self, other: "Month | int"):
        if isinstance(other, Month):
            return self.ordinal - other.ordinal
        return Month.from_ordinal(self.ordinal - other)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


def _leading_trailing_nan_ok(values: np.ndarray) -> bool:
    """True when NaNs appear only as leading and/or trailing runs."""
    finite = np.isfinite(values)
    if finite.all():
        return True
    idx = np.flatnonzero(finite)
    if idx.size == 0:
        return False
    return bool(finite[idx[0] : idx[-1] + 1].all())


@dataclass(frozen=True)
class TimeSeries:
    """A monthly series of levels with a start period.

    Values are stored densely (consecutive months, no gaps).  Missing
    markers (NaN) are permitted only as leading or trailing runs.
    """

    start: Month
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidArgumentError("a series needs at least one observation")
        if not _leading_trailing_nan_ok(arr):
            raise InvalidArgumentError(
                "missing values are only permitted at the series boundaries"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def end(self) -> Month:
        return self.start + (len(self) - 1)

    def periods(self) -> Iterator[Month]:
        for i in range(len(self)):
            yield self.start + i

    def index_of(self, period: Month) -> int:
        i = period - self.start
        if not 0 <= i < len(self):
            raise InvalidArgumentError(f"period {period} outside series span")
        return i

    def value_at(self, period: Month) -> float:
        return float(self.values[self.index_of(period)])

    def truncated(self, last: Month) -> "TimeSeries":
        """The vintage of this series ending at ``last``."""
        n = last - self.start + 1
        if n < 1:
            raise InvalidArgumentError(f"truncation {last} before series start")
        n = min(n, len(self))
        return TimeSeries(self.start, self.values[:n])

    def window_from(self, first: Month) -> "TimeSeries":
        i = self.index_of(first)
        return TimeSeries(first, self.values[i:])

    def trimmed(self) -> "TimeSeries":
        """Series with leading/trailing missing runs removed."""
        finite = np.flatnonzero(np.isfinite(self.values))
        if finite.size == 0:
            raise InvalidArgumentError("series has no observed values")
        lo, hi = int(finite[0]), int(finite[-1])
        return TimeSeries(self.start + lo, self.values[lo : hi + 1])

    def map(self, func) -> "TimeSeries":
        return TimeSeries(self.start, func(self.values))


@dataclass(frozen=True)
class TrendEstimate:
    """Per-period trend-cycle point estimates and the filter used at each.

    Confidence bounds are attached separately by the inference routines;
    plain smoothing leaves them unset.
    """

    start: Month
    values: np.ndarray = field(repr=False)
    filter_ids: tuple[str, ...] = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if len(self.filter_ids) != arr.size:
            raise InvalidArgumentError("one filter id per estimated period required")

    def __len__(self) -> int:
        return self.values.size

    def periods(self) -> Iterator[Month]:
        for i in range(len(self)):
            yield self.start + i

    def value_at(self, period: Month) -> float:
        return float(self.values[period - self.start])

    def map(self, func) -> "TrendEstimate":
        return TrendEstimate(self.start, func(self.values), self.filter_ids)


def series_from_pairs(pairs: Sequence[tuple[Month, float]]) -> TimeSeries:
    """Build a series from (month, value) rows, checking consecutiveness."""
    if not pairs:
        raise DataError("no observations")
    months = [p for p, _ in pairs]
    for prev, cur in zip(months, months[1:]):
        gap = cur - prev
        if gap != 1:
            if gap < 1:
                raise DataError(f"periods not increasing at {cur}")
            missing = prev + 1
            raise DataError(f"gap in monthly periods: missing {missing}")
    return TimeSeries(months[0], np.array([v for _, v in pairs], dtype=float))
