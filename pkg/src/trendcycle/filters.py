"""Symmetric and asymmetric moving averages for trend-cycle extraction.

The symmetric filters come from local polynomial regression with a kernel
(Henderson filters for the kernel used in X-11).  End-of-series filters are
built either by minimising the expected squared revision to the symmetric
filter under polynomial-preservation constraints (Musgrave filters and their
generalisation) or by cutting the symmetric weights and renormalising.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from importlib import resources
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    ConfigError,
    DegenerateFilterError,
    DegenerateSeriesError,
    InvalidArgumentError,
    InvalidSpecError,
    NumericalRankError,
)
from .series import Month, TimeSeries, TrendEstimate

_WEIGHT_SUM_TOL = 1e-12
_TABLE_SUM_TOL = 1e-9


@dataclass(frozen=True)
class MovingAverage:
    """A finite weight sequence indexed j = -lower..upper.

    ``lower`` is the past span (p), ``upper`` the future span (f).  The
    filter output at period t is ``sum_j weights[j] * y[t+j]``.
    """

    lower: int
    upper: int
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.lower < 0 or self.upper < 0:
            raise InvalidArgumentError("filter spans must be non-negative")
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size != self.lower + self.upper + 1:
            raise InvalidArgumentError(
                f"expected {self.lower + self.upper + 1} weights, got {w.size}"
            )
        if not np.isfinite(w).all():
            raise InvalidArgumentError("filter weights must be finite")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.lower, self.upper + 1)

    def weight(self, j: int) -> float:
        if not -self.lower <= j <= self.upper:
            return 0.0
        return float(self.weights[j + self.lower])

    @property
    def is_symmetric(self) -> bool:
        return self.lower == self.upper and bool(
            np.allclose(self.weights, self.weights[::-1], rtol=0.0, atol=1e-12)
        )

    def weight_sum(self) -> float:
        return float(self.weights.sum())

    def reversed(self) -> "MovingAverage":
        return MovingAverage(self.upper, self.lower, self.weights[::-1])

    def apply_at(self, values: np.ndarray, t: int) -> float:
        """Filter output at index ``t`` of ``values``."""
        n = len(values)
        if not self.lower <= t <= n - 1 - self.upper:
            raise InvalidArgumentError("window extends outside the series")
        return float(self.weights @ values[t - self.lower : t + self.upper + 1])

    def apply_interior(self, values: np.ndarray) -> np.ndarray:
        """Filter outputs for every t with a full window, t = lower..n-1-upper."""
        values = np.asarray(values, dtype=float)
        if len(values) < len(self):
            raise InvalidArgumentError("series shorter than the filter window")
        return np.correlate(values, self.weights, mode="valid")


def preserves_polynomial(ma: MovingAverage, degree: int, tol: float = 1e-9) -> bool:
    """Check that the filter reproduces polynomials up to ``degree`` exactly.

    Applying the filter to y_j = j^k must return the polynomial value at
    j = 0, i.e. 1 for k = 0 and 0 for k >= 1.
    """
    js = ma.offsets.astype(float)
    for k in range(degree + 1):
        target = 1.0 if k == 0 else 0.0
        if abs(float(ma.weights @ js**k) - target) > tol:
            return False
    return True


@dataclass(frozen=True)
class FilterSet:
    """A symmetric filter plus the asymmetric filters for each end horizon.

    ``asymmetric[q]`` estimates a period with only ``q`` future observations
    available (q = 0..h-1); it has past span h and future span q.
    """

    symmetric: MovingAverage
    asymmetric: Mapping[int, MovingAverage]
    name: str = "filterset"

    def __post_init__(self) -> None:
        if not self.symmetric.is_symmetric:
            raise InvalidArgumentError("symmetric member must be symmetric")
        h = self.symmetric.lower
        if sorted(self.asymmetric) != list(range(h)):
            raise InvalidArgumentError(f"asymmetric members must cover q = 0..{h - 1}")
        for q, ma in self.asymmetric.items():
            if ma.lower != h or ma.upper != q:
                raise InvalidArgumentError(f"member q={q} must have spans ({h},{q})")
        object.__setattr__(self, "asymmetric", MappingProxyType(dict(self.asymmetric)))

    @property
    def h(self) -> int:
        return self.symmetric.lower


@dataclass(frozen=True)
class LocalPolyBasis:
    """Design matrix and kernel of a local polynomial fit on j = -h..h."""

    h: int
    degree: int
    design: np.ndarray = field(repr=False)
    kernel: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, h: int, degree: int, kernel: np.ndarray) -> "LocalPolyBasis":
        if h < 1:
            raise InvalidArgumentError("half-window must be >= 1")
        if degree > 2 * h:
            raise InvalidArgumentError("degree must not exceed 2h")
        kernel = np.asarray(kernel, dtype=float)
        if kernel.shape != (2 * h + 1,):
            raise InvalidArgumentError("kernel must have 2h+1 weights")
        if not (kernel > 0).all():
            raise InvalidArgumentError("kernel weights must be positive")
        js = np.arange(-h, h + 1, dtype=float)
        design = np.vander(js, degree + 1, increasing=True)
        return cls(h, degree, design, kernel)


def poly_columns(js: np.ndarray, degree: int) -> np.ndarray:
    """Columns (1, j, ..., j^degree) evaluated at the given offsets."""
    return np.vander(np.asarray(js, dtype=float), degree + 1, increasing=True)


def henderson_kernel(h: int) -> np.ndarray:
    """Henderson kernel weights on j = -h..h.

    kappa_j = [1 - j^2/(h+1)^2][1 - j^2/(h+2)^2][1 - j^2/(h+3)^2]
    """
    if h < 1:
        raise InvalidArgumentError("half-window must be >= 1")
    j2 = np.arange(-h, h + 1, dtype=float) ** 2
    return (
        (1.0 - j2 / (h + 1) ** 2)
        * (1.0 - j2 / (h + 2) ** 2)
        * (1.0 - j2 / (h + 3) ** 2)
    )


def local_poly_filter(h: int, degree: int, kernel: np.ndarray) -> MovingAverage:
    """Symmetric filter extracting the constant of a local WLS polynomial fit.

    Solves theta = K X (X'KX)^-1 e1.  With the Henderson kernel and degree
    2 or 3 this is the Henderson filter of length 2h+1.
    """
    basis = LocalPolyBasis.build(h, degree, kernel)
    xkx = basis.design.T @ (basis.kernel[:, None] * basis.design)
    e1 = np.zeros(degree + 1)
    e1[0] = 1.0
    try:
        beta = np.linalg.solve(xkx, e1)
    except np.linalg.LinAlgError as exc:
        raise NumericalRankError("singular X'KX in local polynomial fit") from exc
    theta = basis.kernel * (basis.design @ beta)
    if np.array_equal(basis.kernel, basis.kernel[::-1]):
        # the exact solution is symmetric; remove solver noise
        theta = 0.5 * (theta + theta[::-1])
    if abs(theta.sum() - 1.0) > _WEIGHT_SUM_TOL:
        raise NumericalRankError("local polynomial weights failed the unit-sum check")
    return MovingAverage(h, h, theta)


@dataclass(frozen=True)
class MmsreSpec:
    """Constraints and bias of a minimum-revision asymmetric filter.

    ``preserve_degree`` (d*) is the polynomial degree reproduced exactly,
    ``model_degree`` (d) the degree of the local reference model, and
    ``slope_ratio`` the bias ratio |delta1|/sigma attached to the first
    unpreserved degree.  Only the ratio matters; sigma never enters alone.
    """

    preserve_degree: int
    slope_ratio: float
    q: int
    model_degree: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.preserve_degree <= self.model_degree:
            raise InvalidArgumentError("need 0 <= preserve_degree <= model_degree")
        if self.slope_ratio < 0:
            raise InvalidArgumentError("slope_ratio must be >= 0")
        if self.q < 0:
            raise InvalidArgumentError("future horizon q must be >= 0")


def constrained_revision_filter(
    theta: np.ndarray,
    observed: np.ndarray,
    constraint_cols: np.ndarray,
    bias_col: np.ndarray | None,
    slope_ratio: float,
) -> np.ndarray:
    """Weights minimising the expected squared revision to ``theta``.

    ``observed`` is a boolean mask over theta's window marking observations
    available to the asymmetric filter.  The minimiser of

        ||v - theta[observed]||^2
        + slope_ratio^2 * (bias_col[observed]::v - bias_col::theta)^2

    subject to constraint_cols[observed]' v = constraint_cols' theta is
    obtained from the bordered KKT system of the quadratic program.  The
    unobserved part of theta only adds a constant to the objective.
    """
    theta = np.asarray(theta, dtype=float)
    observed = np.asarray(observed, dtype=bool)
    n_obs = int(observed.sum())
    cols = np.atleast_2d(np.asarray(constraint_cols, dtype=float))
    if cols.shape[0] != theta.size:
        raise InvalidArgumentError("constraint columns must match the full window")
    c = cols.shape[1]
    if n_obs < c:
        raise InvalidSpecError("more constraints than observed weights")
    cp = cols[observed]
    if np.linalg.matrix_rank(cp) < c:
        raise InvalidSpecError("constraint matrix is rank deficient on the observed window")

    a = np.eye(n_obs)
    target = theta[observed].copy()
    if bias_col is not None and slope_ratio > 0:
        b = np.asarray(bias_col, dtype=float)
        bp = b[observed]
        g2 = slope_ratio**2
        a += g2 * np.outer(bp, bp)
        target += g2 * float(b @ theta) * bp

    kkt = np.zeros((n_obs + c, n_obs + c))
    kkt[:n_obs, :n_obs] = a
    kkt[:n_obs, n_obs:] = cp
    kkt[n_obs:, :n_obs] = cp.T
    rhs = np.concatenate([target, cols.T @ theta])
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError as exc:
        raise InvalidSpecError("singular KKT system for asymmetric filter") from exc
    return sol[:n_obs]


def mmsre_asym_filter(sym: MovingAverage, spec: MmsreSpec) -> MovingAverage:
    """Asymmetric filter minimising revision MSE under polynomial constraints.

    With ``model_degree=1``, ``preserve_degree=0``, a Henderson symmetric
    filter and slope_ratio = 2/(R*sqrt(pi)) this is the Musgrave filter used
    in X-11.
    """
    if not sym.is_symmetric:
        raise InvalidArgumentError("reference filter must be symmetric")
    h = sym.lower
    if spec.q >= h:
        raise InvalidArgumentError("future horizon must be smaller than the half-window")
    js = np.arange(-h, h + 1, dtype=float)
    observed = js <= spec.q
    u = poly_columns(js, spec.preserve_degree)
    bias = None
    if spec.model_degree > spec.preserve_degree:
        bias = js ** (spec.preserve_degree + 1)
    v = constrained_revision_filter(sym.weights, observed, u, bias, spec.slope_ratio)
    return MovingAverage(h, spec.q, v)


def musgrave_slope_ratio(r: float) -> float:
    """Bias ratio |delta1|/sigma = 2/(R*sqrt(pi)) implied by an I-C ratio."""
    if r <= 0:
        raise InvalidArgumentError("I-C ratio must be positive")
    return 2.0 / (r * np.sqrt(np.pi))


def musgrave_filter_set(h: int, r: float = 3.5) -> FilterSet:
    """Henderson symmetric filter plus Musgrave end filters for q = 0..h-1."""
    ratio = musgrave_slope_ratio(r)
    sym = local_poly_filter(h, 3, henderson_kernel(h))
    asym = {
        q: mmsre_asym_filter(
            sym, MmsreSpec(preserve_degree=0, slope_ratio=ratio, q=q, model_degree=1)
        )
        for q in range(h)
    }
    return FilterSet(sym, asym, name=f"henderson{2 * h + 1}")


def icr(series: TimeSeries, sym: MovingAverage) -> float:
    """I-C ratio: mean absolute change of the irregular over the trend-cycle.

    The trend C is the symmetric filter applied to the interior of the
    series; the irregular is the residual on the same support.
    """
    y = series.values
    if not np.isfinite(y).all():
        y = series.trimmed().values
    if len(y) <= len(sym):
        raise InvalidArgumentError("series too short for the symmetric filter")
    trend = sym.apply_interior(y)
    irregular = y[sym.lower : len(y) - sym.upper] - trend
    denom = float(np.abs(np.diff(trend)).sum())
    if denom == 0.0:
        raise DegenerateSeriesError("trend-cycle has no variation; I-C ratio undefined")
    return float(np.abs(np.diff(irregular)).sum()) / denom


def select_henderson_length(r: float) -> int:
    """Half-window of the Henderson filter selected from the I-C ratio.

    Returns 4 (9 terms) for R < 1, 6 (13 terms) for 1 <= R <= 3.5 and
    11 (23 terms) for R > 3.5.
    """
    if r < 0:
        raise InvalidArgumentError("I-C ratio must be >= 0")
    if r < 1.0:
        return 4
    if r <= 3.5:
        return 6
    return 11


def x11_musgrave_ratio(h: int) -> float:
    """Conventional I-C ratio used to parameterise Musgrave filters in X-11.

    1 for the 9-term filter, 3.5 for the 13-term one, 4.5 for the 23-term
    one; 3.5 for any other length.
    """
    return {4: 1.0, 6: 3.5, 11: 4.5}.get(h, 3.5)


def cut_and_normalize(sym: MovingAverage, q: int) -> MovingAverage:
    """Truncate a symmetric filter to j <= q and rescale to unit sum."""
    if not sym.is_symmetric:
        raise InvalidArgumentError("cut-and-normalize starts from a symmetric filter")
    h = sym.lower
    if not 0 <= q <= h:
        raise InvalidArgumentError("future horizon must lie in 0..h")
    if q == h:
        return sym
    kept = sym.weights[: h + q + 1]
    total = float(kept.sum())
    if total <= 0:
        raise DegenerateFilterError("retained weights sum to a non-positive value")
    return MovingAverage(h, q, kept / total)


def apply_filter_set(series: TimeSeries, fs: FilterSet) -> TrendEstimate:
    """Smooth a series with a filter set.

    Interior periods use the symmetric member; the last h periods use the
    asymmetric members q = h-1..0 and the first h periods their
    time-reversed counterparts (mirror convention for the start of series,
    stated here because only the end of series has a published treatment).
    """
    y = series.values
    n = len(y)
    h = fs.h
    if n < 2 * h + 1:
        raise InvalidArgumentError(f"series must have at least {2 * h + 1} observations")
    if not np.isfinite(y).all():
        raise InvalidArgumentError("linear filters require a series without missing values")

    estimates = np.empty(n)
    ids: list[str] = [""] * n
    estimates[h : n - h] = fs.symmetric.apply_interior(y)
    for t in range(h, n - h):
        ids[t] = f"{fs.name}_sym"
    for q in range(h):
        end_t = n - 1 - q
        estimates[end_t] = fs.asymmetric[q].apply_at(y, end_t)
        ids[end_t] = f"{fs.name}_q{q}"
        start_t = q
        estimates[start_t] = fs.asymmetric[q].reversed().apply_at(y, start_t)
        ids[start_t] = f"{fs.name}_q{q}r"
    return TrendEstimate(series.start, estimates, tuple(ids))


def load_clf_table(path) -> MovingAverage:
    """Read the 13-term symmetric cascade-filter weights from a CSV table.

    The file carries rows (j, weight) for j = -6..6 plus '#' comment lines
    holding the provenance of the coefficients.
    """
    rows: dict[int, float] = {}
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(line for line in fh if not line.lstrip().startswith("#"))
            header = next(reader, None)
            if header is None or [c.strip().lower() for c in header[:2]] != ["j", "weight"]:
                raise ConfigError(f"{path}: expected header 'j,weight'")
            for row in reader:
                if not row or not "".join(row).strip():
                    continue
                try:
                    j, w = int(row[0]), float(row[1])
                except (ValueError, IndexError) as exc:
                    raise ConfigError(f"{path}: malformed row {row!r}") from exc
                if j in rows:
                    raise ConfigError(f"{path}: duplicate offset {j}")
                rows[j] = w
    except OSError as exc:
        raise ConfigError(f"cannot read coefficient table {path}: {exc}") from exc
    if sorted(rows) != list(range(-6, 7)):
        raise ConfigError(f"{path}: expected 13 rows covering j = -6..6")
    weights = np.array([rows[j] for j in range(-6, 7)])
    if abs(weights.sum() - 1.0) > _TABLE_SUM_TOL:
        raise ConfigError(f"{path}: weights sum to {weights.sum():.12f}, expected 1")
    return MovingAverage(6, 6, weights)


def default_clf_table_path():
    """Path of the coefficient table shipped with the package."""
    return resources.files("trendcycle").joinpath("data/clf13.csv")


def clf_filter_set(table_path=None) -> FilterSet:
    """Cascade linear filter set: table-driven symmetric member plus
    cut-and-normalised end filters."""
    if table_path is None:
        table_path = default_clf_table_path()
    sym = load_clf_table(table_path)
    asym = {q: cut_and_normalize(sym, q) for q in range(sym.lower)}
    return FilterSet(sym, asym, name="clf13")


def coefficient_rows(fs: FilterSet) -> Iterable[tuple[str, int, int, float]]:
    """Rows (filter_id, q, j, weight) describing a filter set.

    The symmetric member is reported with q = h.
    """
    h = fs.h
    for j, w in zip(fs.symmetric.offsets, fs.symmetric.weights):
        yield f"{fs.name}_sym", h, int(j), float(w)
    for q in range(h):
        ma = fs.asymmetric[q]
        for j, w in zip(ma.offsets, ma.weights):
            yield f"{fs.name}_q{q}", q, int(j), float(w)


def write_coefficients_csv(path, rows: Iterable[tuple[str, int, int, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["filter_id", "q", "j", "weight"])
        for filter_id, q, j, weight in rows:
            writer.writerow([filter_id, q, j, format(weight, ".17g")])
