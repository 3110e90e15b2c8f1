"""NumPy implementations of the window-fit kernels.

These are the fallback twins of the compiled kernels in ``_ckernels.pyx``;
both expose the same functions with identical tie-breaking rules so the
backend choice never changes a result beyond floating-point noise.

All kernels receive strictly increasing offsets ``x`` and finite values
``y`` (the dispatcher strips missing points) and return plain floats.
"""

from __future__ import annotations

from itertools import combinations, islice

import numpy as np

BACKEND = "python"

_CHUNK = 131072


def rm_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Repeated-median level and slope.

    slope = med_i med_{j!=i} (y_i - y_j)/(x_i - x_j), then
    level = med_i (y_i - x_i * slope).  Medians average the two central
    order statistics on even counts.
    """
    n = x.size
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    s = (y[:, None] - y[None, :]) / dx
    off_diag = ~np.eye(n, dtype=bool)
    inner = np.median(s[off_diag].reshape(n, n - 1), axis=1)
    slope = float(np.median(inner))
    level = float(np.median(y - slope * x))
    return level, slope


def _strip_candidates(
    z: np.ndarray, cover: int
) -> tuple[np.ndarray, np.ndarray]:
    """Midline and half-width of the shortest interval covering ``cover``
    of the z values, per candidate row."""
    zs = np.sort(z, axis=1)
    widths = zs[:, cover - 1 :] - zs[:, : zs.shape[1] - cover + 1]
    pos = np.argmin(widths, axis=1)  # first minimum: deterministic
    rows = np.arange(zs.shape[0])
    lo = zs[rows, pos]
    hi = zs[rows, pos + cover - 1]
    return (lo + hi) / 2.0, (hi - lo) / 2.0


def _pick(order_keys: tuple[np.ndarray, ...]) -> int:
    """Index of the lexicographic minimum; first occurrence wins."""
    return int(np.lexsort(order_keys[::-1])[0])


def lms_fit(
    x: np.ndarray, y: np.ndarray, degree: int, cover: int
) -> tuple[float, float, float, float]:
    """Exact least-median-of-squares fit by elemental candidate search.

    Candidate slopes (degree 1) come from all point pairs, candidate
    (slope, curvature) pairs (degree 2) from all point triples; each
    candidate keeps the Chebyshev midline of the shortest strip covering
    ``cover`` points.  The objective is the cover-th smallest squared
    residual.  Ties break on smaller |slope|, then lexicographic
    coefficients.
    """
    n = x.size
    if degree == 1:
        ii, jj = np.triu_indices(n, 1)
        b1 = (y[jj] - y[ii]) / (x[jj] - x[ii])
        b2 = np.zeros_like(b1)
    else:
        idx = np.array(list(combinations(range(n), 3)))
        xi, xj, xk = x[idx[:, 0]], x[idx[:, 1]], x[idx[:, 2]]
        yi, yj, yk = y[idx[:, 0]], y[idx[:, 1]], y[idx[:, 2]]
        s1 = (yj - yi) / (xj - xi)
        s2 = (yk - yi) / (xk - xi)
        b2 = (s2 - s1) / (xk - xj)
        b1 = s1 - b2 * (xi + xj)
    z = y[None, :] - b1[:, None] * x[None, :] - b2[:, None] * (x * x)[None, :]
    mid, half = _strip_candidates(z, cover)
    obj = half * half
    best = _pick((obj, np.abs(b1), mid, b1, b2))
    return float(mid[best]), float(b1[best]), float(b2[best]), float(obj[best])


def lts_fit(
    x: np.ndarray, y: np.ndarray, degree: int, cover: int
) -> tuple[float, float, float, float]:
    """Exact least-trimmed-squares fit by exhaustive subset enumeration.

    Every size-``cover`` subset is refit by least squares; the trimmed sum
    of squares of the optimum equals the in-subset residual sum of its
    best subset.  Ties break on lexicographic coefficients.
    """
    n = x.size
    best_key = None
    best = (np.nan, np.nan, np.nan, np.inf)
    combos = combinations(range(n), cover)
    while True:
        chunk = np.array(list(islice(combos, _CHUNK)))
        if chunk.size == 0:
            break
        xs = x[chunk]
        ys = y[chunk]
        if degree == 1:
            b0, b1, sse = _ols1(xs, ys)
            b2 = np.zeros_like(b0)
        else:
            b0, b1, b2, sse = _ols2(xs, ys)
        i = _pick((sse, b0, b1, b2))
        key = (float(sse[i]), float(b0[i]), float(b1[i]), float(b2[i]))
        if best_key is None or key < best_key:
            best_key = key
            best = (float(b0[i]), float(b1[i]), float(b2[i]), max(key[0], 0.0))
    return best


def _ols1(xs, ys):
    c = xs.shape[1]
    sx = xs.sum(axis=1)
    sy = ys.sum(axis=1)
    sxx = (xs * xs).sum(axis=1)
    sxy = (xs * ys).sum(axis=1)
    syy = (ys * ys).sum(axis=1)
    det = c * sxx - sx * sx
    b1 = (c * sxy - sx * sy) / det
    b0 = (sy - b1 * sx) / c
    sse = syy - b0 * sy - b1 * sxy
    return b0, b1, np.maximum(sse, 0.0)


def _ols2(xs, ys):
    c = xs.shape[1]
    x2 = xs * xs
    sx = xs.sum(axis=1)
    sx2 = x2.sum(axis=1)
    sx3 = (x2 * xs).sum(axis=1)
    sx4 = (x2 * x2).sum(axis=1)
    sy = ys.sum(axis=1)
    sxy = (xs * ys).sum(axis=1)
    sx2y = (x2 * ys).sum(axis=1)
    syy = (ys * ys).sum(axis=1)
    # Cramer on the 3x3 normal equations
    a11, a12, a13 = float(c), sx, sx2
    a22, a23, a33 = sx2, sx3, sx4
    det = (
        a11 * (a22 * a33 - a23 * a23)
        - a12 * (a12 * a33 - a23 * a13)
        + a13 * (a12 * a23 - a22 * a13)
    )
    d0 = (
        sy * (a22 * a33 - a23 * a23)
        - a12 * (sxy * a33 - a23 * sx2y)
        + a13 * (sxy * a23 - a22 * sx2y)
    )
    d1 = (
        a11 * (sxy * a33 - sx2y * a23)
        - sy * (a12 * a33 - a23 * a13)
        + a13 * (a12 * sx2y - sxy * a13)
    )
    d2 = (
        a11 * (a22 * sx2y - a23 * sxy)
        - a12 * (a12 * sx2y - sxy * a13)
        + sy * (a12 * a23 - a22 * a13)
    )
    b0, b1, b2 = d0 / det, d1 / det, d2 / det
    sse = syy - b0 * sy - b1 * sxy - b2 * sx2y
    return b0, b1, b2, np.maximum(sse, 0.0)


def lqd_slope(x: np.ndarray, y: np.ndarray, k: int) -> tuple[float, float]:
    """Least-quartile-difference slope.

    Minimises the k-th smallest |(y_i - y_j) - b (x_i - x_j)| over i < j.
    Every local minimum of this piecewise-linear objective sits where a
    descending arm |d_a - b g_a| crosses an ascending arm, i.e. at
    b = (d_a + d_b)/(g_a + g_b); the diagonal a = b contributes the plain
    pairwise slopes.  Scanning that candidate set is therefore exact.
    Ties break on smaller |b|, then smaller b.
    """
    ii, jj = np.triu_indices(x.size, 1)
    g = x[jj] - x[ii]
    d = y[jj] - y[ii]
    cands = np.unique((d[:, None] + d[None, :]) / (g[:, None] + g[None, :]))
    best_kth = np.inf
    best_b = np.nan
    for lo in range(0, cands.size, 8192):
        chunk = cands[lo : lo + 8192]
        vals = np.abs(d[None, :] - chunk[:, None] * g[None, :])
        kth = np.partition(vals, k - 1, axis=1)[:, k - 1]
        i = _pick((kth, np.abs(chunk), chunk))
        if (kth[i], abs(chunk[i]), chunk[i]) < (best_kth, abs(best_b), best_b):
            best_kth = float(kth[i])
            best_b = float(chunk[i])
    return best_b, best_kth


def rdepth(r: np.ndarray) -> int:
    """Regression depth of a fit given its residuals in x order.

    Scans every split of the window; on each side, residuals of either
    sign count non-strictly (a zero residual blocks both tilting
    directions), so an exact fit has depth equal to the window size.
    """
    le = np.cumsum(r <= 0.0)
    ge = np.cumsum(r >= 0.0)
    d1 = le + (ge[-1] - ge)
    d2 = ge + (le[-1] - le)
    return int(min(d1.min(), d2.min()))


def dr_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, int]:
    """Deepest-regression fit over candidate lines through all point pairs.

    Ties break on smaller |median residual|, then lexicographic
    coefficients.
    """
    n = x.size
    ii, jj = np.triu_indices(n, 1)
    b1 = (y[jj] - y[ii]) / (x[jj] - x[ii])
    b0 = y[ii] - b1 * x[ii]
    r = y[None, :] - b0[:, None] - b1[:, None] * x[None, :]
    # the defining pair lies on the line exactly; depth counts zeros on both
    # sides, so rounding noise there must not flip a sign
    rows = np.arange(ii.size)
    r[rows, ii] = 0.0
    r[rows, jj] = 0.0
    le = np.cumsum(r <= 0.0, axis=1)
    ge = np.cumsum(r >= 0.0, axis=1)
    d1 = le + (ge[:, -1:] - ge)
    d2 = ge + (le[:, -1:] - le)
    depth = np.minimum(d1, d2).min(axis=1)
    med = np.abs(np.median(r, axis=1))
    best = _pick((-depth, med, b0, b1))
    return float(b0[best]), float(b1[best]), int(depth[best])
