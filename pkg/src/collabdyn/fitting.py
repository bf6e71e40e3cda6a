"""Logarithmic binning and log-log least-squares slope fitting.

Points are grouped into multiplicative bins [base^i, base^(i+1)); each
bin's y is the weight-weighted mean of its members and its x is the
geometric mean of the bin bounds.  Slopes come from ordinary least squares
of log10(y) on log10(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .attachment import AttachmentTable, ProductLinkTable
from .snapshots import DegreeHistogram

DEFAULT_BASE = 10 ** 0.1
DEFAULT_MIN_COUNT = 5


class FitError(ValueError):
    """Raised when the data cannot support a slope fit."""


@dataclass(frozen=True)
class BinnedPoint:
    x: float
    y: float
    support: float


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def log_bin(
    xs: Sequence[float] | np.ndarray,
    ys: Sequence[float] | np.ndarray,
    weights: Sequence[float] | np.ndarray | None = None,
    *,
    base: float = DEFAULT_BASE,
    min_count: float = DEFAULT_MIN_COUNT,
) -> list[BinnedPoint]:
    """Group (x, y, weight) rows into multiplicative x-bins.

    Bins whose total weight falls below `min_count`, or whose weighted mean
    y is zero, are dropped.  Raises FitError if nothing survives.
    """
    if base <= 1.0:
        raise ValueError(f"base must be > 1, got {base}")
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape:
        raise ValueError("xs and ys must have the same length")
    if np.any(xs <= 0):
        raise ValueError("x values must be positive")
    if np.any(ys < 0):
        raise ValueError("y values must be non-negative")
    w = np.ones_like(xs) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != xs.shape:
        raise ValueError("weights must match xs in length")

    # small epsilon keeps exact powers of the base from landing one bin low
    idx = np.floor(np.log(xs) / np.log(base) + 1e-9).astype(np.int64)
    uniq, inverse = np.unique(idx, return_inverse=True)
    tot_w = np.bincount(inverse, weights=w)
    tot_wy = np.bincount(inverse, weights=w * ys)

    points: list[BinnedPoint] = []
    for i, exp in enumerate(uniq):
        if tot_w[i] < min_count or tot_w[i] <= 0:
            continue
        mean_y = tot_wy[i] / tot_w[i]
        if mean_y <= 0:
            continue
        center = float(base ** (exp + 0.5))
        points.append(BinnedPoint(center, float(mean_y), float(tot_w[i])))
    if not points:
        raise FitError("no bins survive the weight and positivity thresholds")
    return points


def fit_slope(points: Sequence[BinnedPoint]) -> SlopeFit:
    """Ordinary least squares of log10(y) on log10(x)."""
    if len(points) < 2:
        raise FitError(f"need at least 2 points to fit, got {len(points)}")
    lx = np.log10([p.x for p in points])
    ly = np.log10([p.y for p in points])
    mx, my = lx.mean(), ly.mean()
    sxx = np.sum((lx - mx) ** 2)
    if sxx == 0:
        raise FitError("x values are all in the same bin; slope undefined")
    slope = float(np.sum((lx - mx) * (ly - my)) / sxx)
    intercept = float(my - slope * mx)
    residuals = ly - (slope * lx + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((ly - my) ** 2))
    if ss_tot == 0:
        r_squared = 1.0 if ss_res < 1e-300 else 0.0
    else:
        r_squared = max(0.0, 1.0 - ss_res / ss_tot)
    return SlopeFit(slope, intercept, r_squared, len(points))


def fit_log_binned(
    xs,
    ys,
    weights=None,
    *,
    base: float = DEFAULT_BASE,
    min_count: float = DEFAULT_MIN_COUNT,
) -> SlopeFit:
    return fit_slope(log_bin(xs, ys, weights, base=base, min_count=min_count))


def fit_degree_exponent(
    hist: DegreeHistogram | Mapping[int, float],
    *,
    base: float = DEFAULT_BASE,
    min_count: float = DEFAULT_MIN_COUNT,
) -> SlopeFit:
    """Log-log slope of frequency vs degree for a degree histogram.

    Degree 0 is excluded (log undefined); rows are weighted by their author
    counts.  For a scale-free network the slope is the negated power-law
    exponent.
    """
    counts = hist.counts if isinstance(hist, DegreeHistogram) else hist
    rows = [(k, c) for k, c in counts.items() if k >= 1 and c > 0]
    if len(rows) < 2:
        raise FitError("histogram needs at least 2 positive-count degrees >= 1")
    ks = [k for k, _ in rows]
    cs = [c for _, c in rows]
    return fit_log_binned(ks, cs, cs, base=base, min_count=min_count)


def fit_attachment_slope(
    table: AttachmentTable,
    *,
    base: float = DEFAULT_BASE,
    min_count: float = DEFAULT_MIN_COUNT,
) -> SlopeFit:
    """Log-log slope of newcomer-attachment probability vs degree.

    Degree-0 rows cannot appear on a log axis and are skipped; bins are
    weighted by the old-author population so the pooled bin value is
    (sum events) / (sum population).
    """
    keep = table.k >= 1
    if not keep.any():
        raise FitError("attachment table has no rows with k >= 1")
    return fit_log_binned(
        table.k[keep], table.prob[keep], table.population[keep],
        base=base, min_count=min_count,
    )


def fit_product_slope(
    table: ProductLinkTable,
    *,
    base: float = DEFAULT_BASE,
    min_count: float = DEFAULT_MIN_COUNT,
) -> SlopeFit:
    """Log-log slope of internal-link probability vs degree product."""
    keep = table.x >= 1
    if not keep.any():
        raise FitError("product table has no rows with x >= 1")
    return fit_log_binned(
        table.x[keep], table.prob[keep], table.pairs[keep],
        base=base, min_count=min_count,
    )
