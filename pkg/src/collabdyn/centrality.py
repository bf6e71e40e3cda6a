"""Degree centrality, percentile cohorts, and collaborator averages.

All operations are pure functions over an immutable SnapshotSeries.
Centrality of an author is degree / (n - 1) with n the node count of the
snapshot, so it is undefined for single-node snapshots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .snapshots import SnapshotSeries

SIDES = ("top", "tail")
DEFAULT_COHORTS: tuple[tuple[float, str], ...] = (
    (0.10, "top"),
    (0.20, "top"),
    (0.20, "tail"),
)


@dataclass(frozen=True)
class CohortSpec:
    """A percentile cohort at one snapshot: e.g. top 10% by centrality."""

    fraction: float
    side: str
    bin: int

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}, got {self.side!r}")


@dataclass(frozen=True)
class CohortStats:
    bin: int
    fraction: float
    side: str
    size: int
    mean_centrality: float
    collaborator_mean_centrality: float | None


def degree_centrality(series: SnapshotSeries, b: int, author: str) -> float:
    """Degree of `author` at snapshot `b`, normalized by n - 1."""
    n = series.node_count(b)
    if n < 2:
        raise ValueError(f"degree centrality undefined at bin {b}: n = {n}")
    return series.degree_at(b, author) / (n - 1)


def _ranked_indices(
    series: SnapshotSeries, b: int, side: str, exclude_isolated: bool = False
) -> np.ndarray:
    present = series.present_mask(b)
    deg = series.degrees(b)
    if exclude_isolated:
        present = present & (deg > 0)
    idx = np.flatnonzero(present)
    deg = deg[idx]
    # idx is ascending author-id order already, so it is the tie-break key
    if side == "top":
        order = np.lexsort((idx, -deg))
    else:
        order = np.lexsort((idx, deg))
    return idx[order]


def select_cohort(series: SnapshotSeries, spec: CohortSpec) -> list[str]:
    """Authors in the cohort, ranked; deterministic under input order.

    Ranking is by degree centrality (descending for "top", ascending for
    "tail") with ties broken by ascending author id; the cohort holds
    ceil(fraction * n) authors.
    """
    ranked = _ranked_indices(series, spec.bin, spec.side)
    if len(ranked) == 0:
        raise ValueError(f"snapshot at bin {spec.bin} is empty")
    size = math.ceil(spec.fraction * len(ranked))
    return [series.authors[i] for i in ranked[:size]]


def cohort_mean_centrality(
    series: SnapshotSeries, cohort: Sequence[str], b: int
) -> float:
    """Arithmetic mean of the members' degree centrality at snapshot `b`."""
    if not cohort:
        raise ValueError("cohort is empty")
    n = series.node_count(b)
    if n < 2:
        raise ValueError(f"degree centrality undefined at bin {b}: n = {n}")
    deg = series.degrees(b)
    members = np.asarray([series.author_index(a) for a in cohort])
    return float(deg[members].mean() / (n - 1))


def _neighbor_degree_sums(series: SnapshotSeries, b: int) -> np.ndarray:
    """For every author, the sum of its neighbors' degrees at snapshot `b`."""
    active = series.edge_first_seen <= b
    src = series.edge_src[active]
    dst = series.edge_dst[active]
    deg = series.degrees(b).astype(np.float64)
    n = series.n_authors
    return np.bincount(src, weights=deg[dst], minlength=n) + np.bincount(
        dst, weights=deg[src], minlength=n
    )


def collaborator_mean_centrality(
    series: SnapshotSeries,
    cohort: Sequence[str],
    b: int,
    *,
    pooled: bool = False,
    _neighbor_sums: np.ndarray | None = None,
) -> float:
    """Average degree centrality of the cohort members' collaborators.

    Default is the mean over members of each member's neighbor-mean;
    `pooled=True` instead averages over all neighbor occurrences at once.
    Members without collaborators are excluded; if every member is
    isolated the statistic is undefined and a ValueError is raised.
    """
    if not cohort:
        raise ValueError("cohort is empty")
    n = series.node_count(b)
    if n < 2:
        raise ValueError(f"degree centrality undefined at bin {b}: n = {n}")
    sums = _neighbor_sums if _neighbor_sums is not None else _neighbor_degree_sums(series, b)
    deg = series.degrees(b)
    members = np.asarray([series.author_index(a) for a in cohort])
    mdeg = deg[members]
    connected = mdeg > 0
    if not connected.any():
        raise ValueError("every cohort member is isolated; no collaborators")
    if pooled:
        return float(sums[members].sum() / mdeg.sum() / (n - 1))
    per_member = sums[members[connected]] / mdeg[connected]
    return float(per_member.mean() / (n - 1))


def cohort_stats_table(
    series: SnapshotSeries,
    cohorts: Sequence[tuple[float, str]] = DEFAULT_COHORTS,
    *,
    exclude_isolated: bool = False,
    pooled: bool = False,
) -> list[CohortStats]:
    """Cohort and collaborator centrality means for every bin and cohort.

    Bins with fewer than two present authors are skipped (centrality is
    undefined there); a cohort whose members are all isolated gets a None
    collaborator mean.
    """
    rows: list[CohortStats] = []
    for b in range(series.n_bins):
        n = series.node_count(b)
        if n < 2:
            continue
        deg = series.degrees(b)
        sums = _neighbor_degree_sums(series, b)
        for fraction, side in cohorts:
            ranked = _ranked_indices(series, b, side, exclude_isolated)
            if len(ranked) == 0:
                continue
            size = math.ceil(fraction * len(ranked))
            members = ranked[:size]
            mean_c = float(deg[members].mean() / (n - 1))
            mdeg = deg[members]
            connected = mdeg > 0
            if connected.any():
                if pooled:
                    collab = float(sums[members].sum() / mdeg.sum() / (n - 1))
                else:
                    collab = float((sums[members[connected]] / mdeg[connected]).mean() / (n - 1))
            else:
                collab = None
            rows.append(CohortStats(b, fraction, side, int(size), mean_c, collab))
    return rows
