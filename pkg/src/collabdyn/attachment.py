"""Attachment probability estimation between two snapshots.

Degrees are always measured at the earlier snapshot t1; events are edges
whose first-seen bin falls in (t1, t2].  Newcomer attachment counts
(old author, newcomer) edges per old-degree class; internal link formation
counts new edges between two old authors per unordered degree pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .snapshots import SnapshotSeries

NEWCOMER_COUNT_MODES = ("edges", "distinct")
PAIR_COUNT_MODES = ("combinations", "literal")
PAIRING_MODES = ("consecutive", "cumulative")


class AttachmentRow(NamedTuple):
    k: int
    events: int
    population: int
    prob: float


class PairLinkRow(NamedTuple):
    ki: int
    kj: int
    links: int
    pairs: int
    prob: float


class ProductRow(NamedTuple):
    x: int
    links: int
    pairs: int
    prob: float


@dataclass(frozen=True, eq=False)
class AttachmentTable:
    """Per degree class k at t1: newcomer-edge events V, population N, P=V/N.

    Rows cover every degree class with at least one old author, including
    classes that attracted nothing.  P can exceed 1: one author may attract
    several newcomers in a single period.
    """

    t1: int
    t2: int
    k: np.ndarray
    events: np.ndarray
    population: np.ndarray

    @property
    def prob(self) -> np.ndarray:
        return self.events / self.population

    def rows(self) -> Iterator[AttachmentRow]:
        for k, v, n, p in zip(self.k, self.events, self.population, self.prob):
            yield AttachmentRow(int(k), int(v), int(n), float(p))


@dataclass(frozen=True, eq=False)
class PairLinkTable:
    """Per unordered degree pair (ki <= kj) at t1: new internal links over
    the number of author pairs in those degree classes."""

    t1: int
    t2: int
    ki: np.ndarray
    kj: np.ndarray
    links: np.ndarray
    pairs: np.ndarray

    @property
    def prob(self) -> np.ndarray:
        return self.links / self.pairs

    def rows(self) -> Iterator[PairLinkRow]:
        for ki, kj, l, c, p in zip(self.ki, self.kj, self.links, self.pairs, self.prob):
            yield PairLinkRow(int(ki), int(kj), int(l), int(c), float(p))


@dataclass(frozen=True, eq=False)
class ProductLinkTable:
    """PairLinkTable pooled by degree product x = ki * kj."""

    t1: int
    t2: int
    x: np.ndarray
    links: np.ndarray
    pairs: np.ndarray

    @property
    def prob(self) -> np.ndarray:
        return self.links / self.pairs

    def rows(self) -> Iterator[ProductRow]:
        for x, l, c, p in zip(self.x, self.links, self.pairs, self.prob):
            yield ProductRow(int(x), int(l), int(c), float(p))


def newcomer_attachment_table(
    series: SnapshotSeries, t1: int, t2: int, *, newcomer_count: str = "edges"
) -> AttachmentTable:
    """Probability of attracting newcomers per old-degree class.

    With `newcomer_count="edges"` (default) every (old author, newcomer)
    edge is one event, so events sum to the newcomer-edge count of the
    period; with "distinct" a newcomer attaching to several old authors of
    the same degree counts once for that degree class.
    """
    if newcomer_count not in NEWCOMER_COUNT_MODES:
        raise ValueError(f"newcomer_count must be one of {NEWCOMER_COUNT_MODES}")
    old_ep, new_ep, _, _ = series.delta_edge_arrays(t1, t2)
    deg = series.degrees(t1)
    old_nodes = series.present_mask(t1)
    pop = np.bincount(deg[old_nodes]) if old_nodes.any() else np.empty(0, np.int64)
    n_classes = len(pop)
    event_deg = deg[old_ep]
    if newcomer_count == "distinct":
        keys = event_deg.astype(np.uint64) << np.uint64(32)
        keys |= new_ep.astype(np.uint64)
        event_deg = (np.unique(keys) >> np.uint64(32)).astype(np.int64)
    events = np.bincount(event_deg, minlength=n_classes) if n_classes else np.empty(0, np.int64)
    ks = np.flatnonzero(pop)
    return AttachmentTable(
        t1=t1,
        t2=t2,
        k=ks.astype(np.int64),
        events=events[ks].astype(np.int64),
        population=pop[ks].astype(np.int64),
    )


def internal_link_table(
    series: SnapshotSeries,
    t1: int,
    t2: int,
    *,
    pair_count: str = "combinations",
    exclude_existing: bool = False,
) -> PairLinkTable:
    """Probability of forming a new link per unordered old-degree pair.

    The population of a pair (ki, kj) is N(ki) * N(kj) for ki != kj.  For
    ki == kj the default counts unordered combinations C(N, 2); the
    "literal" mode uses N * N as the formula reads.  `exclude_existing`
    subtracts pairs already linked at t1 from the population, leaving only
    the pairs with capacity to form a new link.
    """
    if pair_count not in PAIR_COUNT_MODES:
        raise ValueError(f"pair_count must be one of {PAIR_COUNT_MODES}")
    _, _, int_a, int_b = series.delta_edge_arrays(t1, t2)
    deg = series.degrees(t1)
    old_nodes = series.present_mask(t1)
    pop = np.bincount(deg[old_nodes]) if old_nodes.any() else np.empty(0, np.int64)
    d_vals = np.flatnonzero(pop).astype(np.int64)
    d_counts = pop[d_vals].astype(np.int64)

    n_deg = len(d_vals)
    ii, jj = np.triu_indices(n_deg, k=0)
    ki = d_vals[ii]
    kj = d_vals[jj]
    pairs = d_counts[ii] * d_counts[jj]
    diag = ii == jj
    if pair_count == "combinations":
        c = d_counts[ii[diag]]
        pairs[diag] = c * (c - 1) // 2

    def _pair_hist(a_idx: np.ndarray, b_idx: np.ndarray) -> np.ndarray:
        """Count edges per (ki, kj) grid cell given endpoint index arrays."""
        counts = np.zeros(len(ki), dtype=np.int64)
        if len(a_idx) == 0:
            return counts
        da, db = deg[a_idx], deg[b_idx]
        lo = np.minimum(da, db).astype(np.uint64)
        hi = np.maximum(da, db).astype(np.uint64)
        keys = (lo << np.uint64(32)) | hi
        uniq, cnt = np.unique(keys, return_counts=True)
        grid_keys = (ki.astype(np.uint64) << np.uint64(32)) | kj.astype(np.uint64)
        pos = np.searchsorted(grid_keys, uniq)
        counts[pos] = cnt
        return counts

    links = _pair_hist(int_a, int_b)
    if exclude_existing:
        at_t1 = series.edge_first_seen <= t1
        pairs = pairs - _pair_hist(series.edge_src[at_t1], series.edge_dst[at_t1])

    keep = pairs > 0
    return PairLinkTable(
        t1=t1, t2=t2, ki=ki[keep], kj=kj[keep], links=links[keep], pairs=pairs[keep]
    )


def collapse_pair_table(table: PairLinkTable) -> ProductLinkTable:
    """Pool a pair table by degree product: P(x) = sum L / sum pairs over
    all (ki, kj) with ki * kj = x."""
    products = table.ki * table.kj
    x, inverse = np.unique(products, return_inverse=True)
    links = np.zeros(len(x), dtype=np.int64)
    pairs = np.zeros(len(x), dtype=np.int64)
    np.add.at(links, inverse, table.links)
    np.add.at(pairs, inverse, table.pairs)
    return ProductLinkTable(t1=table.t1, t2=table.t2, x=x, links=links, pairs=pairs)


def bin_pairs(n_bins: int, pairing: str = "consecutive") -> list[tuple[int, int]]:
    """Snapshot pairs to analyze: consecutive (t, t+1) deltas, or cumulative
    deltas from the first bin (0, t)."""
    if pairing not in PAIRING_MODES:
        raise ValueError(f"pairing must be one of {PAIRING_MODES}")
    if pairing == "consecutive":
        return [(t, t + 1) for t in range(n_bins - 1)]
    return [(0, t) for t in range(1, n_bins)]
