"""Cumulative co-authorship graph snapshots.

One immutable edge list annotated with first-seen bin indices backs every
snapshot; queries select edges by bin instead of materializing per-bin
copies, which keeps the memory footprint linear in the number of unique
collaboration pairs (the target envelope is ~1e6 authors / ~1e8 pairs).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .ingest import PublicationRecord, TimeBin

STORE_FORMAT_VERSION = 1

_ARRAYS_FILE = "arrays.npz"
_AUTHORS_FILE = "authors.txt"
_META_FILE = "meta.json"


@dataclass(frozen=True)
class DegreeHistogram:
    """Degree -> author count at one cumulative snapshot."""

    bin: int
    counts: dict[int, int]

    def total_authors(self) -> int:
        return sum(self.counts.values())

    def items(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())


class SnapshotSeries:
    """Immutable store of the cumulative co-authorship network per bin.

    Authors are indexed densely in sorted-id order, so the dense index is
    also the deterministic tie-break order used elsewhere.  Edges are
    unordered pairs stored once with the earliest bin in which any paper
    contained the pair; a per-edge paper count is kept as well.
    """

    def __init__(
        self,
        authors: Sequence[str],
        node_first_seen: np.ndarray,
        edge_src: np.ndarray,
        edge_dst: np.ndarray,
        edge_first_seen: np.ndarray,
        edge_papers: np.ndarray,
        bins: Sequence[TimeBin],
    ):
        self.authors = list(authors)
        self.node_first_seen = node_first_seen
        self.edge_src = edge_src
        self.edge_dst = edge_dst
        self.edge_first_seen = edge_first_seen
        self.edge_papers = edge_papers
        self.bins = list(bins)
        self._index = {a: i for i, a in enumerate(self.authors)}
        self._degree_cache: dict[int, np.ndarray] = {}

    # --- construction -------------------------------------------------

    @classmethod
    def build(
        cls, records: Iterable[PublicationRecord], bins: Sequence[TimeBin]
    ) -> "SnapshotSeries":
        records = list(records)
        n_bins = len(bins)
        for r in records:
            if r.bin is None:
                raise ValueError(f"record {r.paper_id} has no bin assigned")
            if not 0 <= r.bin < n_bins:
                raise ValueError(f"record {r.paper_id} bin {r.bin} out of range")

        authors = sorted({a for r in records for a in r.author_ids})
        index = {a: i for i, a in enumerate(authors)}
        n = len(authors)

        node_fs = np.full(n, np.iinfo(np.int32).max, dtype=np.int32)
        # papers grouped by team size so pair expansion is one vectorized
        # triu-indexing per size instead of a per-paper combinations loop
        by_size: dict[int, tuple[list[list[int]], list[int]]] = {}
        for r in records:
            idx = sorted(index[a] for a in r.author_ids)
            for i in idx:
                if r.bin < node_fs[i]:
                    node_fs[i] = r.bin
            if len(idx) >= 2:
                rows, row_bins = by_size.setdefault(len(idx), ([], []))
                rows.append(idx)
                row_bins.append(r.bin)

        src_parts, dst_parts, bin_parts = [], [], []
        for size, (rows, row_bins) in by_size.items():
            m = np.asarray(rows, dtype=np.int64)
            iu0, iu1 = np.triu_indices(size, k=1)
            src_parts.append(m[:, iu0].ravel())
            dst_parts.append(m[:, iu1].ravel())
            bin_parts.append(np.repeat(np.asarray(row_bins, dtype=np.int32), len(iu0)))

        if src_parts:
            src = np.concatenate(src_parts)
            dst = np.concatenate(dst_parts)
            ebin = np.concatenate(bin_parts)
            key = (src.astype(np.uint64) << np.uint64(32)) | dst.astype(np.uint64)
            order = np.argsort(key)
            key = key[order]
            ebin = ebin[order]
            boundary = np.empty(len(key), dtype=bool)
            boundary[0] = True
            np.not_equal(key[1:], key[:-1], out=boundary[1:])
            starts = np.flatnonzero(boundary)
            uniq = key[starts]
            first_seen = np.minimum.reduceat(ebin, starts).astype(np.int32)
            counts = np.diff(np.append(starts, len(key))).astype(np.int32)
            edge_src = (uniq >> np.uint64(32)).astype(np.int32)
            edge_dst = (uniq & np.uint64(0xFFFFFFFF)).astype(np.int32)
        else:
            edge_src = np.empty(0, dtype=np.int32)
            edge_dst = np.empty(0, dtype=np.int32)
            first_seen = np.empty(0, dtype=np.int32)
            counts = np.empty(0, dtype=np.int32)

        return cls(authors, node_fs, edge_src, edge_dst, first_seen, counts, bins)

    # --- basic queries --------------------------------------------------

    @property
    def n_authors(self) -> int:
        return len(self.authors)

    @property
    def n_edges(self) -> int:
        return len(self.edge_src)

    @property
    def n_bins(self) -> int:
        return len(self.bins)

    def author_index(self, author: str) -> int:
        return self._index[author]

    def _check_bin(self, b: int) -> None:
        if not 0 <= b < self.n_bins:
            raise ValueError(f"bin {b} out of range [0, {self.n_bins})")

    def present_mask(self, b: int) -> np.ndarray:
        self._check_bin(b)
        return self.node_first_seen <= b

    def node_count(self, b: int) -> int:
        return int(np.count_nonzero(self.present_mask(b)))

    def link_count(self, b: int) -> int:
        self._check_bin(b)
        return int(np.count_nonzero(self.edge_first_seen <= b))

    def cumulative_counts(self) -> list[tuple[TimeBin, int, int]]:
        """Per bin, the node and link counts of the cumulative snapshot."""
        b = self.n_bins
        node_cum = np.cumsum(np.bincount(self.node_first_seen, minlength=b)[:b])
        edge_cum = np.cumsum(np.bincount(self.edge_first_seen, minlength=b)[:b])
        return [
            (tb, int(node_cum[i]), int(edge_cum[i])) for i, tb in enumerate(self.bins)
        ]

    def degrees(self, b: int) -> np.ndarray:
        """Degree of every author index at snapshot `b` (0 if absent)."""
        self._check_bin(b)
        cached = self._degree_cache.get(b)
        if cached is None:
            active = self.edge_first_seen <= b
            cached = np.bincount(
                self.edge_src[active], minlength=self.n_authors
            ) + np.bincount(self.edge_dst[active], minlength=self.n_authors)
            self._degree_cache[b] = cached
        return cached

    def degree_histogram(self, b: int) -> DegreeHistogram:
        """Degree distribution over authors present at snapshot `b`."""
        present = self.present_mask(b)
        deg = self.degrees(b)[present]
        counts = np.bincount(deg) if len(deg) else np.empty(0, dtype=np.int64)
        return DegreeHistogram(
            bin=b, counts={int(k): int(c) for k, c in enumerate(counts) if c}
        )

    def degree_at(self, b: int, author: str) -> int:
        """Distinct-collaborator count of `author` at snapshot `b`."""
        self._check_bin(b)
        i = self._index[author]
        if self.node_first_seen[i] > b:
            raise ValueError(f"author {author!r} not present at bin {b}")
        return int(self.degrees(b)[i])

    # --- deltas ----------------------------------------------------------

    def _check_pair(self, t1: int, t2: int) -> None:
        self._check_bin(t1)
        self._check_bin(t2)
        if t1 >= t2:
            raise ValueError(f"need t1 < t2, got ({t1}, {t2})")

    def delta_edge_arrays(
        self, t1: int, t2: int
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Index arrays for edges first seen in (t1, t2]).

        Returns (newcomer_old, newcomer_new, internal_a, internal_b) where
        the first two cover edges with exactly one endpoint already present
        at t1 (old endpoint first) and the last two cover edges between two
        authors both present at t1.
        """
        self._check_pair(t1, t2)
        in_delta = (self.edge_first_seen > t1) & (self.edge_first_seen <= t2)
        src = self.edge_src[in_delta]
        dst = self.edge_dst[in_delta]
        old = self.node_first_seen <= t1
        src_old = old[src]
        dst_old = old[dst]
        mixed = src_old ^ dst_old
        both = src_old & dst_old
        old_ep = np.where(src_old[mixed], src[mixed], dst[mixed])
        new_ep = np.where(src_old[mixed], dst[mixed], src[mixed])
        return old_ep, new_ep, src[both], dst[both]

    def delta_newcomer_edges(self, t1: int, t2: int) -> list[tuple[str, str]]:
        """Edges first seen in (t1, t2] joining an old author (listed first)
        to a newcomer, sorted lexicographically."""
        old_ep, new_ep, _, _ = self.delta_edge_arrays(t1, t2)
        pairs = [(self.authors[i], self.authors[j]) for i, j in zip(old_ep, new_ep)]
        return sorted(pairs)

    def delta_internal_edges(self, t1: int, t2: int) -> list[tuple[str, str]]:
        """New edges in (t1, t2] between two authors already present at t1."""
        _, _, a, b = self.delta_edge_arrays(t1, t2)
        pairs = [
            tuple(sorted((self.authors[i], self.authors[j]))) for i, j in zip(a, b)
        ]
        return sorted(pairs)

    # --- persistence ------------------------------------------------------

    def save(self, store_dir: str | Path) -> None:
        store = Path(store_dir)
        store.mkdir(parents=True, exist_ok=True)
        np.savez(
            store / _ARRAYS_FILE,
            format_version=np.asarray([STORE_FORMAT_VERSION], dtype=np.int32),
            node_first_seen=self.node_first_seen,
            edge_src=self.edge_src,
            edge_dst=self.edge_dst,
            edge_first_seen=self.edge_first_seen,
            edge_papers=self.edge_papers,
        )
        with open(store / _AUTHORS_FILE, "w", encoding="utf-8") as fh:
            for author in self.authors:
                fh.write(author)
                fh.write("\n")
        meta = {
            "format_version": STORE_FORMAT_VERSION,
            "n_authors": self.n_authors,
            "n_edges": self.n_edges,
            "bins": [b.to_dict() for b in self.bins],
        }
        with open(store / _META_FILE, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)

    @classmethod
    def load(cls, store_dir: str | Path) -> "SnapshotSeries":
        store = Path(store_dir)
        with open(store / _META_FILE, encoding="utf-8") as fh:
            meta = json.load(fh)
        if meta.get("format_version") != STORE_FORMAT_VERSION:
            raise ValueError(
                f"unsupported snapshot store version: {meta.get('format_version')!r}"
            )
        with np.load(store / _ARRAYS_FILE) as arrays:
            if arrays["format_version"][0] != STORE_FORMAT_VERSION:
                raise ValueError("snapshot store arrays/meta version mismatch")
            node_fs = arrays["node_first_seen"]
            src = arrays["edge_src"]
            dst = arrays["edge_dst"]
            efs = arrays["edge_first_seen"]
            epapers = arrays["edge_papers"]
        with open(store / _AUTHORS_FILE, encoding="utf-8") as fh:
            authors = [line.rstrip("\n") for line in fh]
        bins = [TimeBin.from_dict(d) for d in meta["bins"]]
        return cls(authors, node_fs, src, dst, efs, epapers, bins)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SnapshotSeries):
            return NotImplemented
        return (
            self.authors == other.authors
            and self.bins == other.bins
            and np.array_equal(self.node_first_seen, other.node_first_seen)
            and np.array_equal(self.edge_src, other.edge_src)
            and np.array_equal(self.edge_dst, other.edge_dst)
            and np.array_equal(self.edge_first_seen, other.edge_first_seen)
            and np.array_equal(self.edge_papers, other.edge_papers)
        )


def build_snapshot_series(
    records: Iterable[PublicationRecord], bins: Sequence[TimeBin]
) -> SnapshotSeries:
    """Build the cumulative snapshot series from binned records.

    Every paper contributes all unordered author pairs as edges; an edge's
    first-seen bin is the earliest bin of any paper containing the pair.
    The result is independent of record order.
    """
    return SnapshotSeries.build(records, bins)
