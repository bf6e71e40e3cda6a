"""Synthetic team-based collaboration corpus with a known attachment kernel.

Each paper fills `team_size` slots: `newcomers_per_paper` fresh authors
plus incumbents drawn without replacement with probability proportional to
(degree + 1) ** alpha.  The +1 keeps degree-0 authors selectable.  Papers
become cliques, and dates advance so `papers_per_bin` land in each
calendar quarter.  Everything is deterministic given the seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from itertools import combinations

from .ingest import PublicationRecord, assign_time_bins


class _WeightedIndex:
    """Growable Fenwick tree for weighted sampling with O(log n) updates.

    Leaf weights are kept in a separate exact array; the tree only carries
    the aggregates used for prefix search.
    """

    def __init__(self):
        self._tree: list[float] = []
        self._weights: list[float] = []

    def __len__(self) -> int:
        return len(self._weights)

    def append(self, weight: float) -> None:
        self._weights.append(weight)
        self._tree.append(weight)
        i = len(self._tree) - 1
        j = i + 1
        lsb = j & -j
        k = 1
        while k < lsb:
            self._tree[i] += self._tree[i - k]
            k <<= 1

    def set_weight(self, idx: int, weight: float) -> None:
        delta = weight - self._weights[idx]
        self._weights[idx] = weight
        j = idx + 1
        n = len(self._tree)
        while j <= n:
            self._tree[j - 1] += delta
            j += j & -j

    def weight(self, idx: int) -> float:
        return self._weights[idx]

    def total(self) -> float:
        s = 0.0
        j = len(self._tree)
        while j > 0:
            s += self._tree[j - 1]
            j -= j & -j
        return s

    def sample(self, target: float) -> int:
        """Smallest index i with prefix_sum(i + 1) > target."""
        n = len(self._tree)
        pos = 0
        bit = 1
        while bit << 1 <= n:
            bit <<= 1
        rem = target
        while bit:
            nxt = pos + bit
            if nxt <= n and self._tree[nxt - 1] <= rem:
                rem -= self._tree[nxt - 1]
                pos = nxt
            bit >>= 1
        if pos >= n or self._weights[pos] <= 0.0:
            # float round-off at the prefix boundary; fall back to the
            # nearest positive-weight leaf deterministically
            for i in range(min(pos, n - 1), -1, -1):
                if self._weights[i] > 0.0:
                    return i
            for i in range(min(pos, n - 1) + 1, n):
                if self._weights[i] > 0.0:
                    return i
            raise ValueError("sampled from an empty weight index")
        return pos


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs of the growth process; see module docstring for the mechanism.

    `team_size` is either a fixed integer or an inclusive (low, high) range
    sampled uniformly per paper.
    """

    papers_total: int
    papers_per_bin: int
    team_size: int | tuple[int, int] = 4
    newcomers_per_paper: int = 1
    alpha: float = 1.0
    seed: int = 0
    start: date = field(default=date(2020, 1, 1))

    def __post_init__(self):
        if self.papers_total < 0:
            raise ValueError("papers_total must be >= 0")
        if self.papers_per_bin < 1:
            raise ValueError("papers_per_bin must be >= 1")
        lo, hi = self.team_range
        if lo < 1 or hi < lo:
            raise ValueError(f"invalid team_size: {self.team_size!r}")
        if not 0 <= self.newcomers_per_paper <= lo:
            raise ValueError("newcomers_per_paper must be in [0, min team size]")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")

    @property
    def team_range(self) -> tuple[int, int]:
        if isinstance(self.team_size, int):
            return self.team_size, self.team_size
        lo, hi = self.team_size
        return int(lo), int(hi)


def _quarter_start(d: date) -> date:
    return date(d.year, 3 * ((d.month - 1) // 3) + 1, 1)


def _quarter_span(start: date, offset: int) -> tuple[date, date]:
    """Start of the quarter `offset` quarters after the one containing
    `start`, and the first day of the quarter after it."""
    q0 = 4 * start.year + (start.month - 1) // 3 + offset
    y, q = divmod(q0, 4)
    y1, q1 = divmod(q0 + 1, 4)
    return date(y, 3 * q + 1, 1), date(y1, 3 * q1 + 1, 1)


def generate_team_corpus(params: GeneratorParams) -> list[PublicationRecord]:
    """Grow a corpus paper by paper and return quarter-binned records."""
    rng = random.Random(params.seed)
    sampler = _WeightedIndex()
    degrees: list[int] = []
    author_ids: list[str] = []
    # adjacency only matters when the kernel actually reads degrees
    track_degrees = params.alpha != 0.0
    edge_keys: set[int] = set()
    lo, hi = params.team_range

    def new_author() -> int:
        idx = len(author_ids)
        author_ids.append(f"A{idx:07d}")
        degrees.append(0)
        sampler.append(1.0)  # (0 + 1) ** alpha
        return idx

    records: list[PublicationRecord] = []
    for p in range(params.papers_total):
        team_size = lo if lo == hi else rng.randint(lo, hi)
        n_new = min(params.newcomers_per_paper, team_size)
        n_incumbent = team_size - n_new

        incumbents: list[int] = []
        saved: list[tuple[int, float]] = []
        for _ in range(n_incumbent):
            total = sampler.total()
            if len(incumbents) >= len(author_ids) or total <= 0.0:
                break  # pool exhausted; missing slots become newcomers
            idx = sampler.sample(rng.random() * total)
            incumbents.append(idx)
            saved.append((idx, sampler.weight(idx)))
            sampler.set_weight(idx, 0.0)

        members = incumbents + [new_author() for _ in range(team_size - len(incumbents))]

        if track_degrees:
            for a, b in combinations(sorted(members), 2):
                key = (a << 32) | b
                if key not in edge_keys:
                    edge_keys.add(key)
                    degrees[a] += 1
                    degrees[b] += 1
            for idx in members:
                sampler.set_weight(idx, float(degrees[idx] + 1) ** params.alpha)
        else:
            for idx, w in saved:
                sampler.set_weight(idx, w)

        quarter, offset_in_bin = divmod(p, params.papers_per_bin)
        q_start, q_next = _quarter_span(params.start, quarter)
        q_days = (q_next - q_start).days
        day = offset_in_bin * q_days // params.papers_per_bin
        records.append(
            PublicationRecord(
                paper_id=f"P{p:07d}",
                date=q_start + timedelta(days=min(day, q_days - 1)),
                author_ids=frozenset(author_ids[i] for i in members),
            )
        )

    binned, _ = assign_time_bins(records, "quarter")
    return binned
