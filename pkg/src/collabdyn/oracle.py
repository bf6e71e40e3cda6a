"""Brute-force reference implementations of every pipeline metric.

Deliberately naive: plain sets, dicts, and exact Fractions, with quadratic
author-pair enumeration.  A work guard refuses instances whose pair count
would make the oracle slow; it exists for equivalence testing on small
corpora, not for production use.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .attachment import bin_pairs
from .centrality import DEFAULT_COHORTS
from .ingest import PublicationRecord, TimeBin, validate_corpus

DEFAULT_MAX_PAIR_OPS = 10_000


class OracleLimitError(ValueError):
    """Instance exceeds the oracle's deliberate smallness guard."""


def _estimate_pair_ops(
    records: Sequence[PublicationRecord], n_bins: int, pairs: list[tuple[int, int]]
) -> int:
    per_paper = [len(r.author_ids) * (len(r.author_ids) - 1) // 2 for r in records]
    paper_ops = sum(p * (n_bins - (r.bin or 0)) for p, r in zip(per_paper, records))
    authors_by_bin: dict[int, set[str]] = {b: set() for b in range(n_bins)}
    for r in records:
        authors_by_bin[r.bin].update(r.author_ids)
    pop = 0
    seen: set[str] = set()
    pop_at: dict[int, int] = {}
    for b in range(n_bins):
        seen |= authors_by_bin[b]
        pop_at[b] = len(seen)
    enum_ops = sum(pop_at[t1] * (pop_at[t1] - 1) // 2 for t1, _ in pairs)
    return paper_ops + enum_ops


def brute_force_metrics(
    records: Sequence[PublicationRecord],
    bins: Sequence[TimeBin],
    *,
    cohorts: Sequence[tuple[float, str]] = DEFAULT_COHORTS,
    pairing: str = "consecutive",
    newcomer_count: str = "edges",
    pair_count: str = "combinations",
    exclude_existing: bool = False,
    pooled_collaborators: bool = False,
    exclude_isolated: bool = False,
    max_pair_ops: int = DEFAULT_MAX_PAIR_OPS,
) -> dict:
    """Recompute every snapshot, centrality, and attachment quantity by
    naive enumeration.  Probabilities and centralities are exact Fractions.
    """
    records = list(records)
    if not records:
        return {
            "bins": [],
            "cumulative_counts": [],
            "degrees": {},
            "histograms": {},
            "centralities": {},
            "cohorts": {},
            "newcomer_edges": {},
            "internal_edges": {},
            "attachment": {},
            "pair_links": {},
            "collapsed": {},
            "corpus_stats": validate_corpus([]).to_dict(),
        }
    for r in records:
        if r.bin is None:
            raise ValueError(f"record {r.paper_id} has no bin assigned")
    n_bins = len(bins)
    pairs = bin_pairs(n_bins, pairing)
    ops = _estimate_pair_ops(records, n_bins, pairs)
    if ops > max_pair_ops:
        raise OracleLimitError(
            f"instance needs ~{ops} author-pair operations (limit {max_pair_ops})"
        )

    node_first: dict[str, int] = {}
    pair_first: dict[tuple[str, str], int] = {}
    for r in sorted(records, key=lambda r: r.bin):
        for a in r.author_ids:
            node_first.setdefault(a, r.bin)
        for a, b in combinations(sorted(r.author_ids), 2):
            pair_first.setdefault((a, b), r.bin)

    def nodes_at(b: int) -> set[str]:
        return {a for a, fs in node_first.items() if fs <= b}

    def edges_at(b: int) -> set[tuple[str, str]]:
        return {e for e, fs in pair_first.items() if fs <= b}

    def adjacency(edges: set[tuple[str, str]], nodes: set[str]) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {a: set() for a in nodes}
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    report: dict = {
        "bins": [tb.label for tb in bins],
        "cumulative_counts": [],
        "degrees": {},
        "histograms": {},
        "centralities": {},
        "cohorts": {},
        "newcomer_edges": {},
        "internal_edges": {},
        "attachment": {},
        "pair_links": {},
        "collapsed": {},
        "corpus_stats": validate_corpus(records).to_dict(),
    }

    for b in range(n_bins):
        nodes = nodes_at(b)
        edges = edges_at(b)
        adj = adjacency(edges, nodes)
        deg = {a: len(adj[a]) for a in nodes}
        report["cumulative_counts"].append((bins[b].label, len(nodes), len(edges)))
        report["degrees"][b] = deg
        report["histograms"][b] = dict(Counter(deg.values()))
        n = len(nodes)
        if n >= 2:
            cent = {a: Fraction(deg[a], n - 1) for a in nodes}
            report["centralities"][b] = cent
            per_bin_cohorts = {}
            population = sorted(a for a in nodes if deg[a] > 0) if exclude_isolated else sorted(nodes)
            for fraction, side in cohorts:
                if not population:
                    continue
                if side == "top":
                    ranked = sorted(population, key=lambda a: (-deg[a], a))
                else:
                    ranked = sorted(population, key=lambda a: (deg[a], a))
                size = math.ceil(fraction * len(ranked))
                members = ranked[:size]
                mean_c = sum(cent[a] for a in members) / len(members)
                connected = [a for a in members if deg[a] > 0]
                if not connected:
                    collab = None
                elif pooled_collaborators:
                    collab = sum(cent[v] for a in members for v in adj[a]) / sum(
                        deg[a] for a in members
                    )
                else:
                    collab = sum(
                        sum(cent[v] for v in adj[a]) / deg[a] for a in connected
                    ) / len(connected)
                per_bin_cohorts[(fraction, side)] = {
                    "members": members,
                    "size": size,
                    "mean_centrality": mean_c,
                    "collaborator_mean_centrality": collab,
                }
            report["cohorts"][b] = per_bin_cohorts

    for t1, t2 in pairs:
        old = nodes_at(t1)
        deg1 = {a: 0 for a in old}
        for a, b in edges_at(t1):
            deg1[a] += 1
            deg1[b] += 1
        delta = [
            e for e, fs in pair_first.items() if t1 < fs <= t2
        ]
        newcomer, internal = [], []
        for a, b in delta:
            a_old, b_old = a in old, b in old
            if a_old and b_old:
                internal.append((a, b))
            elif a_old:
                newcomer.append((a, b))
            elif b_old:
                newcomer.append((b, a))
        report["newcomer_edges"][(t1, t2)] = sorted(newcomer)
        report["internal_edges"][(t1, t2)] = sorted(internal)

        pop = Counter(deg1.values())
        if newcomer_count == "distinct":
            # a newcomer joining several old authors of one degree class
            # counts once for that class
            events = Counter(k for k, _ in {(deg1[a], nb) for a, nb in newcomer})
        else:
            events = Counter(deg1[a] for a, _ in newcomer)
        report["attachment"][(t1, t2)] = {
            k: {"events": events.get(k, 0), "population": pop[k],
                "prob": Fraction(events.get(k, 0), pop[k])}
            for k in sorted(pop)
        }

        internal_set = set(internal)
        edges_t1 = edges_at(t1)
        links: Counter = Counter()
        capacity: Counter = Counter()
        for x, y in combinations(sorted(old), 2):
            key = tuple(sorted((deg1[x], deg1[y])))
            if exclude_existing and (x, y) in edges_t1:
                continue
            capacity[key] += 1
            if (x, y) in internal_set:
                links[key] += 1
        if pair_count == "literal":
            # enumeration counted C(N, 2) same-degree pairs; the literal
            # N * N formula needs the difference topped up
            for k in pop:
                capacity[(k, k)] += pop[k] * pop[k] - pop[k] * (pop[k] - 1) // 2
        pair_rows = {
            key: {"links": links.get(key, 0), "pairs": capacity[key],
                  "prob": Fraction(links.get(key, 0), capacity[key])}
            for key in sorted(capacity) if capacity[key] > 0
        }
        report["pair_links"][(t1, t2)] = pair_rows

        collapsed: dict[int, dict] = {}
        for (ki, kj), row in pair_rows.items():
            g = collapsed.setdefault(ki * kj, {"links": 0, "pairs": 0})
            g["links"] += row["links"]
            g["pairs"] += row["pairs"]
        report["collapsed"][(t1, t2)] = {
            x: {"links": g["links"], "pairs": g["pairs"],
                "prob": Fraction(g["links"], g["pairs"])}
            for x, g in sorted(collapsed.items())
        }

    return report
