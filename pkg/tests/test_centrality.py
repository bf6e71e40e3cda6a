import pytest

from collabdyn import (
    CohortSpec,
    build_snapshot_series,
    cohort_mean_centrality,
    cohort_stats_table,
    collaborator_mean_centrality,
    degree_centrality,
    select_cohort,
)

from conftest import make_corpus


@pytest.fixture
def triangle():
    records, bins = make_corpus([("P1", "2020-01-01", ["A", "B", "C"])])
    return build_snapshot_series(records, bins)


@pytest.fixture
def star5():
    records, bins = make_corpus(
        [("P1", "2020-01-01", ["hub", f"leaf{i}"]) for i in range(4)]
    )
    return build_snapshot_series(records, bins)


def test_complete_graph_centrality_is_one(triangle):
    for author in "ABC":
        assert degree_centrality(triangle, 0, author) == 1.0


def test_star_centralities(star5):
    assert degree_centrality(star5, 0, "hub") == 1.0
    assert degree_centrality(star5, 0, "leaf0") == 0.25


def test_toy_q2_centralities(toy_series):
    expected = {"A": 0.5, "B": 0.75, "C": 0.75, "D": 0.5, "E": 0.0}
    for author, value in expected.items():
        assert degree_centrality(toy_series, 1, author) == pytest.approx(value, abs=1e-15)


def test_single_node_snapshot_undefined():
    records, bins = make_corpus([("P1", "2020-01-01", ["A"])])
    series = build_snapshot_series(records, bins)
    with pytest.raises(ValueError):
        degree_centrality(series, 0, "A")


def test_centrality_bounds(toy_series):
    for b in range(toy_series.n_bins):
        n = toy_series.node_count(b)
        if n < 2:
            continue
        for i, author in enumerate(toy_series.authors):
            if toy_series.node_first_seen[i] <= b:
                c = degree_centrality(toy_series, b, author)
                assert 0.0 <= c <= 1.0
                assert (c == 1.0) == (toy_series.degree_at(b, author) == n - 1)


class TestSelectCohort:
    def test_distinct_ranks_top_20(self):
        # half-graph on 10 authors: the two highest degrees are unique
        papers = [
            (f"P{i}{j}", "2020-01-01", [f"a{i}", f"a{j}"])
            for i in range(10)
            for j in range(i + 1, 10)
            if i + j >= 10
        ]
        papers.append(("P_iso", "2020-01-01", ["a0"]))
        records, bins = make_corpus(papers)
        series = build_snapshot_series(records, bins)
        degrees = {a: series.degree_at(0, a) for a in series.authors}
        assert sorted(degrees.values(), reverse=True)[:3] == [8, 7, 6]
        top = select_cohort(series, CohortSpec(0.20, "top", 0))
        assert top == ["a9", "a8"]

    def test_toy_tie_broken_by_id(self, toy_series):
        assert select_cohort(toy_series, CohortSpec(0.20, "top", 1)) == ["B"]

    def test_fraction_one_selects_all(self, toy_series):
        cohort = select_cohort(toy_series, CohortSpec(1.0, "top", 1))
        assert sorted(cohort) == ["A", "B", "C", "D", "E"]

    def test_tail_side(self, toy_series):
        assert select_cohort(toy_series, CohortSpec(0.20, "tail", 1)) == ["E"]

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            CohortSpec(0.0, "top", 0)
        with pytest.raises(ValueError):
            CohortSpec(0.5, "middle", 0)


class TestCohortMeans:
    def test_toy_top_cohort_mean(self, toy_series):
        assert cohort_mean_centrality(toy_series, ["B"], 1) == 0.75

    def test_complete_graph_mean_is_one(self, triangle):
        assert cohort_mean_centrality(triangle, ["A", "B"], 0) == 1.0

    def test_isolated_member_mean_zero(self, toy_series):
        assert cohort_mean_centrality(toy_series, ["E"], 1) == 0.0

    def test_empty_cohort_rejected(self, toy_series):
        with pytest.raises(ValueError):
            cohort_mean_centrality(toy_series, [], 1)


class TestCollaboratorMeans:
    def test_toy_value(self, toy_series):
        got = collaborator_mean_centrality(toy_series, ["B"], 1)
        assert got == pytest.approx(1.75 / 3, abs=1e-15)

    def test_complete_graph(self, triangle):
        assert collaborator_mean_centrality(triangle, ["A", "B", "C"], 0) == 1.0

    def test_all_isolated_rejected(self, toy_series):
        with pytest.raises(ValueError):
            collaborator_mean_centrality(toy_series, ["E"], 1)

    def test_isolated_members_excluded_from_outer_mean(self, toy_series):
        with_e = collaborator_mean_centrality(toy_series, ["B", "E"], 1)
        without_e = collaborator_mean_centrality(toy_series, ["B"], 1)
        assert with_e == without_e

    def test_pooled_variant(self, toy_series):
        # cohort {B, D}: pooled averages over all 5 neighbor occurrences
        pooled = collaborator_mean_centrality(toy_series, ["B", "D"], 1, pooled=True)
        neighbor_sum = (0.5 + 0.75 + 0.5) + (0.75 + 0.75)
        assert pooled == pytest.approx(neighbor_sum / 5, abs=1e-15)


class TestCohortStatsTable:
    def test_top_mean_at_least_tail_mean(self, toy_series):
        rows = {(s.fraction, s.side, s.bin): s for s in cohort_stats_table(toy_series)}
        for b in range(toy_series.n_bins):
            top = rows[(0.20, "top", b)]
            tail = rows[(0.20, "tail", b)]
            everyone = cohort_mean_centrality(
                toy_series, list(toy_series.authors[: toy_series.node_count(b)]), b
            ) if b == 1 else None
            assert top.mean_centrality >= tail.mean_centrality
            if everyone is not None:
                assert top.mean_centrality >= everyone >= tail.mean_centrality

    def test_single_node_bins_skipped(self):
        records, bins = make_corpus(
            [("P1", "2020-01-01", ["A"]), ("P2", "2020-05-01", ["A", "B"])]
        )
        series = build_snapshot_series(records, bins)
        rows = cohort_stats_table(series)
        assert {s.bin for s in rows} == {1}

    def test_exclude_isolated_changes_population(self, toy_series):
        default = {(s.fraction, s.side, s.bin): s for s in cohort_stats_table(toy_series)}
        excl = {
            (s.fraction, s.side, s.bin): s
            for s in cohort_stats_table(toy_series, exclude_isolated=True)
        }
        # Q2 has 5 authors, one isolated; tail cohort no longer contains E
        assert default[(0.20, "tail", 1)].mean_centrality == 0.0
        assert excl[(0.20, "tail", 1)].mean_centrality > 0.0
