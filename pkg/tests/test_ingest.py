import json
from datetime import date

import pytest

from collabdyn import (
    IdMapEntry,
    assign_time_bins,
    link_author_names,
    normalize_name,
    parse_idmap,
    parse_publications,
    synthetic_id,
    validate_corpus,
)
from collabdyn.ingest import (
    SYNTHETIC_PREFIX,
    bin_label,
    read_records,
    write_records,
)

from conftest import make_corpus, TOY_PAPERS


def pub_line(paper_id, d, names=None, ids=None, **extra):
    obj = {"paper_id": paper_id, "date": d, **extra}
    if names is not None:
        obj["author_names"] = names
    if ids is not None:
        obj["author_ids"] = ids
    return json.dumps(obj)


class TestParsePublications:
    def test_direct_parse(self):
        records, report = parse_publications(
            [pub_line("P1", "2020-01-10", names=["A. Smith", "B. Wu"])]
        )
        assert len(records) == 1
        assert records[0].paper_id == "P1"
        assert records[0].date == date(2020, 1, 10)
        assert records[0].author_names == ("A. Smith", "B. Wu")
        assert records[0].author_ids is None
        assert report.papers_total == 1
        assert report.records_dropped_undated == 0

    def test_missing_date_skipped(self):
        records, report = parse_publications(
            [json.dumps({"paper_id": "P1", "author_names": ["X"]})]
        )
        assert records == []
        assert report.records_dropped_undated == 1

    def test_empty_stream(self):
        records, report = parse_publications([])
        assert records == []
        assert report.papers_total == 0

    @pytest.mark.parametrize(
        "line",
        [
            "not json at all",
            json.dumps(["wrong", "shape"]),
            pub_line("", "2020-01-01", names=["A"]),
            pub_line("P1", "2020-13-40", names=["A"]),
            pub_line("P1", "2020-01-01", names=["A", 7]),
            pub_line("P1", "2020-01-01", ids="not-a-list"),
        ],
    )
    def test_malformed_lines_counted(self, line):
        records, report = parse_publications([line])
        assert records == []
        assert report.records_dropped_undated == 1

    def test_order_preserved_around_bad_lines(self):
        lines = [
            pub_line("P1", "2020-01-01", names=["A"]),
            "garbage",
            pub_line("P2", "2020-01-02", ids=["x", "y"]),
        ]
        records, report = parse_publications(lines)
        assert [r.paper_id for r in records] == ["P1", "P2"]
        assert records[1].author_ids == ("x", "y")
        assert report.records_dropped_undated == 1


class TestNormalization:
    def test_casefold_punctuation_whitespace(self):
        assert normalize_name("A. Smith") == "a smith"
        assert normalize_name("  SMITH,   a.  ") == "smith a"
        assert normalize_name("Ünal-Öz") == "ünalöz"

    def test_synthetic_id_deterministic_and_namespaced(self):
        assert synthetic_id("A. Smith") == synthetic_id("a   smith")
        assert synthetic_id("A. Smith") != synthetic_id("B. Smith")
        assert synthetic_id("A. Smith").startswith(SYNTHETIC_PREFIX)


class TestLinkage:
    def test_exact_normalized_match(self):
        raw, _ = parse_publications([pub_line("P1", "2020-01-01", names=["A. Smith"])])
        idmap = [IdMapEntry("P1", (("a smith", "S9"),))]
        records, report = link_author_names(raw, idmap)
        assert records[0].author_ids == frozenset({"S9"})
        assert report.names_matched == 1
        assert report.names_unmatched == 0
        assert report.papers_linked == 1

    def test_fallback_synthetic(self):
        raw, _ = parse_publications([pub_line("P2", "2020-01-01", names=["X. Yu"])])
        records, report = link_author_names(raw, [])
        assert records[0].author_ids == frozenset({synthetic_id("x yu")})
        assert report.names_unmatched == 1
        assert report.papers_linked == 0

    def test_duplicate_idmap_entries_collapse(self):
        raw, _ = parse_publications(
            [pub_line("P3", "2020-01-01", names=["C Li", "c. li"])]
        )
        idmap = [IdMapEntry("P3", (("c li", "C1"), ("c li", "C1")))]
        records, _ = link_author_names(raw, idmap)
        assert records[0].author_ids == frozenset({"C1"})

    def test_idmap_line_order_irrelevant(self):
        raw, _ = parse_publications(
            [pub_line("P1", "2020-01-01", names=["A", "B"]),
             pub_line("P2", "2020-01-02", names=["A"])]
        )
        idmap = [
            IdMapEntry("P1", (("a", "I1"), ("b", "I2"))),
            IdMapEntry("P2", (("a", "I3"),)),
        ]
        first, _ = link_author_names(raw, idmap)
        second, _ = link_author_names(raw, list(reversed(idmap)))
        assert first == second

    def test_conflicting_ids_resolve_to_smallest(self):
        raw, _ = parse_publications([pub_line("P1", "2020-01-01", names=["A"])])
        idmap = [IdMapEntry("P1", (("a", "Z9"),)), IdMapEntry("P1", (("a", "B2"),))]
        records, _ = link_author_names(raw, idmap)
        assert records[0].author_ids == frozenset({"B2"})

    def test_drop_unlinked(self):
        raw, _ = parse_publications(
            [pub_line("P1", "2020-01-01", names=["A"]),
             pub_line("P2", "2020-01-02", names=["B"])]
        )
        idmap = [IdMapEntry("P1", (("a", "I1"),))]
        records, report = link_author_names(raw, idmap, drop_unlinked=True)
        assert [r.paper_id for r in records] == ["P1"]
        assert report.papers_dropped_unlinked == 1

    def test_prelinked_passthrough_dedups(self):
        raw, _ = parse_publications([pub_line("P1", "2020-01-01", ids=["x", "x", "y"])])
        records, report = link_author_names(raw, [])
        assert records[0].author_ids == frozenset({"x", "y"})
        assert report.papers_linked == 1

    def test_report_counts_names_of_processed_papers(self):
        raw, _ = parse_publications(
            [pub_line("P1", "2020-01-01", names=["A", "B"]),
             pub_line("P2", "2020-01-02", names=["C"])]
        )
        idmap = [IdMapEntry("P1", (("a", "I1"),))]
        _, report = link_author_names(raw, idmap)
        total_names = 3
        assert report.names_matched + report.names_unmatched == total_names

    def test_parse_idmap_formats(self):
        lines = [
            json.dumps({"paper_id": "P1", "authors": [{"name": "A", "id": "I1"}]}),
            json.dumps({"paper_id": "P2", "authors": [["B", "I2"]]}),
            "garbage",
        ]
        entries = parse_idmap(lines)
        assert [(e.paper_id, e.entries) for e in entries] == [
            ("P1", (("A", "I1"),)),
            ("P2", (("B", "I2"),)),
        ]


class TestTimeBins:
    def test_quarter_labels(self):
        assert bin_label(date(2020, 2, 1), "quarter") == "2020_Q1"
        assert bin_label(date(2021, 12, 23), "quarter") == "2021_Q4"

    def test_eight_quarters_over_two_years(self):
        records, bins = make_corpus(
            [("P1", "2020-01-05", ["A"]), ("P2", "2021-12-23", ["B"])]
        )
        assert [b.label for b in bins] == [
            "2020_Q1", "2020_Q2", "2020_Q3", "2020_Q4",
            "2021_Q1", "2021_Q2", "2021_Q3", "2021_Q4",
        ]
        assert records[0].bin == 0
        assert records[1].bin == 7

    def test_bins_contiguous_and_ordered(self):
        _, bins = make_corpus(
            [("P1", "2020-02-10", ["A"]), ("P2", "2020-11-01", ["B"])]
        )
        for prev, cur in zip(bins, bins[1:]):
            assert cur.index == prev.index + 1
            assert (cur.start - prev.end).days == 1

    def test_month_and_year_schemes(self):
        _, month_bins = make_corpus(
            [("P1", "2020-01-05", ["A"]), ("P2", "2020-03-20", ["B"])], scheme="month"
        )
        assert [b.label for b in month_bins] == ["2020_M01", "2020_M02", "2020_M03"]
        _, year_bins = make_corpus(
            [("P1", "2020-06-05", ["A"]), ("P2", "2021-01-20", ["B"])], scheme="year"
        )
        assert [b.label for b in year_bins] == ["2020", "2021"]

    def test_empty_records(self):
        assert assign_time_bins([], "quarter") == ([], [])

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            assign_time_bins([], "week")


class TestValidateCorpus:
    def test_toy_corpus(self):
        records, _ = make_corpus(TOY_PAPERS)
        stats = validate_corpus(records)
        assert stats.papers == 4
        assert stats.authors == 5
        assert stats.multi_author_papers == 3
        assert stats.collaborating_authors == 4
        assert stats.multi_author_fraction == pytest.approx(0.75)
        assert stats.collaborating_fraction == pytest.approx(0.8)

    def test_single_single_author_paper(self):
        records, _ = make_corpus([("P1", "2020-01-01", ["A"])])
        stats = validate_corpus(records)
        assert (stats.papers, stats.authors) == (1, 1)
        assert stats.multi_author_fraction == 0.0
        assert stats.collaborating_fraction == 0.0

    def test_empty(self):
        stats = validate_corpus([])
        assert stats.papers == 0
        assert stats.multi_author_fraction == 0.0


def test_records_roundtrip(tmp_path, toy_corpus):
    records, _ = toy_corpus
    path = tmp_path / "records.jsonl"
    write_records(records, path)
    back = list(read_records(path))
    assert back == records
