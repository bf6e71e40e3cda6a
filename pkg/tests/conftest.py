from datetime import date

import pytest

from collabdyn import PublicationRecord, assign_time_bins, build_snapshot_series


def make_corpus(papers, scheme="quarter"):
    """Build binned records + bins from (paper_id, iso_date, authors) triples."""
    records = [
        PublicationRecord(pid, date.fromisoformat(d), frozenset(authors))
        for pid, d, authors in papers
    ]
    return assign_time_bins(records, scheme)


TOY_PAPERS = [
    ("P1", "2020-01-10", ["A", "B"]),
    ("P2", "2020-02-01", ["A", "C"]),
    ("P3", "2020-04-15", ["B", "C", "D"]),
    ("P4", "2020-05-20", ["E"]),
]


@pytest.fixture
def toy_corpus():
    return make_corpus(TOY_PAPERS)


@pytest.fixture
def toy_series(toy_corpus):
    records, bins = toy_corpus
    return build_snapshot_series(records, bins)
