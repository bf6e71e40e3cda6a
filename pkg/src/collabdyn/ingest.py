"""Corpus ingestion: parse publication exports, link author names to
canonical author ids via shared paper ids, and assign calendar time bins.

Input files are UTF-8 JSON Lines.  A publication line carries ``paper_id``,
``date`` (ISO ``YYYY-MM-DD``) and either ``author_ids`` (pre-linked corpus)
or ``author_names`` (to be linked against an id map).  An id-map line
carries ``paper_id`` and ``authors``, a list of ``{"name": ..., "id": ...}``
objects.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Iterator

SYNTHETIC_PREFIX = "synth:"
BIN_SCHEMES = ("quarter", "month", "year")

_NON_WORD_RE = re.compile(r"[^\w\s]+", flags=re.UNICODE)
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class TimeBin:
    """One calendar bin; bins are totally ordered and contiguous."""

    index: int
    label: str
    start: date
    end: date

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "label": self.label,
            "start": self.start.isoformat(),
            "end": self.end.isoformat(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TimeBin":
        return cls(
            index=int(d["index"]),
            label=str(d["label"]),
            start=date.fromisoformat(d["start"]),
            end=date.fromisoformat(d["end"]),
        )


@dataclass(frozen=True)
class RawPublication:
    """A publication as it appears in the export, before linkage.

    Exactly one of `author_names` / `author_ids` carries the authorship:
    `author_ids` is non-None for pre-linked exports and bypasses name
    matching entirely.
    """

    paper_id: str
    date: date
    author_names: tuple[str, ...] = ()
    author_ids: tuple[str, ...] | None = None


@dataclass(frozen=True)
class IdMapEntry:
    """Name -> author-id pairs known for one paper."""

    paper_id: str
    entries: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class PublicationRecord:
    """A linked publication: canonical author ids, optionally binned."""

    paper_id: str
    date: date
    author_ids: frozenset[str]
    bin: int | None = None


@dataclass
class LinkReport:
    """Tallies from parsing and linkage; nothing here is fatal."""

    papers_total: int = 0
    papers_linked: int = 0
    names_matched: int = 0
    names_unmatched: int = 0
    records_dropped_undated: int = 0
    papers_dropped_unlinked: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class CorpusStats:
    papers: int
    authors: int
    multi_author_papers: int
    collaborating_authors: int

    @property
    def multi_author_fraction(self) -> float:
        return self.multi_author_papers / self.papers if self.papers else 0.0

    @property
    def collaborating_fraction(self) -> float:
        return self.collaborating_authors / self.authors if self.authors else 0.0

    def to_dict(self) -> dict:
        return {
            "papers": self.papers,
            "authors": self.authors,
            "multi_author_papers": self.multi_author_papers,
            "collaborating_authors": self.collaborating_authors,
            "multi_author_fraction": self.multi_author_fraction,
            "collaborating_fraction": self.collaborating_fraction,
        }


def normalize_name(name: str) -> str:
    """Casefold, strip punctuation, collapse internal whitespace."""
    cleaned = _NON_WORD_RE.sub("", name.casefold())
    return _WS_RE.sub(" ", cleaned).strip()


def synthetic_id(name: str) -> str:
    """Deterministic fallback id for a name with no id-map match.

    Derived from the normalized name, so the same person accumulates
    degree across papers; the prefix keeps the namespace disjoint from
    corpus-provided ids.
    """
    digest = hashlib.sha1(normalize_name(name).encode("utf-8")).hexdigest()
    return SYNTHETIC_PREFIX + digest[:16]


def _str_list(value) -> tuple[str, ...] | None:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        return None
    return tuple(value)


def parse_publications(lines: Iterable[str]) -> tuple[list[RawPublication], LinkReport]:
    """Parse a publications export into RawPublication values, input order
    preserved.  Malformed or undated lines are skipped and counted in the
    returned report; they never abort the parse.
    """
    report = LinkReport()
    records: list[RawPublication] = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            report.records_dropped_undated += 1
            continue
        if not isinstance(obj, dict):
            report.records_dropped_undated += 1
            continue
        paper_id = obj.get("paper_id")
        if not isinstance(paper_id, str) or not paper_id:
            report.records_dropped_undated += 1
            continue
        try:
            pub_date = date.fromisoformat(obj["date"])
        except (KeyError, TypeError, ValueError):
            report.records_dropped_undated += 1
            continue
        author_ids = None
        author_names: tuple[str, ...] = ()
        if "author_ids" in obj:
            author_ids = _str_list(obj["author_ids"])
            if author_ids is None:
                report.records_dropped_undated += 1
                continue
        elif "author_names" in obj:
            names = _str_list(obj["author_names"])
            if names is None:
                report.records_dropped_undated += 1
                continue
            author_names = names
        records.append(RawPublication(paper_id, pub_date, author_names, author_ids))
        report.papers_total += 1
    return records, report


def parse_idmap(lines: Iterable[str]) -> list[IdMapEntry]:
    """Parse an id-map export; malformed lines are skipped."""
    entries: list[IdMapEntry] = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            continue
        if not isinstance(obj, dict):
            continue
        paper_id = obj.get("paper_id")
        authors = obj.get("authors")
        if not isinstance(paper_id, str) or not paper_id or not isinstance(authors, list):
            continue
        pairs = []
        for item in authors:
            if isinstance(item, dict):
                name, author_id = item.get("name"), item.get("id")
            elif isinstance(item, (list, tuple)) and len(item) == 2:
                name, author_id = item
            else:
                continue
            if isinstance(name, str) and isinstance(author_id, str) and author_id:
                pairs.append((name, author_id))
        entries.append(IdMapEntry(paper_id, tuple(dict.fromkeys(pairs))))
    return entries


def _merge_idmap(idmap: Iterable[IdMapEntry]) -> dict[str, dict[str, str]]:
    # One paper may appear on several id-map lines; conflicting ids for the
    # same normalized name resolve to the smallest id so the result does not
    # depend on line order.
    merged: dict[str, dict[str, set[str]]] = {}
    for entry in idmap:
        per_paper = merged.setdefault(entry.paper_id, {})
        for name, author_id in entry.entries:
            per_paper.setdefault(normalize_name(name), set()).add(author_id)
    return {
        paper_id: {norm: min(ids) for norm, ids in names.items()}
        for paper_id, names in merged.items()
    }


def link_author_names(
    raw: Iterable[RawPublication],
    idmap: Iterable[IdMapEntry] = (),
    *,
    drop_unlinked: bool = False,
    report: LinkReport | None = None,
) -> tuple[list[PublicationRecord], LinkReport]:
    """Resolve author names to canonical ids and deduplicate them per paper.

    Names match id-map entries by normalized exact comparison; names with
    no match (or papers absent from the id map) fall back to deterministic
    synthetic ids unless `drop_unlinked` is set, in which case papers with
    no id-map entry are dropped and counted.  Pre-linked publications pass
    through with their ids deduplicated.
    """
    if report is None:
        report = LinkReport()
    lookup = _merge_idmap(idmap)
    records: list[PublicationRecord] = []
    for pub in raw:
        if pub.author_ids is not None:
            report.papers_linked += 1
            records.append(
                PublicationRecord(pub.paper_id, pub.date, frozenset(pub.author_ids))
            )
            continue
        names = lookup.get(pub.paper_id)
        if names is None and drop_unlinked:
            report.papers_dropped_unlinked += 1
            continue
        if names is not None:
            report.papers_linked += 1
        ids = set()
        for name in pub.author_names:
            norm = normalize_name(name)
            author_id = names.get(norm) if names else None
            if author_id is None:
                author_id = synthetic_id(name)
                report.names_unmatched += 1
            else:
                report.names_matched += 1
            ids.add(author_id)
        records.append(PublicationRecord(pub.paper_id, pub.date, frozenset(ids)))
    return records, report


def _bin_key(d: date, scheme: str) -> tuple[int, int]:
    if scheme == "quarter":
        return d.year, (d.month - 1) // 3
    if scheme == "month":
        return d.year, d.month - 1
    if scheme == "year":
        return d.year, 0
    raise ValueError(f"unknown bin scheme: {scheme!r}")


def _next_key(key: tuple[int, int], scheme: str) -> tuple[int, int]:
    year, sub = key
    periods = {"quarter": 4, "month": 12, "year": 1}[scheme]
    sub += 1
    if sub >= periods:
        return year + 1, 0
    return year, sub


def _bin_from_key(index: int, key: tuple[int, int], scheme: str) -> TimeBin:
    year, sub = key
    if scheme == "quarter":
        label = f"{year}_Q{sub + 1}"
        start = date(year, 3 * sub + 1, 1)
    elif scheme == "month":
        label = f"{year}_M{sub + 1:02d}"
        start = date(year, sub + 1, 1)
    else:
        label = str(year)
        start = date(year, 1, 1)
    ny, ns = _next_key(key, scheme)
    if scheme == "quarter":
        nxt = date(ny, 3 * ns + 1, 1)
    elif scheme == "month":
        nxt = date(ny, ns + 1, 1)
    else:
        nxt = date(ny, 1, 1)
    return TimeBin(index, label, start, nxt - timedelta(days=1))


def bin_label(d: date, scheme: str = "quarter") -> str:
    """Label of the bin containing `d`; a pure function of date and scheme."""
    return _bin_from_key(0, _bin_key(d, scheme), scheme).label


def assign_time_bins(
    records: Iterable[PublicationRecord], scheme: str = "quarter"
) -> tuple[list[PublicationRecord], list[TimeBin]]:
    """Assign every record to its calendar bin.

    The bin list is contiguous from the earliest to the latest record date,
    including calendar periods with no publications.
    """
    records = list(records)
    if scheme not in BIN_SCHEMES:
        raise ValueError(f"unknown bin scheme: {scheme!r}")
    if not records:
        return [], []
    keys = [_bin_key(r.date, scheme) for r in records]
    key = min(keys)
    last = max(keys)
    bins: list[TimeBin] = []
    key_to_index: dict[tuple[int, int], int] = {}
    while True:
        key_to_index[key] = len(bins)
        bins.append(_bin_from_key(len(bins), key, scheme))
        if key == last:
            break
        key = _next_key(key, scheme)
    binned = [replace(r, bin=key_to_index[k]) for r, k in zip(records, keys)]
    return binned, bins


def validate_corpus(records: Iterable[PublicationRecord]) -> CorpusStats:
    """Summary statistics of a linked corpus."""
    papers = 0
    multi = 0
    authors: set[str] = set()
    collaborating: set[str] = set()
    for r in records:
        papers += 1
        authors.update(r.author_ids)
        if len(r.author_ids) > 1:
            multi += 1
            collaborating.update(r.author_ids)
    return CorpusStats(papers, len(authors), multi, len(collaborating))


@dataclass
class IngestResult:
    records: list[PublicationRecord]
    bins: list[TimeBin]
    report: LinkReport
    stats: CorpusStats


def ingest_corpus(
    pubs_path: str | Path,
    idmap_path: str | Path | None = None,
    *,
    scheme: str = "quarter",
    drop_unlinked: bool = False,
) -> IngestResult:
    """Run the full ingest pass: parse, link, bin, summarize."""
    with open(pubs_path, encoding="utf-8") as fh:
        raw, report = parse_publications(fh)
    idmap: list[IdMapEntry] = []
    if idmap_path is not None:
        with open(idmap_path, encoding="utf-8") as fh:
            idmap = parse_idmap(fh)
    records, report = link_author_names(
        raw, idmap, drop_unlinked=drop_unlinked, report=report
    )
    records, bins = assign_time_bins(records, scheme)
    return IngestResult(records, bins, report, validate_corpus(records))


# --- on-disk record format -------------------------------------------------

def record_to_json(record: PublicationRecord) -> str:
    obj = {
        "paper_id": record.paper_id,
        "date": record.date.isoformat(),
        "author_ids": sorted(record.author_ids),
    }
    if record.bin is not None:
        obj["bin"] = record.bin
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def write_records(records: Iterable[PublicationRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_to_json(record))
            fh.write("\n")


def read_records(path: str | Path) -> Iterator[PublicationRecord]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            yield PublicationRecord(
                paper_id=obj["paper_id"],
                date=date.fromisoformat(obj["date"]),
                author_ids=frozenset(obj["author_ids"]),
                bin=obj.get("bin"),
            )


def write_bins(bins: Iterable[TimeBin], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([b.to_dict() for b in bins], fh, indent=2)


def read_bins(path: str | Path) -> list[TimeBin]:
    with open(path, encoding="utf-8") as fh:
        return [TimeBin.from_dict(d) for d in json.load(fh)]
