"""Command-line interface.

Stage commands (ingest, snapshots, metrics, attachment, fit) read and
write plain files so any stage can be re-run or inspected in isolation;
`report` runs the whole pipeline from one config file, and `simulate`
writes a synthetic corpus in the ingest input format.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import __version__
from .attachment import (
    bin_pairs,
    collapse_pair_table,
    internal_link_table,
    newcomer_attachment_table,
)
from .centrality import cohort_stats_table
from .fitting import (
    DEFAULT_BASE,
    DEFAULT_MIN_COUNT,
    FitError,
    fit_log_binned,
)
from .generator import GeneratorParams, generate_team_corpus
from .ingest import (
    ingest_corpus,
    read_bins,
    read_records,
    write_bins,
    write_records,
)
from .pipeline import (
    PipelineError,
    _format_value,
    build_pipeline_config,
    load_config_file,
    parse_cohort_spec,
    run_and_emit,
)
from .snapshots import SnapshotSeries, build_snapshot_series

import json

STORE_DIR = "snapshot_store"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(v) for v in row) + "\n")


def _load_series(in_dir: Path) -> SnapshotSeries:
    store = in_dir / STORE_DIR
    if not store.is_dir():
        raise FileNotFoundError(
            f"no snapshot store at {store}; run `collabdyn snapshots` first"
        )
    return SnapshotSeries.load(store)


def _pair_slug(l1: str, l2: str) -> str:
    return f"{l1}__{l2}"


# --- subcommands -------------------------------------------------------------

def _cmd_ingest(args) -> int:
    result = ingest_corpus(
        args.pubs, args.idmap, scheme=args.bin, drop_unlinked=args.drop_unlinked
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_records(result.records, out / "records.jsonl")
    write_bins(result.bins, out / "bins.json")
    with open(out / "link_report.json", "w", encoding="utf-8") as fh:
        json.dump(result.report.to_dict(), fh, indent=2)
    with open(out / "corpus_stats.json", "w", encoding="utf-8") as fh:
        json.dump(result.stats.to_dict(), fh, indent=2)
    stats = result.stats
    print(
        f"ingested {stats.papers} papers, {stats.authors} authors, "
        f"{len(result.bins)} bins -> {out}"
    )
    return 0


def _cmd_snapshots(args) -> int:
    in_dir = Path(args.in_dir)
    records = list(read_records(in_dir / "records.jsonl"))
    bins = read_bins(in_dir / "bins.json")
    series = build_snapshot_series(records, bins)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    series.save(out / STORE_DIR)
    counts = series.cumulative_counts()
    _write_csv(
        out / "cumulative_counts.csv",
        ["bin", "nodes", "links"],
        [(tb.label, n, l) for tb, n, l in counts],
    )
    hist_rows = []
    for b in range(series.n_bins):
        label = series.bins[b].label
        hist_rows.extend((label, k, c) for k, c in series.degree_histogram(b).items())
    _write_csv(out / "degree_histograms.csv", ["bin", "k", "count"], hist_rows)
    final = counts[-1] if counts else None
    if final:
        print(f"built {final[1]} nodes / {final[2]} links over {series.n_bins} bins -> {out}")
    else:
        print(f"built empty series -> {out}")
    return 0


def _cmd_metrics(args) -> int:
    series = _load_series(Path(args.in_dir))
    cohorts = parse_cohort_spec(args.cohorts)
    rows = [
        (series.bins[s.bin].label, f"{s.fraction:g}", s.side, s.size,
         s.mean_centrality, s.collaborator_mean_centrality)
        for s in cohort_stats_table(
            series, cohorts,
            exclude_isolated=args.exclude_isolated,
            pooled=args.pooled_collaborators,
        )
    ]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "cohort_stats.csv",
        ["bin", "cohort", "side", "size", "mean_centrality", "collab_mean_centrality"],
        rows,
    )
    print(f"wrote {len(rows)} cohort rows -> {out / 'cohort_stats.csv'}")
    return 0


def _cmd_attachment(args) -> int:
    series = _load_series(Path(args.in_dir))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    labels = [tb.label for tb in series.bins]
    n_files = 0
    for t1, t2 in bin_pairs(series.n_bins, args.pairs):
        slug = _pair_slug(labels[t1], labels[t2])
        attach = newcomer_attachment_table(
            series, t1, t2, newcomer_count=args.newcomer_count
        )
        _write_csv(
            out / f"attachment_{slug}.csv",
            ["k", "V", "N", "P"],
            [(r.k, r.events, r.population, r.prob) for r in attach.rows()],
        )
        pair_table = internal_link_table(
            series, t1, t2,
            pair_count=args.pair_count,
            exclude_existing=args.exclude_existing,
        )
        _write_csv(
            out / f"pair_links_{slug}.csv",
            ["ki", "kj", "L", "pairs", "P"],
            [(r.ki, r.kj, r.links, r.pairs, r.prob) for r in pair_table.rows()],
        )
        products = collapse_pair_table(pair_table)
        _write_csv(
            out / f"products_{slug}.csv",
            ["x", "P"],
            [(r.x, r.prob) for r in products.rows()],
        )
        n_files += 3
    print(f"wrote {n_files} attachment tables -> {out}")
    return 0


def _fit_rows_from_dir(in_dir: Path, base: float, min_count: float):
    """Collect fit targets from stage outputs present in a directory."""
    rows = []

    def try_fit(pair: str, target: str, xs, ys, ws):
        try:
            fit = fit_log_binned(xs, ys, ws, base=base, min_count=min_count)
        except (FitError, ValueError):
            return
        rows.append((pair, target, fit.slope, fit.intercept, fit.r_squared, fit.n_points))

    hist_file = in_dir / "degree_histograms.csv"
    if hist_file.exists():
        per_bin: dict[str, list[tuple[int, int]]] = {}
        with open(hist_file, encoding="utf-8") as fh:
            for rec in csv.DictReader(fh):
                per_bin.setdefault(rec["bin"], []).append(
                    (int(rec["k"]), int(rec["count"]))
                )
        for label, items in per_bin.items():
            pos = [(k, c) for k, c in items if k >= 1 and c > 0]
            if len(pos) < 2:
                continue
            ks = [k for k, _ in pos]
            cs = [c for _, c in pos]
            try_fit(label, "degree_distribution", ks, cs, cs)

    for path in sorted(in_dir.glob("attachment_*.csv")):
        slug = path.stem.removeprefix("attachment_")
        pair = "->".join(slug.split("__", 1))
        with open(path, encoding="utf-8") as fh:
            recs = [r for r in csv.DictReader(fh) if int(r["k"]) >= 1]
        if recs:
            try_fit(
                pair, "newcomer_attachment",
                [int(r["k"]) for r in recs],
                [float(r["P"]) for r in recs],
                [int(r["N"]) for r in recs],
            )

    for path in sorted(in_dir.glob("pair_links_*.csv")):
        slug = path.stem.removeprefix("pair_links_")
        pair = "->".join(slug.split("__", 1))
        pooled: dict[int, list[int]] = {}
        with open(path, encoding="utf-8") as fh:
            for rec in csv.DictReader(fh):
                x = int(rec["ki"]) * int(rec["kj"])
                agg = pooled.setdefault(x, [0, 0])
                agg[0] += int(rec["L"])
                agg[1] += int(rec["pairs"])
        items = [(x, l, p) for x, (l, p) in sorted(pooled.items()) if x >= 1]
        if items:
            try_fit(
                pair, "internal_link_product",
                [x for x, _, _ in items],
                [l / p for _, l, p in items],
                [p for _, _, p in items],
            )
    return rows


def _cmd_fit(args) -> int:
    in_dir = Path(args.in_dir)
    rows = _fit_rows_from_dir(in_dir, args.base, args.min_count)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "fits.csv",
        ["pair", "target", "slope", "intercept", "r2", "n_points"],
        rows,
    )
    print(f"wrote {len(rows)} fits -> {out / 'fits.csv'}")
    return 0


def _parse_team(text: str) -> int | tuple[int, int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return int(lo), int(hi)
    return int(text)


def _cmd_simulate(args) -> int:
    papers_per_bin = args.per_bin or max(1, -(-args.papers // 8))
    params = GeneratorParams(
        papers_total=args.papers,
        papers_per_bin=papers_per_bin,
        team_size=_parse_team(args.team),
        newcomers_per_paper=args.newcomers,
        alpha=args.alpha,
        seed=args.seed,
    )
    records = generate_team_corpus(params)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_records(records, out)
    authors = {a for r in records for a in r.author_ids}
    print(f"simulated {len(records)} papers, {len(authors)} authors -> {out}")
    return 0


def _cmd_report(args) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {
        "pubs": Path(args.pubs) if args.pubs else None,
        "idmap": Path(args.idmap) if args.idmap else None,
        "out_dir": Path(args.out) if args.out else None,
        "bin_scheme": args.bin,
        "output_format": args.format,
    }
    config = build_pipeline_config(file_values, overrides)
    paths = run_and_emit(config)
    print(f"report complete: {len(paths)} files -> {config.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collabdyn",
        description="Evolving co-authorship network measurement toolkit",
    )
    parser.add_argument("--version", action="version", version=f"collabdyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, link, and bin a publication export")
    p.add_argument("--pubs", required=True, help="publications JSONL file")
    p.add_argument("--idmap", default=None, help="paper-id to author-id map JSONL file")
    p.add_argument("--bin", default="quarter", choices=["quarter", "month", "year"])
    p.add_argument("--drop-unlinked", action="store_true",
                   help="drop papers that have no id-map entry")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("snapshots", help="build the cumulative snapshot series")
    p.add_argument("--in", dest="in_dir", required=True, help="ingest output directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_snapshots)

    p = sub.add_parser("metrics", help="cohort centrality statistics")
    p.add_argument("--in", dest="in_dir", required=True, help="snapshots output directory")
    p.add_argument("--cohorts", default="0.10:top,0.20:top,0.20:tail")
    p.add_argument("--exclude-isolated", action="store_true",
                   help="rank only authors with at least one collaborator")
    p.add_argument("--pooled-collaborators", action="store_true",
                   help="pool all neighbor occurrences instead of per-member means")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("attachment", help="newcomer and internal-link probability tables")
    p.add_argument("--in", dest="in_dir", required=True, help="snapshots output directory")
    p.add_argument("--pairs", default="consecutive", choices=["consecutive", "cumulative"])
    p.add_argument("--newcomer-count", default="edges", choices=["edges", "distinct"])
    p.add_argument("--pair-count", default="combinations", choices=["combinations", "literal"])
    p.add_argument("--exclude-existing", action="store_true",
                   help="remove already-linked pairs from the pair population")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_attachment)

    p = sub.add_parser("fit", help="log-log slope fits over stage outputs")
    p.add_argument("--in", dest="in_dir", required=True,
                   help="directory holding histogram/attachment CSVs")
    p.add_argument("--base", type=float, default=DEFAULT_BASE)
    p.add_argument("--min-count", type=float, default=DEFAULT_MIN_COUNT)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("simulate", help="generate a synthetic corpus")
    p.add_argument("--papers", type=int, required=True)
    p.add_argument("--per-bin", type=int, default=None,
                   help="papers per quarter (default: papers/8)")
    p.add_argument("--team", default="4", help="team size, fixed N or range LO:HI")
    p.add_argument("--newcomers", type=int, default=1)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output publications file")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("report", help="run the full pipeline from a config")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.add_argument("--pubs", default=None)
    p.add_argument("--idmap", default=None)
    p.add_argument("--bin", default=None, choices=["quarter", "month", "year"])
    p.add_argument("--format", default=None, choices=["csv", "json"])
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    stage = args.command
    try:
        return args.func(args)
    except PipelineError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"{stage}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
