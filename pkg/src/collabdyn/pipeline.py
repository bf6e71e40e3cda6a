"""End-to-end pipeline: ingest -> snapshots -> metrics -> attachment -> fits.

One PipelineConfig drives every stage; the result is a ReportBundle of
plot-ready tables plus a manifest, emitted as CSV or JSON with
deterministic content (two runs on the same inputs are byte-identical).
The built snapshot series is cached on disk keyed by a content hash of the
inputs, so re-running with different metric or fit parameters skips the
graph rebuild.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .attachment import (
    PAIR_COUNT_MODES,
    PAIRING_MODES,
    NEWCOMER_COUNT_MODES,
    bin_pairs,
    collapse_pair_table,
    internal_link_table,
    newcomer_attachment_table,
)
from .centrality import DEFAULT_COHORTS, SIDES, cohort_stats_table
from .fitting import (
    DEFAULT_BASE,
    DEFAULT_MIN_COUNT,
    FitError,
    fit_attachment_slope,
    fit_degree_exponent,
    fit_product_slope,
)
from .ingest import BIN_SCHEMES, IngestResult, ingest_corpus
from .snapshots import SnapshotSeries, build_snapshot_series

OUTPUT_FORMATS = ("csv", "json")


class PipelineError(RuntimeError):
    """A pipeline stage failed; the message is prefixed with the stage."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass
class PipelineConfig:
    pubs: Path
    out_dir: Path
    idmap: Path | None = None
    bin_scheme: str = "quarter"
    drop_unlinked: bool = False
    cohorts: tuple[tuple[float, str], ...] = DEFAULT_COHORTS
    exclude_isolated: bool = False
    pooled_collaborators: bool = False
    pairing: str = "consecutive"
    newcomer_count: str = "edges"
    pair_count: str = "combinations"
    exclude_existing: bool = False
    fit_base: float = DEFAULT_BASE
    fit_min_count: float = DEFAULT_MIN_COUNT
    output_format: str = "csv"
    use_cache: bool = True

    def validate(self) -> None:
        if not Path(self.pubs).exists():
            raise ValueError(f"publications file not found: {self.pubs}")
        if self.idmap is not None and not Path(self.idmap).exists():
            raise ValueError(f"id-map file not found: {self.idmap}")
        if self.bin_scheme not in BIN_SCHEMES:
            raise ValueError(f"bin scheme must be one of {BIN_SCHEMES}")
        for fraction, side in self.cohorts:
            if not 0 < fraction <= 1:
                raise ValueError(f"cohort fraction must be in (0, 1]: {fraction}")
            if side not in SIDES:
                raise ValueError(f"cohort side must be one of {SIDES}: {side!r}")
        if self.pairing not in PAIRING_MODES:
            raise ValueError(f"pairing must be one of {PAIRING_MODES}")
        if self.newcomer_count not in NEWCOMER_COUNT_MODES:
            raise ValueError(f"newcomer_count must be one of {NEWCOMER_COUNT_MODES}")
        if self.pair_count not in PAIR_COUNT_MODES:
            raise ValueError(f"pair_count must be one of {PAIR_COUNT_MODES}")
        if self.fit_base <= 1:
            raise ValueError("fit base must be > 1")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output format must be one of {OUTPUT_FORMATS}")


def parse_cohort_spec(text: str) -> tuple[tuple[float, str], ...]:
    """Parse "0.10:top,0.20:top,0.20:tail" into cohort (fraction, side) pairs."""
    cohorts = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        frac_text, _, side = part.partition(":")
        cohorts.append((float(frac_text), side.strip() or "top"))
    if not cohorts:
        raise ValueError(f"no cohorts in spec: {text!r}")
    return tuple(cohorts)


def format_cohort_spec(cohorts) -> str:
    return ",".join(f"{fraction:g}:{side}" for fraction, side in cohorts)


_CONFIG_KEYS = {
    "pubs": ("pubs", Path),
    "idmap": ("idmap", Path),
    "out": ("out_dir", Path),
    "bin": ("bin_scheme", str),
    "drop_unlinked": ("drop_unlinked", None),
    "cohorts": ("cohorts", parse_cohort_spec),
    "exclude_isolated": ("exclude_isolated", None),
    "pooled_collaborators": ("pooled_collaborators", None),
    "pairs": ("pairing", str),
    "newcomer_count": ("newcomer_count", str),
    "pair_count": ("pair_count", str),
    "exclude_existing": ("exclude_existing", None),
    "base": ("fit_base", float),
    "min_count": ("fit_min_count", float),
    "format": ("output_format", str),
    "cache": ("use_cache", None),
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def load_config_file(path: str | Path) -> dict:
    """Read a flat `key = value` config file mirroring the CLI flags."""
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key:
                raise ValueError(f"{path}:{lineno}: expected `key = value`")
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            attr, conv = _CONFIG_KEYS[key]
            if conv is None:
                low = value.lower()
                if low not in _TRUE | _FALSE:
                    raise ValueError(f"{path}:{lineno}: {key} must be a boolean")
                values[attr] = low in _TRUE
            else:
                values[attr] = conv(value)
    return values


def build_pipeline_config(
    file_values: dict | None = None, overrides: dict | None = None
) -> PipelineConfig:
    """Merge config-file values with CLI overrides (overrides win)."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    missing = {"pubs", "out_dir"} - merged.keys()
    if missing:
        raise ValueError(f"missing required config keys: {sorted(missing)}")
    known = {f.name for f in fields(PipelineConfig)}
    unknown = merged.keys() - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    config = PipelineConfig(**merged)
    config.validate()
    return config


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[tuple]


@dataclass
class ReportBundle:
    tables: dict[str, Table]
    manifest: dict


def _format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


# --- snapshot cache ---------------------------------------------------------

def _input_fingerprint(config: PipelineConfig) -> str:
    h = hashlib.sha256()
    for path in (config.pubs, config.idmap):
        if path is None:
            h.update(b"\x00none")
            continue
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                h.update(chunk)
        h.update(b"\x00")
    h.update(
        f"{config.bin_scheme}|{config.drop_unlinked}".encode()
    )
    return h.hexdigest()


def _load_cached_series(cache_dir: Path, fingerprint: str):
    marker = cache_dir / "fingerprint.json"
    if not marker.exists():
        return None
    try:
        with open(marker, encoding="utf-8") as fh:
            meta = json.load(fh)
        if meta.get("fingerprint") != fingerprint:
            return None
        series = SnapshotSeries.load(cache_dir / "store")
        with open(cache_dir / "ingest.json", encoding="utf-8") as fh:
            ingest_meta = json.load(fh)
        return series, ingest_meta
    except (OSError, ValueError, KeyError):
        return None


def _store_cached_series(
    cache_dir: Path, fingerprint: str, series: SnapshotSeries, ingest_meta: dict
) -> None:
    cache_dir.mkdir(parents=True, exist_ok=True)
    series.save(cache_dir / "store")
    with open(cache_dir / "ingest.json", "w", encoding="utf-8") as fh:
        json.dump(ingest_meta, fh, indent=2)
    with open(cache_dir / "fingerprint.json", "w", encoding="utf-8") as fh:
        json.dump({"fingerprint": fingerprint}, fh, indent=2)


# --- pipeline ----------------------------------------------------------------

def run_pipeline(config: PipelineConfig) -> ReportBundle:
    """Run every stage and assemble the report bundle in memory."""
    try:
        config.validate()
    except ValueError as exc:
        raise PipelineError("config", str(exc)) from exc

    cache_dir = Path(config.out_dir) / "snapshot_cache"
    fingerprint = _input_fingerprint(config)
    cached = _load_cached_series(cache_dir, fingerprint) if config.use_cache else None

    if cached is not None:
        series, ingest_meta = cached
    else:
        try:
            result = ingest_corpus(
                config.pubs,
                config.idmap,
                scheme=config.bin_scheme,
                drop_unlinked=config.drop_unlinked,
            )
        except (OSError, ValueError) as exc:
            raise PipelineError("ingest", str(exc)) from exc
        if not result.records:
            raise PipelineError("ingest", "empty corpus after ingest")
        try:
            series = build_snapshot_series(result.records, result.bins)
        except ValueError as exc:
            raise PipelineError("snapshots", str(exc)) from exc
        ingest_meta = {
            "corpus_stats": result.stats.to_dict(),
            "link_report": result.report.to_dict(),
        }
        if config.use_cache:
            try:
                _store_cached_series(cache_dir, fingerprint, series, ingest_meta)
            except OSError as exc:
                raise PipelineError("snapshots", f"cannot write cache: {exc}") from exc

    if series.n_authors == 0:
        raise PipelineError("ingest", "empty corpus after ingest")

    tables: dict[str, Table] = {}
    labels = [tb.label for tb in series.bins]

    tables["cumulative_counts"] = Table(
        "cumulative_counts",
        ["bin", "nodes", "links"],
        [(tb.label, n, l) for tb, n, l in series.cumulative_counts()],
    )

    hist_rows = []
    fit_rows = []
    for b in range(series.n_bins):
        hist = series.degree_histogram(b)
        hist_rows.extend((labels[b], k, c) for k, c in hist.items())
        try:
            fit = fit_degree_exponent(
                hist, base=config.fit_base, min_count=config.fit_min_count
            )
            fit_rows.append(
                (labels[b], "degree_distribution", fit.slope, fit.intercept,
                 fit.r_squared, fit.n_points)
            )
        except FitError:
            pass  # degenerate snapshot; nothing to fit
    tables["degree_histograms"] = Table(
        "degree_histograms", ["bin", "k", "count"], hist_rows
    )

    try:
        cohort_rows = [
            (labels[s.bin], f"{s.fraction:g}", s.side, s.size,
             s.mean_centrality, s.collaborator_mean_centrality)
            for s in cohort_stats_table(
                series,
                config.cohorts,
                exclude_isolated=config.exclude_isolated,
                pooled=config.pooled_collaborators,
            )
        ]
    except ValueError as exc:
        raise PipelineError("metrics", str(exc)) from exc
    tables["cohort_stats"] = Table(
        "cohort_stats",
        ["bin", "cohort", "side", "size", "mean_centrality", "collab_mean_centrality"],
        cohort_rows,
    )

    attach_rows = []
    product_rows = []
    try:
        for t1, t2 in bin_pairs(series.n_bins, config.pairing):
            pair_label = (labels[t1], labels[t2])
            attach = newcomer_attachment_table(
                series, t1, t2, newcomer_count=config.newcomer_count
            )
            attach_rows.extend(
                (*pair_label, r.k, r.events, r.population, r.prob)
                for r in attach.rows()
            )
            products = collapse_pair_table(
                internal_link_table(
                    series, t1, t2,
                    pair_count=config.pair_count,
                    exclude_existing=config.exclude_existing,
                )
            )
            product_rows.extend(
                (*pair_label, r.x, r.links, r.pairs, r.prob)
                for r in products.rows()
            )
            for target, fit_fn, table in (
                ("newcomer_attachment", fit_attachment_slope, attach),
                ("internal_link_product", fit_product_slope, products),
            ):
                try:
                    fit = fit_fn(
                        table, base=config.fit_base, min_count=config.fit_min_count
                    )
                    fit_rows.append(
                        (f"{labels[t1]}->{labels[t2]}", target, fit.slope,
                         fit.intercept, fit.r_squared, fit.n_points)
                    )
                except FitError:
                    pass
    except ValueError as exc:
        raise PipelineError("attachment", str(exc)) from exc

    tables["newcomer_attachment"] = Table(
        "newcomer_attachment", ["t1", "t2", "k", "V", "N", "P"], attach_rows
    )
    tables["internal_link_products"] = Table(
        "internal_link_products", ["t1", "t2", "x", "links", "pairs", "P"], product_rows
    )
    tables["fits"] = Table(
        "fits", ["pair", "target", "slope", "intercept", "r2", "n_points"], fit_rows
    )

    file_suffix = config.output_format
    outputs = {name: f"{name}.{file_suffix}" for name in tables}
    manifest = {
        "tool": "collabdyn",
        "version": __version__,
        "input_fingerprint": fingerprint,
        "config": _echo_config(config),
        "bins": labels,
        "corpus_stats": ingest_meta["corpus_stats"],
        "link_report": ingest_meta["link_report"],
        "outputs": {
            "cumulative_counts": {
                "file": outputs["cumulative_counts"],
                "contains": "cumulative node and link counts per time bin",
            },
            "degree_histograms": {
                "file": outputs["degree_histograms"],
                "contains": "degree distribution of each cumulative snapshot",
            },
            "cohort_stats": {
                "file": outputs["cohort_stats"],
                "contains": "cohort and collaborator mean degree centrality per bin",
            },
            "newcomer_attachment": {
                "file": outputs["newcomer_attachment"],
                "contains": "newcomer attachment probability per degree class and bin pair",
            },
            "internal_link_products": {
                "file": outputs["internal_link_products"],
                "contains": "internal new-link probability pooled by degree product per bin pair",
            },
            "fits": {
                "file": outputs["fits"],
                "contains": "log-log slope fits for distributions and probability tables",
            },
        },
    }
    return ReportBundle(tables=tables, manifest=manifest)


def _echo_config(config: PipelineConfig) -> dict:
    echo = {}
    for f in fields(PipelineConfig):
        v = getattr(config, f.name)
        if isinstance(v, Path):
            v = str(v)
        elif f.name == "cohorts":
            v = format_cohort_spec(v)
        echo[f.name] = v
    return echo


def emit_tables(bundle: ReportBundle, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    """Write every table plus the manifest; emission is atomic per run.

    Files are staged in a temp directory and moved into place only after
    every table serialized, so a failed run leaves no partial outputs.
    """
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"output format must be one of {OUTPUT_FORMATS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".emit-", dir=out))
    try:
        staged: list[tuple[Path, Path]] = []
        for name, table in sorted(bundle.tables.items()):
            filename = f"{name}.{fmt}"
            path = staging / filename
            if fmt == "csv":
                with open(path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(",".join(table.columns) + "\n")
                    for row in table.rows:
                        fh.write(",".join(_format_value(v) for v in row) + "\n")
            else:
                payload = {"columns": table.columns, "rows": [list(r) for r in table.rows]}
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump(payload, fh, indent=2)
                    fh.write("\n")
            staged.append((path, out / filename))
        manifest_path = staging / "manifest.json"
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(bundle.manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        staged.append((manifest_path, out / "manifest.json"))
        for src, dst in staged:
            src.replace(dst)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    return [dst for _, dst in staged]


def run_and_emit(config: PipelineConfig) -> list[Path]:
    bundle = run_pipeline(config)
    try:
        return emit_tables(bundle, config.out_dir, config.output_format)
    except OSError as exc:
        raise PipelineError("emit", str(exc)) from exc
