"""collabdyn: measurement toolkit for evolving co-authorship networks.

Builds cumulative co-authorship snapshots from publication exports and
measures how the network grows: degree distributions, centrality cohorts,
newcomer-attachment and internal-link probabilities, and log-log slope
fits, with a synthetic generator and brute-force oracle for validation.
"""

__version__ = "0.1.0"

from .attachment import (
    AttachmentTable,
    PairLinkTable,
    ProductLinkTable,
    bin_pairs,
    collapse_pair_table,
    internal_link_table,
    newcomer_attachment_table,
)
from .centrality import (
    CohortSpec,
    CohortStats,
    cohort_mean_centrality,
    cohort_stats_table,
    collaborator_mean_centrality,
    degree_centrality,
    select_cohort,
)
from .fitting import (
    BinnedPoint,
    FitError,
    SlopeFit,
    fit_attachment_slope,
    fit_degree_exponent,
    fit_product_slope,
    fit_slope,
    log_bin,
)
from .generator import GeneratorParams, generate_team_corpus
from .ingest import (
    CorpusStats,
    IdMapEntry,
    LinkReport,
    PublicationRecord,
    RawPublication,
    TimeBin,
    assign_time_bins,
    ingest_corpus,
    link_author_names,
    normalize_name,
    parse_idmap,
    parse_publications,
    synthetic_id,
    validate_corpus,
)
from .oracle import OracleLimitError, brute_force_metrics
from .pipeline import (
    PipelineConfig,
    PipelineError,
    ReportBundle,
    emit_tables,
    run_pipeline,
)
from .snapshots import DegreeHistogram, SnapshotSeries, build_snapshot_series

__all__ = [
    "__version__",
    "AttachmentTable",
    "BinnedPoint",
    "CohortSpec",
    "CohortStats",
    "CorpusStats",
    "DegreeHistogram",
    "FitError",
    "GeneratorParams",
    "IdMapEntry",
    "LinkReport",
    "OracleLimitError",
    "PairLinkTable",
    "PipelineConfig",
    "PipelineError",
    "ProductLinkTable",
    "PublicationRecord",
    "RawPublication",
    "ReportBundle",
    "SlopeFit",
    "SnapshotSeries",
    "TimeBin",
    "assign_time_bins",
    "bin_pairs",
    "brute_force_metrics",
    "build_snapshot_series",
    "cohort_mean_centrality",
    "cohort_stats_table",
    "collaborator_mean_centrality",
    "collapse_pair_table",
    "degree_centrality",
    "emit_tables",
    "fit_attachment_slope",
    "fit_degree_exponent",
    "fit_product_slope",
    "fit_slope",
    "generate_team_corpus",
    "ingest_corpus",
    "internal_link_table",
    "link_author_names",
    "log_bin",
    "newcomer_attachment_table",
    "normalize_name",
    "parse_idmap",
    "parse_publications",
    "run_pipeline",
    "select_cohort",
    "synthetic_id",
    "validate_corpus",
]
