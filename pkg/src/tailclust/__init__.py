"""tailclust: joint-tail dependence features and fuzzy extremal clustering.

Extracts band periodograms from multichannel block-stationary signals,
standardizes them to regularly-varying margins, estimates tail pairwise
dependence matrices, solves the canonical tail dependence problem for
per-subject tail topologies, and soft-clusters subjects with fuzzy C-means.
Includes a transformed-linear simulator with known ground truth.
"""

from .cluster import (
    ConfusionMatrix,
    FeatureStack,
    MembershipMatrix,
    accuracy,
    assign_labels,
    cca_canonical_vectors,
    confusion_matrix,
    fuzzy_cmeans,
    membership_from_distances,
    stack_tail_topologies,
)
from .ctd import (
    ConditionReport,
    CtdSolution,
    extremal_scores,
    numeric_ctd_oracle,
    solve_canonical,
    solve_ctd,
)
from .errors import (
    NumericalError,
    ParseError,
    SingularityError,
    TailclustError,
    ValidationError,
)
from .ingest import (
    ChannelPartition,
    ManifestEntry,
    SignalPanel,
    load_feature_panel,
    load_manifest,
    load_signal_panel,
    parse_partition,
    write_feature_panel,
    write_manifest,
)
from .margins import (
    MarginSpec,
    frechet2_quantile,
    rank_standardize,
    symmetric_pareto2_quantile,
)
from .pipeline import PipelineConfig, RunReport, run_pipeline, run_report_export
from .simgen import (
    GroundTruth,
    SimulationResult,
    SimulationSpec,
    cluster_truth,
    default_cluster_deltas,
    frechet2_sample,
    simulate_panel,
    tl_add,
    tl_matvec,
    tl_scale,
    tl_softplus,
    tl_softplus_inv,
)
from .spectral import (
    BAND_EDGES_HZ,
    BandPeriodogramPanel,
    BandSpec,
    band_bins,
    band_periodogram,
    local_dft,
)
from .tpdm import Tpdm, edm, estimate_tpdm, load_tpdm_csv, write_tpdm_csv

__version__ = "0.1.0"

__all__ = [
    "BAND_EDGES_HZ",
    "BandPeriodogramPanel",
    "BandSpec",
    "ChannelPartition",
    "ConditionReport",
    "ConfusionMatrix",
    "CtdSolution",
    "FeatureStack",
    "GroundTruth",
    "ManifestEntry",
    "MarginSpec",
    "MembershipMatrix",
    "NumericalError",
    "ParseError",
    "PipelineConfig",
    "RunReport",
    "SignalPanel",
    "SimulationResult",
    "SimulationSpec",
    "SingularityError",
    "TailclustError",
    "Tpdm",
    "ValidationError",
    "accuracy",
    "assign_labels",
    "band_bins",
    "band_periodogram",
    "cca_canonical_vectors",
    "cluster_truth",
    "confusion_matrix",
    "default_cluster_deltas",
    "edm",
    "estimate_tpdm",
    "extremal_scores",
    "frechet2_quantile",
    "frechet2_sample",
    "fuzzy_cmeans",
    "load_feature_panel",
    "load_manifest",
    "load_signal_panel",
    "load_tpdm_csv",
    "local_dft",
    "membership_from_distances",
    "numeric_ctd_oracle",
    "parse_partition",
    "rank_standardize",
    "run_pipeline",
    "run_report_export",
    "simulate_panel",
    "solve_canonical",
    "solve_ctd",
    "stack_tail_topologies",
    "symmetric_pareto2_quantile",
    "tl_add",
    "tl_matvec",
    "tl_scale",
    "tl_softplus",
    "tl_softplus_inv",
    "write_feature_panel",
    "write_manifest",
    "write_tpdm_csv",
]
