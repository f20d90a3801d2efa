"""Multi-view subspace clustering with a jointly smoothed representation.

The library learns one representation C shared by all views plus a per-view
inconsistency term, regularized by cross-view graph smoothness and a
low-rank penalty, then clusters the symmetrized magnitude of C spectrally.
"""

from .data import (
    ClusterReport,
    DataError,
    MultiViewDataset,
    SyntheticSpec,
    generate_synthetic,
    load_manifest,
    read_report,
    save_dataset,
    write_report,
)
from .graphs import AffinityGraph, GraphError, average_knn_graph, knn_graph, laplacian
from .linalg import (
    AsymmetryError,
    LinalgError,
    NonConvergenceError,
    NotPositiveDefiniteError,
    SingularSystemError,
    SvdFactors,
    svd,
    svt,
    solve_spd,
    solve_sylvester,
    sym_eig,
)
from .metrics import acc, ari, contingency_table, nmi, purity, score_all
from .optimizer import (
    DROP_INCONSISTENCY,
    DROP_LOWRANK,
    DROP_SMOOTHNESS,
    FitResult,
    JsmcConfig,
    OptimizerState,
    Precomputed,
    fit,
    lagrangian,
    objective,
)
from .pipeline import (
    GridTooLargeError,
    ablation_suite,
    baseline_reports,
    grid_search,
    loglog_slope,
    run_benchmark,
    run_pipeline,
)
from .spectral import (
    SpectralConfig,
    SpectralError,
    affinity_from_representation,
    spectral_partition,
)

__version__ = "0.1.0"

__all__ = [
    "AffinityGraph",
    "AsymmetryError",
    "ClusterReport",
    "DataError",
    "DROP_INCONSISTENCY",
    "DROP_LOWRANK",
    "DROP_SMOOTHNESS",
    "FitResult",
    "GraphError",
    "GridTooLargeError",
    "JsmcConfig",
    "LinalgError",
    "MultiViewDataset",
    "NonConvergenceError",
    "NotPositiveDefiniteError",
    "OptimizerState",
    "Precomputed",
    "SingularSystemError",
    "SpectralConfig",
    "SpectralError",
    "SvdFactors",
    "SyntheticSpec",
    "ablation_suite",
    "acc",
    "affinity_from_representation",
    "ari",
    "average_knn_graph",
    "baseline_reports",
    "contingency_table",
    "fit",
    "generate_synthetic",
    "grid_search",
    "knn_graph",
    "lagrangian",
    "laplacian",
    "load_manifest",
    "loglog_slope",
    "nmi",
    "objective",
    "purity",
    "read_report",
    "run_benchmark",
    "run_pipeline",
    "save_dataset",
    "score_all",
    "solve_spd",
    "solve_sylvester",
    "spectral_partition",
    "svd",
    "svt",
    "sym_eig",
    "write_report",
]
