"""Probability-simplex clustering with scaled-Beta densities.

Softmax-style prediction vectors live on the probability simplex, where
per-cluster scaled-Beta coordinate densities with a unimodality constraint
give sharper clusters than generic geometric distortions. This package
provides that density family and its estimators, the block-coordinate
clustering built on it, distortion and Dirichlet baselines, alignment and
evaluation metrics, synthetic benchmark generators, and a CLI harness.
"""

__version__ = "0.1.0"

from .baselines import (
    DistortionConfig,
    DistortionResult,
    KDirsConfig,
    KDirsResult,
    argmax_baseline,
    dirichlet_mle,
    distortion_kmeans,
    hilbert_distance,
    k_dirs,
    kl_divergence,
)
from .clustering import (
    ClusterModel,
    ClusterRunConfig,
    EstimatorConfig,
    FitResult,
    assign,
    fit,
    objective,
    update_params,
    update_proportions,
    vertex_init,
)
from .density import (
    ConstraintConfig,
    SBetaParams,
    concentration,
    constrain,
    log_pdf,
    mean,
    mle_estimate,
    mode,
    mom_estimate,
    multivariate_log_pdf,
    params_from_mode_concentration,
    sample_sbeta,
    variance,
)
from .datasets import (
    DirichletSpec,
    LabeledSimplexDataset,
    downsample_rows,
    load_csv,
    load_labels,
    load_predictions,
    load_spxd,
    make_isimus,
    sample_dirichlet_mixture,
    save_csv,
    save_labels,
    save_spxd,
    simu_spec,
)
from .errors import (
    AssignmentError,
    ConfigError,
    ConvergenceError,
    DataError,
    DegenerateDataError,
    DomainError,
    SBetasError,
    ShapeError,
)
from .metrics import (
    AlignmentMap,
    argmax_align,
    evaluate,
    hungarian_align,
    nmi,
)
from .simplex import as_simplex, interior_project

__all__ = [
    "__version__",
    "SBetaParams",
    "ConstraintConfig",
    "log_pdf",
    "multivariate_log_pdf",
    "mean",
    "variance",
    "mode",
    "concentration",
    "params_from_mode_concentration",
    "mom_estimate",
    "mle_estimate",
    "constrain",
    "sample_sbeta",
    "ClusterModel",
    "ClusterRunConfig",
    "EstimatorConfig",
    "FitResult",
    "vertex_init",
    "assign",
    "update_proportions",
    "update_params",
    "objective",
    "fit",
    "DistortionConfig",
    "DistortionResult",
    "distortion_kmeans",
    "argmax_baseline",
    "kl_divergence",
    "hilbert_distance",
    "dirichlet_mle",
    "KDirsConfig",
    "KDirsResult",
    "k_dirs",
    "AlignmentMap",
    "hungarian_align",
    "argmax_align",
    "nmi",
    "evaluate",
    "DirichletSpec",
    "LabeledSimplexDataset",
    "simu_spec",
    "make_isimus",
    "sample_dirichlet_mixture",
    "save_csv",
    "load_csv",
    "save_spxd",
    "load_spxd",
    "save_labels",
    "load_labels",
    "load_predictions",
    "downsample_rows",
    "as_simplex",
    "interior_project",
    "SBetasError",
    "DomainError",
    "ShapeError",
    "DataError",
    "ConfigError",
    "DegenerateDataError",
    "ConvergenceError",
    "AssignmentError",
]
