"""ROC curve optimality toolkit.

Builds score-variable-threshold (SVT) ROC curves from pairs of conditional
score densities, tests them for concavity, constructs the Neyman-Pearson
optimal curve from a non-concave SVT curve by slope-thresholded segment
summation, and verifies the construction against an independent direct
computation from the densities.
"""

from .builder import (
    DecisionRegion,
    EtaPoint,
    Segment,
    build_optimal_roc,
    coarsen_empirical,
    eta_sweep_values,
    lrt_point,
    recover_regions,
    segments_at,
)
from .models import (
    Gaussian,
    GaussianMixture,
    Hypothesis,
    ModelSpecError,
    PiecewiseLinear,
    ScoreModel,
    Uniform,
    ValidationReport,
    cdf,
    central_mass_interval,
    density,
    likelihood_ratio,
    load_model,
    parse_model,
    validate,
)
from .oracle import (
    DominanceReport,
    FlatLevelSetError,
    dominance_check,
    grid_eta_values,
    lrt_regions_analytic,
    lrt_roc_direct,
    midcell_eta_values,
    randomized_hull,
)
from .roc import (
    ConcavityReport,
    DegenerateModelError,
    RocCurve,
    RocPoint,
    SlopeProfile,
    default_concavity_tol,
    empirical_svt_roc,
    is_concave,
    read_curve_csv,
    read_samples_csv,
    slope_profile,
    svt_roc,
    write_curve_csv,
    write_samples_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Hypothesis",
    "ScoreModel",
    "Gaussian",
    "GaussianMixture",
    "Uniform",
    "PiecewiseLinear",
    "ModelSpecError",
    "ValidationReport",
    "density",
    "cdf",
    "likelihood_ratio",
    "validate",
    "central_mass_interval",
    "parse_model",
    "load_model",
    "RocPoint",
    "RocCurve",
    "SlopeProfile",
    "ConcavityReport",
    "DegenerateModelError",
    "svt_roc",
    "slope_profile",
    "is_concave",
    "empirical_svt_roc",
    "default_concavity_tol",
    "write_curve_csv",
    "read_curve_csv",
    "read_samples_csv",
    "write_samples_csv",
    "Segment",
    "EtaPoint",
    "DecisionRegion",
    "segments_at",
    "lrt_point",
    "eta_sweep_values",
    "build_optimal_roc",
    "recover_regions",
    "coarsen_empirical",
    "DominanceReport",
    "FlatLevelSetError",
    "lrt_regions_analytic",
    "lrt_roc_direct",
    "grid_eta_values",
    "midcell_eta_values",
    "randomized_hull",
    "dominance_check",
    "__version__",
]
