"""Camera intrinsic self-calibration from three-view point correspondences.

Estimates (fx, fy, cx, cy) by minimizing algebraic constraints that a
trifocal tensor must satisfy once expressed in calibrated coordinates,
with a two-view baseline built on essential-matrix constraints for
comparison, robust multi-tensor variants, and a synthetic benchmark.
"""

from .backend import BACKEND
from .calibration import (
    CalibrationConfig,
    CalibrationReport,
    calibrate_direct,
    calibrate_msac,
    calibrate_msac_opt,
    constraint_cost,
    msac_score,
    tensor_residual_norms,
)
from .constraints import RESIDUAL_LABELS, quartic_residuals, quartic_residuals_unchecked
from .corrfile import (
    CorrespondenceData,
    TripletBlock,
    read_correspondence_file,
    write_correspondence_file,
)
from .errors import (
    AllCandidatesFailed,
    CalibrationError,
    DegenerateCloud,
    DegenerateEssential,
    DepthZero,
    EmptyResiduals,
    IllConditioned,
    NoConvergence,
    NotNormalized,
    SamplingExhausted,
    SchemaError,
    SingularIntrinsics,
    TooFewPairs,
    TooFewTriples,
    TransferSingular,
    ZeroTensor,
)
from .estimation import (
    EstimationDiagnostics,
    linear_estimate,
    normalize_points,
    transfer_error,
    transfer_errors,
)
from .fundamental import calibrate_fundamental, estimate_fundamental, pairs_from_triples
from .geometry import (
    CameraPose,
    Intrinsics,
    apply_intrinsics_transform,
    calibrated_trifocal_from_poses,
    cross_matrix,
    normalize_tensor,
    project,
    project_points,
    relative_pose,
    tensor_distance,
    transform_tensor,
    trifocal_from_projections,
)
from .solver import SolveResult, solve_damped_lsq
from .synthetic import (
    DEFAULT_MASTER_SEED,
    ExperimentConfig,
    RunRecord,
    SceneConfig,
    add_pixel_noise,
    corrupt_third_view,
    execute_run,
    generate_scene,
    mean_relative_error,
    perturb_intrinsics,
    project_triplet,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # geometry
    "Intrinsics",
    "CameraPose",
    "cross_matrix",
    "project",
    "project_points",
    "relative_pose",
    "calibrated_trifocal_from_poses",
    "trifocal_from_projections",
    "transform_tensor",
    "apply_intrinsics_transform",
    "normalize_tensor",
    "tensor_distance",
    # constraints
    "RESIDUAL_LABELS",
    "quartic_residuals",
    "quartic_residuals_unchecked",
    # estimation
    "EstimationDiagnostics",
    "linear_estimate",
    "normalize_points",
    "transfer_error",
    "transfer_errors",
    # solver
    "SolveResult",
    "solve_damped_lsq",
    # calibration
    "CalibrationConfig",
    "CalibrationReport",
    "calibrate_direct",
    "calibrate_msac",
    "calibrate_msac_opt",
    "constraint_cost",
    "msac_score",
    "tensor_residual_norms",
    # fundamental baseline
    "estimate_fundamental",
    "pairs_from_triples",
    "calibrate_fundamental",
    # synthetic benchmark
    "DEFAULT_MASTER_SEED",
    "SceneConfig",
    "ExperimentConfig",
    "RunRecord",
    "generate_scene",
    "project_triplet",
    "add_pixel_noise",
    "perturb_intrinsics",
    "corrupt_third_view",
    "mean_relative_error",
    "execute_run",
    "run_experiment",
    # correspondence files
    "CorrespondenceData",
    "TripletBlock",
    "read_correspondence_file",
    "write_correspondence_file",
    # errors
    "CalibrationError",
    "DepthZero",
    "SingularIntrinsics",
    "ZeroTensor",
    "NotNormalized",
    "DegenerateCloud",
    "TooFewTriples",
    "TooFewPairs",
    "IllConditioned",
    "TransferSingular",
    "EmptyResiduals",
    "AllCandidatesFailed",
    "DegenerateEssential",
    "NoConvergence",
    "SamplingExhausted",
    "SchemaError",
]
