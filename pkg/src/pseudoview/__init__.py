"""Geometric core for infrastructure-to-vehicle pseudo-view synthesis.

Forward depth warping with hole tracking, certified translation bounds under
a pixel-displacement budget, LiDAR-anchored monocular depth calibration,
confidence-weighted losses, diffusion inpainting, and a cascade orchestrator
that chains pseudo views off real observations.  Hot kernels run through a
compiled extension when available, with a bit-identical numpy fallback
(select it explicitly with PSEUDOVIEW_FORCE_NUMPY=1).
"""

from ._kernels import BACKEND
from .bounds import (
    DEFAULT_EPSILON,
    TranslationBounds,
    WarpBudget,
    certify_pose,
    certify_pose_full,
    generate_pseudo_pose,
    pixel_displacement,
    scene_extent_from_depth,
    solve_bounds_lateral,
    solve_bounds_with_tz,
)
from .calibration import (
    CalibParams,
    FitReport,
    PairSample,
    apply_calibration,
    build_pairs,
    fit_calibration,
    huber_loss,
)
from .camera import (
    CameraIntrinsics,
    Pose,
    orthonormalize,
    project,
    relative_pose,
    unproject,
)
from .cascade import CascadeConfig, PseudoViewRecord, cascade_round, run_cascade
from .errors import (
    CertificationError,
    FormatError,
    InpaintContractError,
    InsufficientDataError,
    PseudoviewError,
    RankDeficiencyError,
    RenderError,
)
from .image import ColorImage, DepthImage, DisparityImage
from .inpaint import diffusion_free_inpaint, harmonic_fill, identity_inpaint
from .losses import (
    ConfidenceMap,
    LossBreakdown,
    base_loss,
    confidence_loss,
    confidence_weights,
    total_loss,
    with_confidence,
)
from .scene import Plane, SceneRenderer, load_scene, scene_from_dict
from .ssim import ssim_map, ssim_mean
from .warp import WarpOutput, forward_warp, forward_warp_point, hole_fraction

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DEFAULT_EPSILON",
    "CalibParams",
    "CameraIntrinsics",
    "CascadeConfig",
    "CertificationError",
    "ColorImage",
    "ConfidenceMap",
    "DepthImage",
    "DisparityImage",
    "FitReport",
    "FormatError",
    "InpaintContractError",
    "InsufficientDataError",
    "LossBreakdown",
    "PairSample",
    "Plane",
    "Pose",
    "PseudoViewRecord",
    "PseudoviewError",
    "RankDeficiencyError",
    "RenderError",
    "SceneRenderer",
    "TranslationBounds",
    "WarpBudget",
    "WarpOutput",
    "apply_calibration",
    "base_loss",
    "build_pairs",
    "cascade_round",
    "certify_pose",
    "certify_pose_full",
    "confidence_loss",
    "confidence_weights",
    "diffusion_free_inpaint",
    "fit_calibration",
    "forward_warp",
    "forward_warp_point",
    "generate_pseudo_pose",
    "harmonic_fill",
    "hole_fraction",
    "huber_loss",
    "identity_inpaint",
    "load_scene",
    "orthonormalize",
    "pixel_displacement",
    "project",
    "relative_pose",
    "run_cascade",
    "scene_extent_from_depth",
    "scene_from_dict",
    "solve_bounds_lateral",
    "solve_bounds_with_tz",
    "ssim_map",
    "ssim_mean",
    "total_loss",
    "unproject",
    "with_confidence",
]
