"""Confidence weighting and loss evaluation over image pairs.

The confidence map blends photometric agreement and structural similarity:
W = lambda1 * (1 - L2) + (1 - lambda1) * SSIM, clamped to [0, 1], where L2 is
the per-pixel channel-mean squared difference.  The confidence loss is the
mean of W times the per-pixel channel-mean absolute difference, so fully
distrusted pixels contribute nothing.  The base reconstruction loss combines
weighted L1, the dissimilarity form (1 - SSIM)/2, and an L1 depth term over
mutually valid pixels.  These are pure evaluators; nothing here is
differentiated through a scene model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .image import ColorImage, DepthImage
from .ssim import ssim_map, ssim_mean

LAMBDA = 0.8  # base-loss L1 vs SSIM weight
LAMBDA1 = 0.5  # confidence L2 vs SSIM weight


@dataclass(frozen=True)
class ConfidenceMap:
    """Per-pixel weights in [0, 1]; 1 means full trust."""

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError(f"confidence map must be (H, W), got {data.shape}")
        if not np.isfinite(data).all():
            raise ValueError("confidence map contains non-finite values")
        if data.min() < 0.0 or data.max() > 1.0:
            raise ValueError("confidence weights must lie in [0, 1]")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)


@dataclass(frozen=True)
class LossBreakdown:
    l1: float
    ssim_term: float
    depth_l1: float
    l_ori: float
    l_con: float
    total: float

    def __post_init__(self):
        if self.total != self.l_ori + self.l_con:
            raise ValueError("total must equal l_ori + l_con exactly")


def _check_same_size(a: ColorImage, b: ColorImage) -> None:
    if (a.height, a.width) != (b.height, b.width):
        raise ValueError(
            f"image sizes differ: {a.height}x{a.width} vs {b.height}x{b.width}"
        )


def confidence_weights(
    rendered: ColorImage,
    inpainted: ColorImage,
    lambda1: float = LAMBDA1,
    scalar_l2: bool = False,
) -> ConfidenceMap:
    """W = lambda1 * (1 - L2) + (1 - lambda1) * SSIM, clamped to [0, 1].

    L2 is the per-pixel channel-mean squared difference by default.  With
    scalar_l2 the L2 term collapses to the full-image mean instead (exposed
    for comparison, not the recommended reading).
    """
    _check_same_size(rendered, inpainted)
    if not 0.0 <= lambda1 <= 1.0:
        raise ValueError(f"lambda1 must be in [0, 1], got {lambda1}")
    sq = (rendered.data - inpainted.data) ** 2
    if scalar_l2:
        l2 = float(sq.mean())
    else:
        l2 = sq.mean(axis=2)
    s = ssim_map(rendered, inpainted)
    w = lambda1 * (1.0 - l2) + (1.0 - lambda1) * s
    return ConfidenceMap(np.clip(w, 0.0, 1.0))


def confidence_loss(
    rendered: ColorImage, inpainted: ColorImage, W: ConfidenceMap
) -> float:
    """Mean over pixels of W times the channel-mean absolute difference."""
    _check_same_size(rendered, inpainted)
    if W.data.shape != (rendered.height, rendered.width):
        raise ValueError("confidence map size mismatch")
    l1 = np.abs(rendered.data - inpainted.data).mean(axis=2)
    return float((W.data * l1).mean())


def base_loss(
    rendered_img: ColorImage,
    gt_img: ColorImage,
    rendered_depth: DepthImage = None,
    gt_depth: DepthImage = None,
    lam: float = LAMBDA,
) -> LossBreakdown:
    """l_ori = lam * L1 + (1 - lam) * (1 - SSIM)/2 + depth L1.

    The depth term averages |difference| over mutually valid pixels; if the
    depth images are omitted (both None) it is 0, and if they share no valid
    pixel it is 0 with a warning.  Returns a LossBreakdown with l_con = 0;
    combine with a confidence loss via with_confidence / total_loss.
    """
    _check_same_size(rendered_img, gt_img)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam must be in [0, 1], got {lam}")
    l1 = float(np.abs(rendered_img.data - gt_img.data).mean())
    ssim_term = (1.0 - ssim_mean(rendered_img, gt_img)) / 2.0

    if (rendered_depth is None) != (gt_depth is None):
        raise ValueError("provide both depth images or neither")
    depth_l1 = 0.0
    if rendered_depth is not None:
        if rendered_depth.data.shape != gt_depth.data.shape:
            raise ValueError("depth sizes differ")
        both = rendered_depth.mask & gt_depth.mask
        if both.any():
            depth_l1 = float(
                np.abs(rendered_depth.data[both] - gt_depth.data[both]).mean()
            )
        else:
            warnings.warn(
                "no mutually valid depth pixels; depth term set to 0",
                stacklevel=2,
            )
    l_ori = lam * l1 + (1.0 - lam) * ssim_term + depth_l1
    return LossBreakdown(
        l1=l1,
        ssim_term=ssim_term,
        depth_l1=depth_l1,
        l_ori=l_ori,
        l_con=0.0,
        total=l_ori + 0.0,
    )


def with_confidence(base: LossBreakdown, l_con: float) -> LossBreakdown:
    """Attach a confidence loss to a base breakdown; total stays exact."""
    l_con = float(l_con)
    return LossBreakdown(
        l1=base.l1,
        ssim_term=base.ssim_term,
        depth_l1=base.depth_l1,
        l_ori=base.l_ori,
        l_con=l_con,
        total=base.l_ori + l_con,
    )


def total_loss(base: LossBreakdown, l_con: float) -> float:
    """Sum of the base term and the confidence term."""
    return base.l_ori + float(l_con)
