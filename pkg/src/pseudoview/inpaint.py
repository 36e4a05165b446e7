"""Deterministic hole filling by harmonic interpolation.

Every hole pixel is repeatedly replaced by the mean of its in-image
4-neighbors (red-black Gauss-Seidel sweeps) until the largest per-sweep
change drops below a tolerance or the sweep budget runs out.  In the limit
this solves the Laplace equation with the valid pixels as Dirichlet data, so
constant surroundings are reproduced exactly and affine fields are
reproduced up to the stopping tolerance.  Color channels and depth are
filled independently by the same procedure; non-hole pixels pass through bit
for bit.

This is the deterministic stand-in for a generative inpainting back end: it
satisfies the same interface contract (non-hole pixels unchanged, residual
mask contained in the hole mask).
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .image import ColorImage, DepthImage

TOL = 1e-4
MAX_SWEEPS = 500


def _neighbor_counts(H: int, W: int) -> np.ndarray:
    cnt = np.full((H, W), 4.0)
    cnt[0, :] -= 1.0
    cnt[-1, :] -= 1.0
    cnt[:, 0] -= 1.0
    cnt[:, -1] -= 1.0
    return cnt


def harmonic_fill(
    channel: np.ndarray,
    hole: np.ndarray,
    tol: float = TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> np.ndarray:
    """Fill ``hole`` pixels of a 2D channel by relaxation; returns a copy.

    Hole pixels start at 0 and are swept until max |change| < tol or
    max_sweeps sweeps have run.  With no valid pixels at all the input comes
    back unchanged (there is no boundary data to propagate).
    """
    hole = np.asarray(hole, dtype=bool)
    v = np.array(channel, dtype=np.float64)
    if v.shape != hole.shape:
        raise ValueError(f"channel {v.shape} vs hole mask {hole.shape}")
    if not hole.any() or hole.all():
        return v
    v[hole] = 0.0
    unknown = np.ascontiguousarray(hole.astype(np.uint8))
    cnt = _neighbor_counts(*v.shape)
    for _ in range(max_sweeps):
        if _kernels.redblack_sweep(v, unknown, cnt) < tol:
            break
    return v


def diffusion_free_inpaint(
    image: ColorImage,
    depth: DepthImage,
    hole_mask: np.ndarray,
    tol: float = TOL,
    max_sweeps: int = MAX_SWEEPS,
):
    """Harmonic fill of color and depth holes.

    Returns (ColorImage, DepthImage, residual_mask).  The residual mask
    marks hole pixels still without usable content: all of them when the
    image is entirely holes, plus any pixel the sweep budget could not reach
    with positive depth (possible only for holes deeper than max_sweeps
    pixels).  Non-hole pixels are returned unchanged, bit-exact.
    """
    hole = np.asarray(hole_mask, dtype=bool)
    H, W = depth.data.shape
    if hole.shape != (H, W) or (image.height, image.width) != (H, W):
        raise ValueError("image, depth, and hole mask must share dimensions")
    if hole.all():
        return image, depth, hole.copy()

    color = np.empty_like(image.data)
    for c in range(3):
        color[:, :, c] = harmonic_fill(image.data[:, :, c], hole, tol, max_sweeps)
    filled_depth = harmonic_fill(depth.data, hole, tol, max_sweeps)

    depth_valid = filled_depth > 0.0
    residual = hole & ~depth_valid
    return (
        ColorImage(color),
        DepthImage(np.where(depth_valid, filled_depth, 0.0), depth_valid),
        residual,
    )


def identity_inpaint(image: ColorImage, depth: DepthImage, hole_mask: np.ndarray):
    """Inpainter that fills nothing: returns its inputs and the full mask."""
    hole = np.asarray(hole_mask, dtype=bool)
    return image, depth, hole.copy()
