"""Pure-numpy kernels: splat scatter-accumulation and red-black relaxation.

These are the fallback implementations used when the compiled extension is
unavailable (or when PSEUDOVIEW_FORCE_NUMPY=1).  They are written to be
bit-identical to the compiled versions: accumulation runs in input order
(np.bincount / np.minimum.at iterate their inputs sequentially) and the
neighbor sums in the relaxation sweep use the same association order.
"""

from __future__ import annotations

import numpy as np


def scatter_splats(
    idx: np.ndarray,
    w: np.ndarray,
    z: np.ndarray,
    rgb: np.ndarray,
    n_pixels: int,
    depth_band: float,
):
    """Two-pass z-buffered scatter of weighted color splats.

    idx: (M,) int64 flat target-pixel indices in [0, n_pixels).
    w, z: (M,) float64 bilinear weights and splat depths.
    rgb: (M, 3) float64 splat colors.

    Pass 1 records the minimum arriving depth per target pixel.  Pass 2
    accumulates weight and weighted color for splats whose depth lies within
    the relative band (z <= minz * (1 + depth_band)).  Returns
    (minz, wsum, csum); normalization is the caller's job.
    """
    minz = np.full(n_pixels, np.inf)
    np.minimum.at(minz, idx, z)
    keep = z <= minz[idx] * (1.0 + depth_band)
    ki = idx[keep]
    kw = w[keep]
    kr = rgb[keep]
    wsum = np.bincount(ki, weights=kw, minlength=n_pixels)
    csum = np.empty((n_pixels, 3))
    for c in range(3):
        csum[:, c] = np.bincount(ki, weights=kw * kr[:, c], minlength=n_pixels)
    return minz, wsum, csum


def redblack_sweep(v: np.ndarray, unknown: np.ndarray, cnt: np.ndarray) -> float:
    """One red-black Gauss-Seidel sweep of the masked harmonic fill, in place.

    v: (H, W) float64, updated in place at unknown pixels.
    unknown: (H, W) uint8/bool, nonzero where the value is being solved for.
    cnt: (H, W) float64 count of in-image 4-neighbors.

    Each unknown pixel is replaced by the mean of its in-image neighbors
    (out-of-image sides contribute nothing).  Pixels are updated in two
    checkerboard phases so no pixel reads a same-phase neighbor; this makes
    the vectorized update identical to a sequential in-place sweep.  Returns
    the max absolute change over updated pixels.
    """
    H, W = v.shape
    unk = unknown != 0
    parity = (np.arange(H)[:, None] + np.arange(W)[None, :]) & 1
    maxd = 0.0
    for phase in (0, 1):
        up = np.zeros_like(v)
        up[1:, :] = v[:-1, :]
        down = np.zeros_like(v)
        down[:-1, :] = v[1:, :]
        left = np.zeros_like(v)
        left[:, 1:] = v[:, :-1]
        right = np.zeros_like(v)
        right[:, :-1] = v[:, 1:]
        newv = (((up + down) + left) + right) / cnt
        m = unk & (parity == phase)
        if m.any():
            d = np.abs(newv[m] - v[m])
            if d.size:
                maxd = max(maxd, float(d.max()))
            v[m] = newv[m]
    return maxd
