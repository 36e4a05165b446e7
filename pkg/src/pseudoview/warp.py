"""Forward depth warping with z-buffering, bilinear splatting, hole detection.

Each valid source pixel is unprojected with the intrinsics, rigidly moved by
the relative pose, reprojected, and splatted onto its four surrounding integer
target pixels with bilinear weights.  Per target pixel a z-buffer keeps the
splats whose depth lies within a relative band of the minimum arriving depth;
the output color is their weight-normalized average and the output depth is
that minimum.  Pixels whose kept splats carry total weight below a floor are
holes: sentinel depth 0, black color, mask set.

Target coordinates within ``snap_eps`` of an integer are snapped to it before
the bilinear weights are computed.  This removes the ~1e-12 px float noise of
an unproject/reproject round trip, which is what makes an identity-pose warp
reproduce its input bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .camera import CameraIntrinsics, Pose
from .image import ColorImage, DepthImage

DEPTH_BAND = 0.01
WEIGHT_FLOOR = 1e-4
SNAP_EPS = 1e-9


@dataclass(frozen=True)
class WarpOutput:
    """Warped color, warped depth, and the hole mask (true = hole).

    The three buffers share dimensions.  hole_mask is true exactly where the
    depth validity mask is false.
    """

    image: ColorImage
    depth: DepthImage
    hole_mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.hole_mask, dtype=bool)
        if mask.shape != self.depth.data.shape:
            raise ValueError("hole_mask shape mismatch")
        if (self.image.height, self.image.width) != (self.depth.height, self.depth.width):
            raise ValueError("image/depth shape mismatch")
        if not np.array_equal(mask, ~self.depth.mask):
            raise ValueError("hole_mask must be the complement of depth validity")
        mask = np.ascontiguousarray(mask)
        mask.setflags(write=False)
        object.__setattr__(self, "hole_mask", mask)


def forward_warp_point(p: np.ndarray, rel: Pose) -> np.ndarray:
    """Rigidly move camera-frame points into the target camera frame."""
    return rel.transform(np.asarray(p, dtype=np.float64))


def forward_warp(
    src_image: ColorImage,
    src_depth: DepthImage,
    K: CameraIntrinsics,
    rel: Pose,
    *,
    target_K: CameraIntrinsics = None,
    depth_band: float = DEPTH_BAND,
    weight_floor: float = WEIGHT_FLOOR,
) -> WarpOutput:
    """Forward-warp a source view into the target view given by ``rel``.

    ``rel`` maps source-camera coordinates to target-camera coordinates.
    ``target_K`` defaults to ``K`` (same camera for both views).
    """
    if (src_image.height, src_image.width) != (src_depth.height, src_depth.width):
        raise ValueError(
            f"image {src_image.height}x{src_image.width} vs "
            f"depth {src_depth.height}x{src_depth.width}"
        )
    if (src_image.height, src_image.width) != (K.height, K.width):
        raise ValueError("source buffers do not match intrinsics dimensions")
    if target_K is None:
        target_K = K
    H, W = target_K.height, target_K.width

    valid = src_depth.mask
    vv, uu = np.nonzero(valid)  # row-major order fixes the splat order
    n = vv.shape[0]
    if n == 0:
        return _empty_output(H, W)

    d = src_depth.data[vv, uu]
    x = (uu - K.cx) / K.fx * d
    y = (vv - K.cy) / K.fy * d
    pts = np.stack([x, y, d], axis=-1)
    moved = pts @ rel.rotation.T + rel.translation

    zp = moved[:, 2]
    front = zp > 0.0
    if not front.all():
        moved = moved[front]
        zp = zp[front]
        vv, uu = vv[front], uu[front]
        n = zp.shape[0]
        if n == 0:
            return _empty_output(H, W)

    uf = target_K.fx * moved[:, 0] / zp + target_K.cx
    vf = target_K.fy * moved[:, 1] / zp + target_K.cy
    ur = np.rint(uf)
    vr = np.rint(vf)
    uf = np.where(np.abs(uf - ur) <= SNAP_EPS, ur, uf)
    vf = np.where(np.abs(vf - vr) <= SNAP_EPS, vr, vf)

    u0 = np.floor(uf)
    v0 = np.floor(vf)
    au = uf - u0
    av = vf - v0

    # corner order (v0,u0), (v0,u1), (v1,u0), (v1,u1); kernels rely on it
    cu = np.stack([u0, u0 + 1.0, u0, u0 + 1.0], axis=1)
    cv = np.stack([v0, v0, v0 + 1.0, v0 + 1.0], axis=1)
    wts = np.stack(
        [(1.0 - au) * (1.0 - av), au * (1.0 - av), (1.0 - au) * av, au * av],
        axis=1,
    )

    inside = (cu >= 0.0) & (cu < W) & (cv >= 0.0) & (cv < H) & (wts > 0.0)
    flat = inside.reshape(-1)
    if not flat.any():
        return _empty_output(H, W)

    cu_f = cu.reshape(-1)[flat]
    cv_f = cv.reshape(-1)[flat]
    w_f = np.ascontiguousarray(wts.reshape(-1)[flat])
    idx = np.ascontiguousarray(
        (cv_f.astype(np.int64) * W + cu_f.astype(np.int64))
    )
    z_f = np.ascontiguousarray(np.repeat(zp, 4)[flat])
    rgb = src_image.data[vv, uu]
    rgb_f = np.ascontiguousarray(np.repeat(rgb, 4, axis=0)[flat])

    minz, wsum, csum = _kernels.scatter_splats(
        idx, w_f, z_f, rgb_f, H * W, depth_band
    )

    filled = wsum >= weight_floor
    color = np.zeros((H * W, 3))
    color[filled] = csum[filled] / wsum[filled, None]
    depth = np.where(filled, minz, 0.0)
    mask2d = filled.reshape(H, W)
    return WarpOutput(
        image=ColorImage(np.clip(color.reshape(H, W, 3), 0.0, 1.0)),
        depth=DepthImage(depth.reshape(H, W), mask2d),
        hole_mask=~mask2d,
    )


def _empty_output(H: int, W: int) -> WarpOutput:
    return WarpOutput(
        image=ColorImage(np.zeros((H, W, 3))),
        depth=DepthImage(np.zeros((H, W)), np.zeros((H, W), dtype=bool)),
        hole_mask=np.ones((H, W), dtype=bool),
    )


def hole_fraction(w: WarpOutput) -> float:
    """Fraction of target pixels that are holes."""
    return float(w.hole_mask.mean())
