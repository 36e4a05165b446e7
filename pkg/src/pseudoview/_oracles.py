"""Slow, obviously-correct counterparts of the hot paths.

Everything here trades speed for transparency: scalar Python loops and
direct windowed formulas instead of vectorized or incremental computation.
The self-test and the test suite compare the production kernels against
these on small inputs; agreement must be bit-exact for the scatter pipeline
and tight (1e-7) for the windowed statistics.
"""

from __future__ import annotations

import math

import numpy as np

from .camera import CameraIntrinsics, Pose
from .image import ColorImage, DepthImage
from .ssim import C1, C2, KERNEL, WIN_SIZE
from .warp import DEPTH_BAND, SNAP_EPS, WEIGHT_FLOOR, WarpOutput


def scatter_splats_oracle(idx, w, z, rgb, n_pixels: int, depth_band: float):
    """Scalar-loop mirror of the scatter kernel contract."""
    minz = [math.inf] * n_pixels
    wsum = [0.0] * n_pixels
    csum = [[0.0, 0.0, 0.0] for _ in range(n_pixels)]
    m = len(idx)
    for k in range(m):
        i = int(idx[k])
        zk = float(z[k])
        if zk < minz[i]:
            minz[i] = zk
    band1 = 1.0 + depth_band
    for k in range(m):
        i = int(idx[k])
        if float(z[k]) <= minz[i] * band1:
            wk = float(w[k])
            wsum[i] += wk
            csum[i][0] += wk * float(rgb[k][0])
            csum[i][1] += wk * float(rgb[k][1])
            csum[i][2] += wk * float(rgb[k][2])
    return (
        np.array(minz),
        np.array(wsum),
        np.array(csum).reshape(n_pixels, 3),
    )


def forward_warp_translation_oracle(
    src_image: ColorImage,
    src_depth: DepthImage,
    K: CameraIntrinsics,
    dt,
    depth_band: float = DEPTH_BAND,
    weight_floor: float = WEIGHT_FLOOR,
) -> WarpOutput:
    """Pixel-by-pixel forward warp for translation-only motion.

    Mirrors the production arithmetic expression by expression (so results
    must match bit for bit) but walks every pixel with plain Python floats
    and accumulates through scatter_splats_oracle.
    """
    tx, ty, tz = (float(v) for v in dt)
    H, W = K.height, K.width
    idx, ws, zs, cs = [], [], [], []
    for v in range(src_depth.height):
        for u in range(src_depth.width):
            if not src_depth.mask[v, u]:
                continue
            d = float(src_depth.data[v, u])
            x = (u - K.cx) / K.fx * d
            y = (v - K.cy) / K.fy * d
            mx, my, mz = x + tx, y + ty, d + tz
            if mz <= 0.0:
                continue
            uf = K.fx * mx / mz + K.cx
            vf = K.fy * my / mz + K.cy
            ur, vr = float(np.rint(uf)), float(np.rint(vf))
            if abs(uf - ur) <= SNAP_EPS:
                uf = ur
            if abs(vf - vr) <= SNAP_EPS:
                vf = vr
            u0, v0 = math.floor(uf), math.floor(vf)
            au, av = uf - u0, vf - v0
            corners = (
                (v0, u0, (1.0 - au) * (1.0 - av)),
                (v0, u0 + 1, au * (1.0 - av)),
                (v0 + 1, u0, (1.0 - au) * av),
                (v0 + 1, u0 + 1, au * av),
            )
            color = src_image.data[v, u]
            for cv, cu, wt in corners:
                if 0 <= cu < W and 0 <= cv < H and wt > 0.0:
                    idx.append(cv * W + cu)
                    ws.append(wt)
                    zs.append(mz)
                    cs.append([float(color[0]), float(color[1]), float(color[2])])
    minz, wsum, csum = scatter_splats_oracle(idx, ws, zs, cs, H * W, depth_band)
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


def ssim_mean_windowed_oracle(a: ColorImage, b: ColorImage) -> float:
    """Direct windowed SSIM: explicit 11x11 weighted moments per pixel.

    Independent of the separable-filter implementation (2D window applied in
    one shot via sliding windows), same statistical definition: Gaussian
    window, population moments, half-window border cropped from the mean.
    """
    from numpy.lib.stride_tricks import sliding_window_view

    if (a.height, a.width) != (b.height, b.width):
        raise ValueError("size mismatch")
    w2d = np.outer(KERNEL, KERNEL)
    r = WIN_SIZE // 2
    total = 0.0
    for c in range(3):
        x = np.pad(a.data[:, :, c], r, mode="symmetric")
        y = np.pad(b.data[:, :, c], r, mode="symmetric")
        wx = sliding_window_view(x, (WIN_SIZE, WIN_SIZE))
        wy = sliding_window_view(y, (WIN_SIZE, WIN_SIZE))
        mu_x = np.einsum("hwij,ij->hw", wx, w2d)
        mu_y = np.einsum("hwij,ij->hw", wy, w2d)
        exx = np.einsum("hwij,ij->hw", wx * wx, w2d)
        eyy = np.einsum("hwij,ij->hw", wy * wy, w2d)
        exy = np.einsum("hwij,ij->hw", wx * wy, w2d)
        var_x = exx - mu_x * mu_x
        var_y = eyy - mu_y * mu_y
        cov = exy - mu_x * mu_y
        s = ((2 * mu_x * mu_y + C1) * (2 * cov + C2)) / (
            (mu_x * mu_x + mu_y * mu_y + C1) * (var_x + var_y + C2)
        )
        total += float(s[r:-r, r:-r].mean())
    return total / 3.0


def render_planes_oracle(planes, pose: Pose, K: CameraIntrinsics):
    """Per-pixel Python-loop ray-plane renderer (nearest hit wins).

    Returns (color (H, W, 3), depth (H, W), valid (H, W)); compares against
    the vectorized scene renderer on small frames.
    """
    H, W = K.height, K.width
    Rt = pose.rotation.T
    center = -(Rt @ pose.translation)
    color = np.zeros((H, W, 3))
    depth = np.zeros((H, W))
    valid = np.zeros((H, W), dtype=bool)
    for v in range(H):
        for u in range(W):
            d_cam = np.array([(u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0])
            d_w = Rt @ d_cam
            best = math.inf
            best_col = None
            for plane in planes:
                denom = float(d_w @ plane.normal)
                if abs(denom) <= 1e-12:
                    continue
                s = float((plane.point - center) @ plane.normal) / denom
                if s <= 1e-9 or s >= best:
                    continue
                q = center + s * d_w - plane.point
                e1, e2 = plane.basis()
                aa, bb = float(q @ e1), float(q @ e2)
                if plane.extent is not None and (
                    abs(aa) > plane.extent[0] or abs(bb) > plane.extent[1]
                ):
                    continue
                best = s
                best_col = plane.texture(np.array([aa]), np.array([bb]))[0]
            if best_col is not None:
                color[v, u] = best_col
                depth[v, u] = best
                valid[v, u] = True
    return color, depth, valid
