"""Pinhole camera model and rigid poses.

Conventions, fixed across the package:

- A ``Pose`` maps world coordinates to camera coordinates: x_cam = R x_world + T.
- Pixel centers sit at integer coordinates; ``project`` returns fractional
  (u, v) with u = fx * x / z + cx and v = fy * y / z + cy.
- Points passed to projection must be strictly in front of the camera (z > 0).

All types are immutable values and every operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "fx", float(self.fx))
        object.__setattr__(self, "fy", float(self.fy))
        object.__setattr__(self, "cx", float(self.cx))
        object.__setattr__(self, "cy", float(self.cy))
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(f"focal lengths must be positive, got fx={self.fx} fy={self.fy}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image size must be positive, got {self.width}x{self.height}")
        if not (0.0 <= self.cx < self.width):
            raise ValueError(f"cx={self.cx} outside [0, {self.width})")
        if not (0.0 <= self.cy < self.height):
            raise ValueError(f"cy={self.cy} outside [0, {self.height})")

    def matrix(self) -> np.ndarray:
        """3x3 calibration matrix K."""
        return np.array(
            [
                [self.fx, 0.0, self.cx],
                [0.0, self.fy, self.cy],
                [0.0, 0.0, 1.0],
            ]
        )


def _check_rotation(R: np.ndarray) -> None:
    drift = np.abs(R.T @ R - np.eye(3)).max()
    if drift > ORTHO_TOL:
        raise ValueError(f"rotation not orthonormal: max |R^T R - I| = {drift:.3e}")
    det = float(np.linalg.det(R))
    if abs(det - 1.0) > ORTHO_TOL:
        raise ValueError(f"rotation determinant {det!r} != +1")


def orthonormalize(R: np.ndarray) -> np.ndarray:
    """Nearest rotation in Frobenius norm, via polar decomposition."""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=np.float64))
    Q = U @ Vt
    if np.linalg.det(Q) < 0:
        U = U.copy()
        U[:, -1] = -U[:, -1]
        Q = U @ Vt
    return Q


@dataclass(frozen=True)
class Pose:
    """Rigid world-to-camera transform: x_cam = rotation @ x_world + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=np.float64)
        t = np.asarray(self.translation, dtype=np.float64).reshape(-1)
        if R.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got {R.shape}")
        if t.shape != (3,):
            raise ValueError(f"translation must be a 3-vector, got {t.shape}")
        if not (np.isfinite(R).all() and np.isfinite(t).all()):
            raise ValueError("pose contains non-finite values")
        _check_rotation(R)
        R = np.ascontiguousarray(R)
        t = np.ascontiguousarray(t)
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.eye(3), np.zeros(3))

    def inverse(self) -> "Pose":
        Rt = self.rotation.T
        return Pose(_renorm(Rt), -Rt @ self.translation)

    def transform(self, points: np.ndarray) -> np.ndarray:
        """Apply to (3,) or (N, 3) points."""
        p = np.asarray(points, dtype=np.float64)
        if p.ndim == 1:
            return self.rotation @ p + self.translation
        return p @ self.rotation.T + self.translation

    def compose(self, inner: "Pose") -> "Pose":
        """Pose applying ``inner`` first, then ``self``."""
        R = self.rotation @ inner.rotation
        t = self.rotation @ inner.translation + self.translation
        return Pose(_renorm(R), t)


def _renorm(R: np.ndarray) -> np.ndarray:
    # re-project only when composition drift exceeds the invariant tolerance
    if np.abs(R.T @ R - np.eye(3)).max() > ORTHO_TOL:
        return orthonormalize(R)
    return R


def project(points: np.ndarray, K: CameraIntrinsics) -> np.ndarray:
    """Pinhole projection of camera-frame points to pixels.

    Accepts (3,) or (N, 3); returns (2,) or (N, 2) fractional (u, v).  Output
    may lie outside image bounds; callers clip.  Raises on z <= 0.
    """
    p = np.asarray(points, dtype=np.float64)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    if p.shape[-1] != 3:
        raise ValueError(f"points must be (.., 3), got {p.shape}")
    z = p[:, 2]
    if (z <= 0).any() or not np.isfinite(z).all():
        raise ValueError("cannot project points with z <= 0")
    u = K.fx * p[:, 0] / z + K.cx
    v = K.fy * p[:, 1] / z + K.cy
    uv = np.stack([u, v], axis=-1)
    return uv[0] if single else uv


def unproject(pixels: np.ndarray, depth: np.ndarray, K: CameraIntrinsics) -> np.ndarray:
    """Lift pixels with depth to camera-frame 3D points.

    Accepts (2,)+scalar or (N, 2)+(N,); inverse of ``project`` to 1e-9 px.
    """
    px = np.asarray(pixels, dtype=np.float64)
    single = px.ndim == 1
    px = np.atleast_2d(px)
    if px.shape[-1] != 2:
        raise ValueError(f"pixels must be (.., 2), got {px.shape}")
    d = np.atleast_1d(np.asarray(depth, dtype=np.float64))
    if d.shape[0] == 1 and px.shape[0] > 1:
        d = np.broadcast_to(d, (px.shape[0],))
    if d.shape != (px.shape[0],):
        raise ValueError(f"depth shape {d.shape} incompatible with {px.shape[0]} pixels")
    if (d <= 0).any() or not np.isfinite(d).all():
        raise ValueError("depth must be finite and > 0")
    x = (px[:, 0] - K.cx) / K.fx * d
    y = (px[:, 1] - K.cy) / K.fy * d
    pts = np.stack([x, y, d], axis=-1)
    return pts[0] if single else pts


def relative_pose(source: Pose, target: Pose) -> Pose:
    """Transform taking source-camera coordinates to target-camera coordinates.

    rotation = R' R^-1, translation = T' - R' R^-1 T.
    """
    R_rel = target.rotation @ source.rotation.T
    t_rel = target.translation - R_rel @ source.translation
    return Pose(_renorm(R_rel), t_rel)
