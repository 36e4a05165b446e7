"""Point-cloud ingestion and projection to sparse depth maps.

ASCII clouds carry one "x y z" triple per line; binary clouds (.bin) are
packed little-endian float32 triples.  Non-finite rows are skipped and
counted rather than fatal.  Projection z-buffers points onto integer pixels
(nearest depth wins) to form the sparse LiDAR depth used by calibration.
"""

from __future__ import annotations

import os

import numpy as np

from .camera import CameraIntrinsics, Pose
from .errors import FormatError, InsufficientDataError
from .image import DepthImage
from .serialization import atomic_write_bytes


def load_pointcloud(path: str) -> tuple:
    """Returns (points (N, 3) float64 world frame, skipped_row_count).

    .bin files are parsed as float32 triples; anything else as ASCII XYZ.
    Rows with non-finite coordinates are skipped and counted.  Zero finite
    points is an error.
    """
    if os.fspath(path).endswith(".bin"):
        with open(path, "rb") as f:
            blob = f.read()
        if len(blob) % 12 != 0:
            raise FormatError(
                f"{path}: binary size {len(blob)} bytes is not a multiple of "
                "12 (x, y, z float32 triples)"
            )
        pts = np.frombuffer(blob, dtype="<f4").reshape(-1, 3).astype(np.float64)
    else:
        rows = []
        with open(path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != 3:
                    raise FormatError(
                        f"{path}:{lineno}: expected 3 fields, got {len(parts)}"
                    )
                try:
                    rows.append([float(p) for p in parts])
                except ValueError as e:
                    raise FormatError(f"{path}:{lineno}: {e}") from e
        pts = np.asarray(rows, dtype=np.float64).reshape(-1, 3)
    finite = np.isfinite(pts).all(axis=1)
    skipped = int(pts.shape[0] - finite.sum())
    pts = pts[finite]
    if pts.shape[0] == 0:
        raise InsufficientDataError(f"{path}: no finite points")
    return pts, skipped


def save_pointcloud_ascii(path: str, points: np.ndarray) -> None:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    lines = [f"{float(p[0])!r} {float(p[1])!r} {float(p[2])!r}" for p in pts]
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def save_pointcloud_bin(path: str, points: np.ndarray) -> None:
    pts = np.asarray(points, dtype="<f4").reshape(-1, 3)
    atomic_write_bytes(path, pts.tobytes())


def project_pointcloud(
    points: np.ndarray, pose: Pose, K: CameraIntrinsics
) -> DepthImage:
    """Rasterize world points into a sparse depth map; nearest depth wins.

    Points behind the camera or landing outside the frame are dropped.
    Pixels are the nearest-integer projection.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    cam = pts @ pose.rotation.T + pose.translation
    z = cam[:, 2]
    front = z > 0
    cam, z = cam[front], z[front]
    if cam.shape[0]:
        u = np.rint(K.fx * cam[:, 0] / z + K.cx).astype(np.int64)
        v = np.rint(K.fy * cam[:, 1] / z + K.cy).astype(np.int64)
        inside = (u >= 0) & (u < K.width) & (v >= 0) & (v < K.height)
        u, v, z = u[inside], v[inside], z[inside]
    else:
        u = v = np.zeros(0, dtype=np.int64)
    depth = np.full((K.height, K.width), np.inf)
    np.minimum.at(depth, (v, u), z)
    mask = np.isfinite(depth)
    return DepthImage(np.where(mask, depth, 0.0), mask)
