"""Synthetic textured-plane scenes with an exact analytic renderer.

A scene is a set of textured planes; rendering intersects each pixel's ray
with every plane and keeps the nearest hit, yielding exact color and depth
with no sampling noise.  This is the deterministic test back end standing in
for a learned scene representation: ``render`` is a pure function of the
pose and intrinsics, and ``update`` records the loss feedback it receives
without changing anything.

Ray depths equal the camera-frame z of the hit point by construction, since
ray directions are formed with unit z in the camera frame.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .camera import CameraIntrinsics, Pose
from .errors import RenderError
from .image import ColorImage, DepthImage

_EPS_DENOM = 1e-12
_EPS_HIT = 1e-9


def checkerboard_texture(period: float, color_a, color_b):
    """Two-color checker over plane-local coordinates, cell size ``period``."""
    ca = np.asarray(color_a, dtype=np.float64).reshape(3)
    cb = np.asarray(color_b, dtype=np.float64).reshape(3)
    if period <= 0:
        raise ValueError("period must be positive")

    def tex(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        parity = (np.floor(a / period) + np.floor(b / period)) % 2.0
        return np.where(parity[:, None] == 0.0, ca[None, :], cb[None, :])

    return tex


def sine_texture(period: float):
    """Smooth three-channel sinusoidal pattern; values stay in [0.15, 0.85].

    Smoothness matters for warp fidelity tests: resampling error of a C1
    texture vanishes with subpixel displacement, unlike hard checker edges.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    w = 2.0 * np.pi / period

    def tex(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.empty((a.shape[0], 3))
        out[:, 0] = 0.5 + 0.35 * np.sin(w * a)
        out[:, 1] = 0.5 + 0.35 * np.sin(w * b + 1.0)
        out[:, 2] = 0.5 + 0.35 * np.sin(w * (a + b) + 2.0)
        return out

    return tex


def image_texture(path: str, scale: float):
    """Bilinearly sampled, wrap-tiled image texture; ``scale`` is meters per
    texture pixel."""
    from PIL import Image

    if scale <= 0:
        raise ValueError("scale must be positive")
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
    th, tw = arr.shape[:2]

    def tex(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        x = a / scale
        y = b / scale
        x0 = np.floor(x)
        y0 = np.floor(y)
        fx = (x - x0)[:, None]
        fy = (y - y0)[:, None]
        x0 = x0.astype(np.int64) % tw
        y0 = y0.astype(np.int64) % th
        x1 = (x0 + 1) % tw
        y1 = (y0 + 1) % th
        c00 = arr[y0, x0]
        c01 = arr[y0, x1]
        c10 = arr[y1, x0]
        c11 = arr[y1, x1]
        top = c00 * (1.0 - fx) + c01 * fx
        bot = c10 * (1.0 - fx) + c11 * fx
        return top * (1.0 - fy) + bot * fy

    return tex


@dataclass(frozen=True)
class Plane:
    """Textured plane: anchor point, unit normal, texture(a, b) -> (N, 3)
    colors over plane-local coordinates, optional half-extents (ex, ey)."""

    point: np.ndarray
    normal: np.ndarray
    texture: object
    extent: tuple = None

    def __post_init__(self):
        p = np.asarray(self.point, dtype=np.float64).reshape(3)
        n = np.asarray(self.normal, dtype=np.float64).reshape(3)
        norm = float(np.linalg.norm(n))
        if norm < 1e-12:
            raise ValueError("normal must be nonzero")
        n = n / norm
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "normal", n)
        if self.extent is not None:
            ex, ey = self.extent
            if not (ex > 0 and ey > 0):
                raise ValueError("extents must be positive")
            object.__setattr__(self, "extent", (float(ex), float(ey)))

    def basis(self) -> tuple:
        n = self.normal
        helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = np.cross(n, helper)
        e1 = e1 / np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        return e1, e2


@dataclass
class SceneRenderer:
    """Nearest-plane analytic renderer with a no-op, feedback-recording update."""

    planes: list
    feedback_log: list = field(default_factory=list)

    def __post_init__(self):
        if not self.planes:
            raise ValueError("scene needs at least one plane")

    def render(self, pose: Pose, K: CameraIntrinsics):
        H, W = K.height, K.width
        uu, vv = np.meshgrid(np.arange(W, dtype=np.float64), np.arange(H, dtype=np.float64))
        dirs_cam = np.stack(
            [
                ((uu - K.cx) / K.fx).ravel(),
                ((vv - K.cy) / K.fy).ravel(),
                np.ones(H * W),
            ],
            axis=-1,
        )
        center = -(pose.rotation.T @ pose.translation)
        dirs_w = dirs_cam @ pose.rotation

        best_s = np.full(H * W, np.inf)
        color = np.zeros((H * W, 3))
        for plane in self.planes:
            e1, e2 = plane.basis()
            denom = dirs_w @ plane.normal
            offset = float((plane.point - center) @ plane.normal)
            with np.errstate(divide="ignore", invalid="ignore"):
                s = offset / denom
            hit = (np.abs(denom) > _EPS_DENOM) & (s > _EPS_HIT) & np.isfinite(s)
            if plane.extent is not None:
                q = center + s[:, None] * dirs_w - plane.point
                a_all = q @ e1
                b_all = q @ e2
                hit &= (np.abs(a_all) <= plane.extent[0]) & (
                    np.abs(b_all) <= plane.extent[1]
                )
            win = hit & (s < best_s)
            if not win.any():
                continue
            q = center + s[win, None] * dirs_w[win] - plane.point
            color[win] = plane.texture(q @ e1, q @ e2)
            best_s[win] = s[win]

        valid = np.isfinite(best_s)
        if not valid.any():
            raise RenderError("no plane is visible from this pose")
        depth = np.where(valid, best_s, 0.0)
        return (
            ColorImage(np.clip(color.reshape(H, W, 3), 0.0, 1.0)),
            DepthImage(depth.reshape(H, W), valid.reshape(H, W)),
        )

    def update(self, loss_feedback) -> None:
        self.feedback_log.append(loss_feedback)


def _texture_from_spec(spec: dict, base_dir: str):
    kind = spec.get("kind")
    if kind == "checkerboard":
        return checkerboard_texture(spec["period"], spec["color_a"], spec["color_b"])
    if kind == "sine":
        return sine_texture(spec["period"])
    if kind == "image":
        path = spec["path"]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return image_texture(path, spec["scale"])
    raise ValueError(f"unknown texture kind {kind!r}")


def load_scene(path: str) -> SceneRenderer:
    """Build a SceneRenderer from a scene description JSON file."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    base_dir = os.path.dirname(os.path.abspath(path))
    return scene_from_dict(doc, base_dir)


def scene_from_dict(doc: dict, base_dir: str = ".") -> SceneRenderer:
    planes = []
    for p in doc.get("planes", []):
        extent = p.get("extent")
        planes.append(
            Plane(
                point=np.asarray(p["point"], dtype=np.float64),
                normal=np.asarray(p["normal"], dtype=np.float64),
                texture=_texture_from_spec(p["texture"], base_dir),
                extent=tuple(extent) if extent is not None else None,
            )
        )
    return SceneRenderer(planes)
