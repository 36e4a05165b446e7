"""Admissible pseudo-view translations under a pixel-displacement budget.

For a camera translated by dt with identity relative rotation, a scene point
(x, y, z) moves on screen by

    du = fx * (dt_x * z - dt_z * x) / (z * (z + dt_z))
    dv = fy * (dt_y * z - dt_z * y) / (z * (z + dt_z))

which reduces to (fx * dt_x / z, fy * dt_y / z) when dt_z = 0.  The solvers
here invert that relationship: given a budget epsilon on the L-inf pixel
displacement, they return the largest admissible lateral translation
magnitudes.  ``certify_pose`` is the authority: it evaluates the displacement
at every valid pixel of an actual depth map.

The displacement formula carries no rotation terms, so certification of a
rotated pose must go through ``certify_pose_full``, which runs the full
unproject/transform/reproject pipeline instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .camera import CameraIntrinsics, Pose
from .errors import CertificationError
from .image import DepthImage

DEFAULT_EPSILON = 32.0  # pixels, sized for a 1920-wide image; pure configuration

# relative slack on the epsilon comparison so a bound met at exact equality is
# not rejected over the last ulp of the sweep arithmetic
CERTIFY_SLACK = 1e-12


@dataclass(frozen=True)
class WarpBudget:
    """Displacement budget: epsilon in pixels, conservative scene depth z_min,
    and the fixed depth-axis step used only in the dt_z != 0 regime."""

    epsilon: float
    z_min: float
    fixed_t_z: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "z_min", float(self.z_min))
        object.__setattr__(self, "fixed_t_z", float(self.fixed_t_z))
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not (self.z_min > 0 and math.isfinite(self.z_min)):
            raise ValueError(f"z_min must be positive, got {self.z_min}")
        if not math.isfinite(self.fixed_t_z):
            raise ValueError("fixed_t_z must be finite")


@dataclass(frozen=True)
class TranslationBounds:
    """Admissible |t_x|, |t_y| magnitudes and the (signed, fixed) t_z.

    Solver outputs are strictly positive; zero is admitted structurally so a
    deliberate no-motion bound can be represented.
    """

    max_t_x: float
    max_t_y: float
    t_z: float

    def __post_init__(self):
        object.__setattr__(self, "max_t_x", float(self.max_t_x))
        object.__setattr__(self, "max_t_y", float(self.max_t_y))
        object.__setattr__(self, "t_z", float(self.t_z))
        if not (self.max_t_x >= 0 and self.max_t_y >= 0):
            raise ValueError("bounds must be nonnegative")
        if not all(map(math.isfinite, (self.max_t_x, self.max_t_y, self.t_z))):
            raise ValueError("bounds must be finite")

    def scaled(self, s: float) -> "TranslationBounds":
        if not 0 < s <= 1:
            raise ValueError(f"scale must be in (0, 1], got {s}")
        return TranslationBounds(self.max_t_x * s, self.max_t_y * s, self.t_z)


def pixel_displacement(p: np.ndarray, dt: np.ndarray, K: CameraIntrinsics) -> np.ndarray:
    """Closed-form screen displacement of camera points under translation dt.

    Accepts (3,) or (N, 3) points; returns (2,) or (N, 2) (du, dv).  Raises if
    any point has z <= 0 or passes behind the target camera (z + dt_z <= 0).
    """
    pts = np.asarray(p, dtype=np.float64)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != 3:
        raise ValueError(f"points must be (.., 3), got {pts.shape}")
    d = np.asarray(dt, dtype=np.float64).reshape(3)
    z = pts[:, 2]
    if (z <= 0).any():
        raise ValueError("points must have z > 0")
    zt = z + d[2]
    if (zt <= 0).any():
        raise ValueError("point passes behind target camera (z + dt_z <= 0)")
    denom = z * zt
    du = K.fx * (d[0] * z - d[2] * pts[:, 0]) / denom
    dv = K.fy * (d[1] * z - d[2] * pts[:, 1]) / denom
    out = np.stack([du, dv], axis=-1)
    return out[0] if single else out


def solve_bounds_lateral(budget: WarpBudget, K: CameraIntrinsics) -> TranslationBounds:
    """Largest lateral step with dt_z = 0: epsilon * z_min / f, per axis."""
    return TranslationBounds(
        budget.epsilon * budget.z_min / K.fx,
        budget.epsilon * budget.z_min / K.fy,
        0.0,
    )


def _axis_worst_disp(t: float, tz: float, f: float, xmax: float, zmin: float) -> float:
    """Worst |du| over the box |x| <= xmax, z >= zmin for lateral step t.

    max over x of |t*z - tz*x| is |t|*z + |tz|*xmax, leaving
    h(z) = f * (a*z + b) / (z*(z+tz)) with a = |t|, b = |tz|*xmax.  For
    tz >= 0, h is decreasing, so the max sits at z = zmin.  For tz < 0 the
    single interior critical point is z* = (-b + sqrt(b^2 + a*b*|tz|)) / a;
    the max sits at z* when z* > zmin, else at zmin.
    """
    a = abs(t)
    b = abs(tz) * xmax
    best = f * (a * zmin + b) / (zmin * (zmin + tz))
    if tz < 0 and a > 0 and b > 0:
        zstar = (-b + math.sqrt(b * b + a * b * (-tz))) / a
        if zstar > zmin:
            best = max(best, f * (a * zstar + b) / (zstar * (zstar + tz)))
    return best


def _solve_axis_bound(
    eps: float, tz: float, f: float, xmax: float, zmin: float, seed: float
) -> float:
    """Largest t with _axis_worst_disp(t) <= eps, by bracketed bisection.

    _axis_worst_disp is strictly increasing in |t|, so bisection is exact up
    to bracket width.  Returns the feasible endpoint.
    """
    if _axis_worst_disp(0.0, tz, f, xmax, zmin) > eps:
        raise CertificationError(
            f"fixed t_z={tz} alone exceeds the {eps}-pixel budget at z_min={zmin}"
        )
    hi = max(seed, eps * zmin / f, 1e-12)
    lo = 0.0
    for _ in range(300):
        if _axis_worst_disp(hi, tz, f, xmax, zmin) > eps:
            break
        lo = hi
        hi *= 2.0
    else:
        return lo  # budget never exhausted within float range
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _axis_worst_disp(mid, tz, f, xmax, zmin) <= eps:
            lo = mid
        else:
            hi = mid
    return lo


def solve_bounds_with_tz(
    budget: WarpBudget, K: CameraIntrinsics, scene_extent: tuple
) -> TranslationBounds:
    """Lateral bounds when the pseudo view also steps by a fixed t_z != 0.

    ``scene_extent`` = (x_max, y_max): the largest |x| and |y| (meters, camera
    frame) any scene point may take.  A closed-form candidate seeds the
    search; the returned bounds are then tightened by bisection against the
    worst-case box displacement, so the certified budget is authoritative.
    Raises when t_z = 0 (wrong regime), when z_min + t_z <= 0, or when t_z by
    itself already exceeds the budget.
    """
    tz = budget.fixed_t_z
    if tz == 0.0:
        raise ValueError("fixed_t_z is 0; use solve_bounds_lateral for that regime")
    if budget.z_min + tz <= 0:
        raise ValueError(
            f"z_min + t_z = {budget.z_min + tz} <= 0: scene passes behind the camera"
        )
    x_max, y_max = (float(scene_extent[0]), float(scene_extent[1]))
    if x_max < 0 or y_max < 0:
        raise ValueError("scene extent must be nonnegative")

    eps = budget.epsilon
    out = []
    for f, ext in ((K.fx, x_max), (K.fy, y_max)):
        # heuristic seed; the sqrt term mirrors the loose closed-form candidate
        seed = abs(tz) / f * (eps + 2.0 * math.sqrt(eps * ext / abs(tz)))
        out.append(_solve_axis_bound(eps, tz, f, ext, budget.z_min, seed))
    if out[0] <= 0 or out[1] <= 0:
        raise CertificationError(
            f"no positive lateral bound fits the budget with t_z={tz}"
        )
    return TranslationBounds(out[0], out[1], tz)


def _valid_points(src_depth: DepthImage, K: CameraIntrinsics) -> np.ndarray:
    vv, uu = np.nonzero(src_depth.mask)
    if vv.size == 0:
        raise ValueError("depth map has no valid pixels")
    d = src_depth.data[vv, uu]
    x = (uu - K.cx) / K.fx * d
    y = (vv - K.cy) / K.fy * d
    return np.stack([x, y, d], axis=-1)


def scene_extent_from_depth(src_depth: DepthImage, K: CameraIntrinsics) -> tuple:
    """(max |x|, max |y|) over the unprojected valid pixels of a depth map."""
    pts = _valid_points(src_depth, K)
    return float(np.abs(pts[:, 0]).max()), float(np.abs(pts[:, 1]).max())


def certify_pose(
    src_depth: DepthImage, K: CameraIntrinsics, dt: np.ndarray, epsilon: float
) -> tuple:
    """Exhaustive per-pixel displacement check for a translation-only step.

    Evaluates the closed-form displacement at every valid pixel's unprojected
    point.  Returns (ok, max_disp) where max_disp is the L-inf displacement
    over all pixels; ok allows a 1e-12 relative slack so exact-equality bounds
    are not rejected by roundoff.  Any point with z + dt_z <= 0 fails the
    certificate with max_disp = +inf.
    """
    d = np.asarray(dt, dtype=np.float64).reshape(3)
    pts = _valid_points(src_depth, K)
    z = pts[:, 2]
    zt = z + d[2]
    if (zt <= 0).any():
        return False, math.inf
    denom = z * zt
    du = K.fx * (d[0] * z - d[2] * pts[:, 0]) / denom
    dv = K.fy * (d[1] * z - d[2] * pts[:, 1]) / denom
    max_disp = float(max(np.abs(du).max(), np.abs(dv).max()))
    return max_disp <= epsilon * (1.0 + CERTIFY_SLACK), max_disp


def certify_pose_full(
    src_depth: DepthImage, K: CameraIntrinsics, rel: Pose, epsilon: float
) -> tuple:
    """Full-pipeline certificate: works for any relative pose, incl. rotation.

    Unprojects every valid pixel, applies ``rel``, reprojects, and measures
    the L-inf pixel displacement.  Points landing at z <= 0 fail with
    max_disp = +inf.
    """
    pts = _valid_points(src_depth, K)
    moved = pts @ rel.rotation.T + rel.translation
    if (moved[:, 2] <= 0).any():
        return False, math.inf
    vv, uu = np.nonzero(src_depth.mask)
    du = (K.fx * moved[:, 0] / moved[:, 2] + K.cx) - uu
    dv = (K.fy * moved[:, 1] / moved[:, 2] + K.cy) - vv
    max_disp = float(max(np.abs(du).max(), np.abs(dv).max()))
    return max_disp <= epsilon * (1.0 + CERTIFY_SLACK), max_disp


def generate_pseudo_pose(base: Pose, bounds: TranslationBounds, direction) -> Pose:
    """Offset ``base`` by a unit direction scaled componentwise into bounds.

    A 2-vector direction (dx, dy) yields offset
    (dx * max_t_x, dy * max_t_y, t_z); a 3-vector additionally scales t_z by
    its z component.  The result keeps the base rotation, so the relative
    rotation from base to result is identity.
    """
    d = np.asarray(direction, dtype=np.float64).reshape(-1)
    if d.shape[0] not in (2, 3):
        raise ValueError(f"direction must be a 2- or 3-vector, got {d.shape}")
    if abs(float(np.linalg.norm(d)) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    if d.shape[0] == 2:
        offset = np.array([d[0] * bounds.max_t_x, d[1] * bounds.max_t_y, bounds.t_z])
    else:
        offset = np.array(
            [d[0] * bounds.max_t_x, d[1] * bounds.max_t_y, d[2] * bounds.t_z]
        )
    return Pose(base.rotation, base.translation + offset)
