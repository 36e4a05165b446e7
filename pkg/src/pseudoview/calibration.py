"""Disparity-to-depth calibration against sparse LiDAR anchors.

The generalized model D = c1 / (d + c2) + c3 maps unitless monocular
disparity d to metric depth; c2 and c3 absorb estimator bias and offset, and
(c1, 0, 0) reduces to the classical baseline-times-focal inverse-disparity
form.  The fit minimizes a Huber penalty on D_lidar - model(d) with a damped
Gauss-Newton iteration (analytic Jacobian, Levenberg-style damping), which is
deterministic and locally quadratic on this 3-parameter problem.

The model has a genuine pole at d = -c2: trial steps that bring any pair
within POLE_GUARD of it are rejected rather than clamped, and application
marks such pixels invalid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, RankDeficiencyError
from .image import DepthImage, DisparityImage

HUBER_DELTA = 0.5  # meters
POLE_GUARD = 1e-6  # disparity units on |d + c2|
MIN_PAIRS = 50
MAX_PAIRS = 50_000
MAX_ITER = 200
REL_DECREASE_TOL = 1e-10
GRAD_TOL = 1e-8


@dataclass(frozen=True)
class CalibParams:
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        object.__setattr__(self, "c1", float(self.c1))
        object.__setattr__(self, "c2", float(self.c2))
        object.__setattr__(self, "c3", float(self.c3))
        if self.c1 == 0.0 or not all(
            map(math.isfinite, (self.c1, self.c2, self.c3))
        ):
            raise ValueError(f"c1 must be nonzero and finite: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])


@dataclass(frozen=True)
class PairSample:
    """Per-pixel (lidar_depth, d_mono) pairs with pixel provenance (i, j).

    Structural checks only (positive finite depths, matching lengths, at
    least 2 distinct-capable entries); the min_pairs policy (default 50)
    lives in build_pairs.
    """

    lidar: np.ndarray
    d_mono: np.ndarray
    i: np.ndarray
    j: np.ndarray

    def __post_init__(self):
        lidar = np.ascontiguousarray(self.lidar, dtype=np.float64)
        d = np.ascontiguousarray(self.d_mono, dtype=np.float64)
        i = np.ascontiguousarray(self.i, dtype=np.int64)
        j = np.ascontiguousarray(self.j, dtype=np.int64)
        n = lidar.shape[0]
        if not (d.shape[0] == i.shape[0] == j.shape[0] == n):
            raise ValueError("pair arrays must share length")
        if n < 2:
            raise InsufficientDataError(f"need at least 2 pairs, got {n}")
        if (lidar <= 0).any() or not np.isfinite(lidar).all():
            raise ValueError("lidar depths must be finite and > 0")
        if not np.isfinite(d).all():
            raise ValueError("disparities must be finite")
        for a in (lidar, d, i, j):
            a.setflags(write=False)
        object.__setattr__(self, "lidar", lidar)
        object.__setattr__(self, "d_mono", d)
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)

    @property
    def size(self) -> int:
        return int(self.lidar.shape[0])


@dataclass(frozen=True)
class FitReport:
    params: CalibParams
    inlier_rmse: float
    iterations: int
    converged: bool
    residual_percentiles: tuple  # (p50, p90, p99) of |residual|, meters


def build_pairs(
    lidar_depth: DepthImage,
    disparity: DisparityImage,
    max_pairs: int = MAX_PAIRS,
    min_pairs: int = MIN_PAIRS,
    seed: int = None,
) -> PairSample:
    """Collect one pair per pixel valid in both maps, in row-major order.

    More than max_pairs candidates are reduced to exactly max_pairs by a
    deterministic uniform stride; with a seed, candidates are shuffled first
    so the strided subset is a seeded random draw.
    """
    if (lidar_depth.height, lidar_depth.width) != (disparity.height, disparity.width):
        raise ValueError(
            f"lidar {lidar_depth.height}x{lidar_depth.width} vs "
            f"disparity {disparity.height}x{disparity.width}"
        )
    valid = lidar_depth.mask & disparity.mask
    ii, jj = np.nonzero(valid)
    n = ii.shape[0]
    if n < min_pairs:
        raise InsufficientDataError(f"only {n} valid pairs, need {min_pairs}")
    order = np.arange(n)
    if seed is not None:
        order = np.random.default_rng(seed).permutation(n)
    if n > max_pairs:
        sel = order[(np.arange(max_pairs, dtype=np.int64) * n) // max_pairs]
    else:
        sel = order
    ii, jj = ii[sel], jj[sel]
    return PairSample(
        lidar=lidar_depth.data[ii, jj],
        d_mono=disparity.data[ii, jj],
        i=ii,
        j=jj,
    )


def huber_loss(r, delta: float):
    """0.5 r^2 inside |r| <= delta, delta * (|r| - 0.5 delta) outside."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    r = np.asarray(r, dtype=np.float64)
    a = np.abs(r)
    out = np.where(a <= delta, 0.5 * r * r, delta * (a - 0.5 * delta))
    return float(out) if out.ndim == 0 else out


def _residuals(c: np.ndarray, lidar: np.ndarray, d: np.ndarray) -> np.ndarray:
    return lidar - c[0] / (d + c[1]) - c[2]


def residual_jacobian(c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """(n, 3) Jacobian of r = D - c1/(d+c2) - c3 w.r.t. (c1, c2, c3)."""
    s = d + c[1]
    J = np.empty((d.shape[0], 3))
    J[:, 0] = -1.0 / s
    J[:, 1] = c[0] / (s * s)
    J[:, 2] = -1.0
    return J


def initial_guess(pairs: PairSample) -> CalibParams:
    """c1 = median(D_lidar * d_mono), c2 = c3 = 0; deterministic."""
    c1 = float(np.median(pairs.lidar * pairs.d_mono))
    if c1 == 0.0:
        c1 = 1.0  # degenerate data; any nonzero value lets the fit proceed
    return CalibParams(c1, 0.0, 0.0)


def _huber_psi(r: np.ndarray, delta: float) -> np.ndarray:
    return np.clip(r, -delta, delta)


def fit_calibration(
    pairs: PairSample,
    delta: float = HUBER_DELTA,
    init: CalibParams = None,
    max_iter: int = MAX_ITER,
) -> FitReport:
    """Robust fit of (c1, c2, c3) by damped Gauss-Newton on the Huber objective.

    IRLS weighting with the Huber influence, Marquardt-scaled damping (x10 on
    rejected trials, /10 on accepted ones), trial steps rejected when any
    pair lands within POLE_GUARD of the d = -c2 pole.  Stops when the
    relative objective decrease drops below 1e-10, the gradient inf-norm
    drops below 1e-8, or after max_iter iterations; ``converged`` reports
    whether a tolerance (not the iteration cap) ended the run.  delta=inf
    gives the pure least-squares fit.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    lidar, d = pairs.lidar, pairs.d_mono
    if np.ptp(d) == 0.0:
        raise RankDeficiencyError(
            "all d_mono identical: c1/(d+c2) and c3 are indistinguishable"
        )
    if init is None:
        init = initial_guess(pairs)
    c = init.as_array()
    if np.abs(d + c[1]).min() < POLE_GUARD:
        raise ValueError("initial c2 places a pair at the disparity pole")

    r = _residuals(c, lidar, d)
    F = float(np.sum(huber_loss(r, delta)))
    lam = 1e-3
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        J = residual_jacobian(c, d)
        psi = _huber_psi(r, delta)
        g = J.T @ psi
        if np.abs(g).max() < GRAD_TOL:
            converged = True
            break
        # IRLS weights psi(r)/r, 1 at r = 0
        w = np.ones_like(r)
        nz = r != 0.0
        w[nz] = psi[nz] / r[nz]
        H = (J.T * w) @ J
        accepted = False
        while lam < 1e12:
            A = H + lam * np.diag(np.diag(H))
            try:
                step = np.linalg.solve(A, -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = c + step
            if trial[0] == 0.0 or np.abs(d + trial[1]).min() < POLE_GUARD:
                lam *= 10.0
                continue
            r_trial = _residuals(trial, lidar, d)
            F_trial = float(np.sum(huber_loss(r_trial, delta)))
            if F_trial < F:
                rel = (F - F_trial) / max(F, 1e-300)
                c, r, F = trial, r_trial, F_trial
                lam = max(lam / 10.0, 1e-15)
                accepted = True
                if rel < REL_DECREASE_TOL:
                    converged = True
                break
            lam *= 10.0
        if not accepted or converged:
            # not accepted: damping exhausted with no improving step; leave
            # converged as set by the tolerance checks
            break

    absr = np.abs(r)
    inliers = absr <= delta
    if inliers.any():
        rmse = float(np.sqrt(np.mean(r[inliers] ** 2)))
    else:
        rmse = float(np.sqrt(np.mean(r**2)))
    pct = tuple(float(x) for x in np.percentile(absr, [50.0, 90.0, 99.0]))
    return FitReport(
        params=CalibParams(c[0], c[1], c[2]),
        inlier_rmse=rmse,
        iterations=it,
        converged=converged,
        residual_percentiles=pct,
    )


def apply_calibration(disparity: DisparityImage, params: CalibParams) -> DepthImage:
    """Per-pixel D = c1/(d + c2) + c3; pole-adjacent or nonpositive results
    are marked invalid, all other pixels are unaffected."""
    d = disparity.data
    s = d + params.c2
    safe = np.abs(s) >= POLE_GUARD
    D = np.zeros_like(d)
    np.divide(params.c1, s, out=D, where=safe)
    D += params.c3
    valid = disparity.mask & safe & (D > 0.0) & np.isfinite(D)
    return DepthImage(np.where(valid, D, 0.0), valid)
