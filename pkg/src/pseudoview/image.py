"""Image buffer types: dense color, dense depth with validity, disparity.

All buffers are float64 numpy arrays in row-major (H, W[, C]) layout.  Color
channels live in [0, 1].  Depth is metric (meters); invalid depth pixels carry
a 0.0 sentinel and are excluded via the boolean validity mask.  The containers
are frozen and their arrays are made read-only, so instances can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ColorImage:
    """RGB image, (H, W, 3) float64, channels in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ValueError(f"color data must be (H, W, 3), got {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"empty image: {data.shape}")
        if not np.isfinite(data).all():
            raise ValueError("color data contains non-finite values")
        if data.min() < 0.0 or data.max() > 1.0:
            raise ValueError("color channels must lie in [0, 1]")
        object.__setattr__(self, "data", _freeze(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class DepthImage:
    """Metric depth map, (H, W) float64 meters, with per-pixel validity.

    Valid pixels are finite and > 0.  Invalid pixels are stored as 0.0; the
    mask is authoritative.  If ``mask`` is omitted, validity is inferred as
    ``finite and > 0``.
    """

    data: np.ndarray
    mask: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError(f"depth data must be (H, W), got {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"empty depth map: {data.shape}")
        if self.mask is None:
            mask = np.isfinite(data) & (data > 0.0)
        else:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.shape != data.shape:
                raise ValueError(
                    f"mask shape {mask.shape} != depth shape {data.shape}"
                )
            valid = data[mask]
            if valid.size and (not np.isfinite(valid).all() or (valid <= 0.0).any()):
                raise ValueError("valid depth pixels must be finite and > 0")
        data = np.where(mask, data, 0.0)
        object.__setattr__(self, "data", _freeze(data))
        object.__setattr__(self, "mask", _freeze(mask))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def valid_fraction(self) -> float:
        return float(self.mask.mean())

    def min_valid_depth(self) -> float:
        """Smallest valid depth; raises if the map is entirely invalid."""
        if not self.mask.any():
            raise ValueError("depth map has no valid pixels")
        return float(self.data[self.mask].min())


@dataclass(frozen=True)
class DisparityImage:
    """Unitless monocular disparity, (H, W) float64, with validity mask.

    Valid disparities are finite; sign and scale are estimator-specific.
    """

    data: np.ndarray
    mask: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError(f"disparity data must be (H, W), got {data.shape}")
        if self.mask is None:
            mask = np.isfinite(data)
        else:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.shape != data.shape:
                raise ValueError(
                    f"mask shape {mask.shape} != disparity shape {data.shape}"
                )
            if data[mask].size and not np.isfinite(data[mask]).all():
                raise ValueError("valid disparities must be finite")
        data = np.where(mask, data, 0.0)
        object.__setattr__(self, "data", _freeze(data))
        object.__setattr__(self, "mask", _freeze(mask))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]
