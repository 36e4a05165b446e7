"""PNG codecs: 8-bit RGB color, 16-bit millimeter depth, 8-bit hole masks.

Color quantizes [0, 1] floats to 8 bits with round-to-nearest.  Depth PNGs
store millimeters in 16 bits (0 = invalid), which clips beyond 65.535 m and
rounds to the nearest millimeter; they are an interchange convenience, the
PFM codec is the lossless canonical path.  Masks store 255 for hole pixels.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

from .errors import FormatError
from .image import ColorImage, DepthImage
from .serialization import atomic_write_bytes


def _png_bytes(img: Image.Image) -> bytes:
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def save_color_png(path: str, image: ColorImage) -> None:
    q = np.rint(image.data * 255.0).astype(np.uint8)
    atomic_write_bytes(path, _png_bytes(Image.fromarray(q, mode="RGB")))


def load_color_png(path: str) -> ColorImage:
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return ColorImage(arr / 255.0)


def save_depth_png16(path: str, depth: DepthImage) -> None:
    """Lossy: nearest-millimeter quantization, ceiling 65.535 m, 0 = invalid."""
    mm = np.rint(depth.data * 1000.0)
    mm = np.clip(np.where(depth.mask, np.maximum(mm, 1.0), 0.0), 0.0, 65535.0)
    arr = mm.astype(np.uint16)
    atomic_write_bytes(path, _png_bytes(Image.fromarray(arr)))


def load_depth_png16(path: str) -> DepthImage:
    with Image.open(path) as im:
        arr = np.asarray(im)
    if arr.ndim != 2:
        raise FormatError(f"{path}: expected single-channel depth PNG, got {arr.shape}")
    mm = arr.astype(np.float64)
    mask = mm > 0
    return DepthImage(np.where(mask, mm / 1000.0, 0.0), mask)


def save_mask_png(path: str, hole_mask: np.ndarray) -> None:
    m = np.asarray(hole_mask, dtype=bool)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2D, got {m.shape}")
    arr = np.where(m, 255, 0).astype(np.uint8)
    atomic_write_bytes(path, _png_bytes(Image.fromarray(arr, mode="L")))


def load_mask_png(path: str) -> np.ndarray:
    """True = hole; any value >= 128 counts as hole."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return arr >= 128
