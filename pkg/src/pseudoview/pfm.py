"""Single-channel PFM codec (float32, bottom-to-top rows).

Canonical float storage for depth and disparity maps.  The header is
"Pf\\n<width> <height>\\n<scale>\\n"; a negative scale marks little-endian
payloads.  The scale magnitude is treated as an endianness flag only (the
common convention); files are written with scale -1.0.  Depth holes are
stored as the 0.0 sentinel, invalid disparities as NaN, so validity masks
survive the round trip.
"""

from __future__ import annotations

import numpy as np

from .errors import FormatError
from .image import DepthImage, DisparityImage
from .serialization import atomic_write_bytes


def _read_token(buf: bytes, pos: int, path: str):
    while pos < len(buf) and buf[pos : pos + 1].isspace():
        pos += 1
    start = pos
    while pos < len(buf) and not buf[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise FormatError(f"{path}: truncated header at byte {start}")
    return buf[start:pos], pos


def load_pfm_array(path: str) -> np.ndarray:
    """Raw (H, W) float32 payload as float64, top row first."""
    with open(path, "rb") as f:
        buf = f.read()
    if buf[:2] == b"PF":
        raise FormatError(f"{path}: 3-channel PFM not supported (magic at byte 0)")
    if buf[:2] != b"Pf":
        raise FormatError(f"{path}: bad magic {buf[:2]!r} at byte 0, expected b'Pf'")
    pos = 2
    tok_w, pos = _read_token(buf, pos, path)
    tok_h, pos = _read_token(buf, pos, path)
    tok_s, pos = _read_token(buf, pos, path)
    try:
        width, height = int(tok_w), int(tok_h)
        scale = float(tok_s)
    except ValueError as e:
        raise FormatError(f"{path}: malformed header fields near byte {pos}: {e}") from e
    if width < 1 or height < 1:
        raise FormatError(f"{path}: nonpositive dimensions {width}x{height}")
    if scale == 0.0:
        raise FormatError(f"{path}: zero scale is invalid")
    # payload starts after exactly one whitespace byte following the scale
    pos += 1
    expected = width * height * 4
    payload = buf[pos : pos + expected]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: expected {expected} payload bytes at byte {pos}, "
            f"got {len(payload)}"
        )
    dtype = "<f4" if scale < 0 else ">f4"
    data = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return np.flipud(data).astype(np.float64)


def load_pfm(path: str) -> DepthImage:
    """Depth map: valid where finite and > 0."""
    data = load_pfm_array(path)
    mask = np.isfinite(data) & (data > 0.0)
    return DepthImage(np.where(mask, data, 0.0), mask)


def load_pfm_disparity(path: str) -> DisparityImage:
    """Disparity map: valid where finite (sign unconstrained)."""
    data = load_pfm_array(path)
    mask = np.isfinite(data)
    return DisparityImage(np.where(mask, data, 0.0), mask)


def _save_array(path: str, data: np.ndarray) -> None:
    if data.ndim != 2:
        raise ValueError(f"PFM payload must be 2D, got {data.shape}")
    h, w = data.shape
    header = f"Pf\n{w} {h}\n-1.0\n".encode("ascii")
    payload = np.flipud(np.asarray(data, dtype="<f4")).tobytes()
    atomic_write_bytes(path, header + payload)


def save_pfm(path: str, image) -> None:
    """Write a DepthImage (holes as 0), DisparityImage (invalid as NaN), or
    plain 2D array."""
    if isinstance(image, DepthImage):
        _save_array(path, image.data)
    elif isinstance(image, DisparityImage):
        _save_array(path, np.where(image.mask, image.data, np.nan))
    else:
        _save_array(path, np.asarray(image, dtype=np.float64))
