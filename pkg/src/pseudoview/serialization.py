"""JSON emission with float64-exact numbers, atomic writes, camera files.

The emitter prints floats with 17 significant digits so every float64 value
round-trips exactly, and walks containers in insertion order, so identical
inputs always serialize to identical bytes.  All writers go through a
write-to-temp-then-rename step: a failed run never leaves a partial file.
"""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from .camera import CameraIntrinsics, Pose
from .errors import FormatError


def atomic_write_bytes(path: str, data: bytes) -> None:
    path = os.fspath(path)
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=parent, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path: str, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _emit(obj, out: list, indent: int) -> None:
    pad = "  " * indent
    if obj is None or obj is True or obj is False:
        out.append("null" if obj is None else ("true" if obj is True else "false"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"non-finite float {x} not representable in JSON")
        out.append(format(x, ".17g"))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise ValueError(f"JSON keys must be strings, got {type(k).__name__}")
            out.append(f"{pad}  {json.dumps(k)}: ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(items):
            _emit(v, out, indent)
            if i < len(items) - 1:
                out.append(", ")
        out.append("]")
    else:
        raise ValueError(f"cannot serialize {type(obj).__name__} to JSON")


def dumps_json(obj) -> str:
    """Deterministic JSON text: 17-significant-digit floats, insertion order."""
    out: list = []
    _emit(obj, out, 0)
    out.append("\n")
    return "".join(out)


def save_json(path: str, obj) -> None:
    atomic_write_text(path, dumps_json(obj))


def load_json(path: str):
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: invalid JSON: {e}") from e


CAMERA_KEYS = ("fx", "fy", "cx", "cy", "width", "height", "rotation", "translation")


def save_camera(path: str, K: CameraIntrinsics, pose: Pose) -> None:
    """One view per file: intrinsics plus world-to-camera pose, fixed keys."""
    doc = {
        "fx": K.fx,
        "fy": K.fy,
        "cx": K.cx,
        "cy": K.cy,
        "width": K.width,
        "height": K.height,
        "rotation": [float(v) for v in pose.rotation.reshape(9)],
        "translation": [float(v) for v in pose.translation],
    }
    save_json(path, doc)


def load_camera(path: str):
    doc = load_json(path)
    missing = [k for k in CAMERA_KEYS if k not in doc]
    if missing:
        raise FormatError(f"{path}: missing camera keys {missing}")
    try:
        K = CameraIntrinsics(
            fx=doc["fx"],
            fy=doc["fy"],
            cx=doc["cx"],
            cy=doc["cy"],
            width=doc["width"],
            height=doc["height"],
        )
        rotation = np.asarray(doc["rotation"], dtype=np.float64).reshape(3, 3)
        pose = Pose(rotation, np.asarray(doc["translation"], dtype=np.float64))
    except (ValueError, TypeError) as e:
        raise FormatError(f"{path}: bad camera fields: {e}") from e
    return K, pose
