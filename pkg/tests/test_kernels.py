"""Backend parity: the compiled kernels and the numpy fallback must agree
bit for bit, and both must match a plain-python re-derivation."""

from __future__ import annotations

import numpy as np
import pytest

from pseudoview import _kernels
from pseudoview._kernels import reference
from pseudoview._oracles import scatter_splats_oracle


def _random_splats(rng, n_pixels: int, n_splats: int):
    idx = rng.integers(0, n_pixels, size=n_splats).astype(np.int64)
    w = rng.uniform(1e-6, 1.0, size=n_splats)
    z = rng.uniform(0.5, 30.0, size=n_splats)
    rgb = rng.random((n_splats, 3))
    return (
        np.ascontiguousarray(idx),
        np.ascontiguousarray(w),
        np.ascontiguousarray(z),
        np.ascontiguousarray(rgb),
    )


@pytest.mark.parametrize("seed", range(6))
def test_scatter_backends_bitwise_equal(seed: int) -> None:
    rng = np.random.default_rng(seed)
    n_pixels = 400
    idx, w, z, rgb = _random_splats(rng, n_pixels, 3000)
    a = _kernels.scatter_splats(idx, w, z, rgb, n_pixels, 0.01)
    b = reference.scatter_splats(idx, w, z, rgb, n_pixels, 0.01)
    for got, want in zip(a, b):
        assert np.array_equal(got, want)


@pytest.mark.parametrize("seed", range(3))
def test_scatter_matches_python_oracle(seed: int) -> None:
    rng = np.random.default_rng(100 + seed)
    n_pixels = 64
    idx, w, z, rgb = _random_splats(rng, n_pixels, 500)
    got = _kernels.scatter_splats(idx, w, z, rgb, n_pixels, 0.01)
    want = scatter_splats_oracle(
        idx.tolist(), w.tolist(), z.tolist(), rgb.tolist(), n_pixels, 0.01
    )
    for g, wv in zip(got, want):
        assert np.array_equal(g, wv)


def test_scatter_depth_band_keeps_near_cluster() -> None:
    # three splats on one pixel: 2.0 and 2.01 are within the 1% band of the
    # minimum, 5.0 is occluded and must not contribute
    idx = np.array([7, 7, 7], dtype=np.int64)
    w = np.array([0.5, 0.25, 1.0])
    z = np.array([2.0, 2.01, 5.0])
    rgb = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    minz, wsum, csum = _kernels.scatter_splats(idx, w, z, rgb, 16, 0.01)
    assert minz[7] == 2.0
    assert wsum[7] == 0.75
    assert np.array_equal(csum[7], [0.5, 0.25, 0.0])


def test_scatter_band_boundary_is_inclusive() -> None:
    idx = np.array([0, 0], dtype=np.int64)
    w = np.array([1.0, 1.0])
    z = np.array([2.0, 2.0 * 1.01])  # exactly on the band edge
    rgb = np.ones((2, 3))
    _minz, wsum, _csum = _kernels.scatter_splats(idx, w, z, rgb, 1, 0.01)
    assert wsum[0] == 2.0


def test_scatter_empty_input() -> None:
    out = _kernels.scatter_splats(
        np.empty(0, dtype=np.int64),
        np.empty(0),
        np.empty(0),
        np.empty((0, 3)),
        9,
        0.01,
    )
    minz, wsum, csum = out
    assert np.all(np.isinf(minz))
    assert np.all(wsum == 0.0)
    assert np.all(csum == 0.0)


@pytest.mark.parametrize("seed", range(4))
def test_redblack_backends_bitwise_equal(seed: int) -> None:
    rng = np.random.default_rng(seed)
    H, W = 23, 31
    v1 = rng.random((H, W))
    unknown = (rng.random((H, W)) < 0.3).astype(np.uint8)
    v1[unknown.astype(bool)] = 0.0
    cnt = np.zeros((H, W))
    cnt[:] = 4.0
    cnt[0, :] -= 1.0
    cnt[-1, :] -= 1.0
    cnt[:, 0] -= 1.0
    cnt[:, -1] -= 1.0
    v2 = v1.copy()
    for _ in range(5):
        r1 = _kernels.redblack_sweep(v1, unknown, cnt)
        r2 = reference.redblack_sweep(v2, unknown, cnt)
        assert r1 == r2
        assert np.array_equal(v1, v2)


def test_redblack_sweep_touches_only_unknowns() -> None:
    rng = np.random.default_rng(42)
    v = rng.random((9, 9))
    unknown = np.zeros((9, 9), dtype=np.uint8)
    unknown[4, 4] = 1
    before = v.copy()
    cnt = np.full((9, 9), 4.0)
    _kernels.redblack_sweep(v, unknown, cnt)
    known = ~unknown.astype(bool)
    assert np.array_equal(v[known], before[known])


def test_backend_env_override(monkeypatch) -> None:
    # the import-time switch is observable through the BACKEND constant
    assert _kernels.BACKEND in ("cython", "numpy")
    import importlib
    import os
    import subprocess
    import sys

    env = dict(os.environ, PSEUDOVIEW_FORCE_NUMPY="1")
    out = subprocess.run(
        [sys.executable, "-c", "import pseudoview; print(pseudoview.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "numpy"
    importlib.import_module("pseudoview._kernels")
