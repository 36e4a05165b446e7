"""Benchmark the compiled kernels against the pure-numpy reference.

Times the two hot paths (z-buffered splat scatter and red-black harmonic
sweeps) on warp-sized workloads and verifies that both backends produce
bit-identical outputs.  Run from the repo root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --width 1280 --height 960 --repeats 7
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pseudoview._kernels import reference

try:
    from pseudoview._kernels import _ext
except ImportError:
    _ext = None


def _best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _scatter_workload(height: int, width: int, seed: int):
    # four bilinear corners per source pixel, like a dense forward warp
    rng = np.random.default_rng(seed)
    m = 4 * height * width
    n_pixels = height * width
    idx = rng.integers(0, n_pixels, m, dtype=np.int64)
    au = rng.random(m // 4)
    weights = np.stack([(1 - au), au, (1 - au) * 0.5, au * 0.5], axis=1).reshape(-1)
    z = np.repeat(rng.uniform(2.0, 50.0, m // 4), 4)
    rgb = rng.random((m, 3))
    return idx, np.ascontiguousarray(weights), np.ascontiguousarray(z), rgb, n_pixels


def bench_scatter(height: int, width: int, repeats: int, seed: int):
    idx, w, z, rgb, n_pixels = _scatter_workload(height, width, seed)
    args = (idx, w, z, rgb, n_pixels, 0.01)
    out_np = reference.scatter_splats(*args)
    t_np = _best_of(lambda: reference.scatter_splats(*args), repeats)
    if _ext is None:
        return t_np, None, None
    out_cy = _ext.scatter_splats(*args)
    t_cy = _best_of(lambda: _ext.scatter_splats(*args), repeats)
    diff = max(
        float(np.abs(np.where(np.isfinite(a), a, 0) - np.where(np.isfinite(b), b, 0)).max())
        for a, b in zip(out_np, out_cy)
    )
    return t_np, t_cy, diff


def bench_sweeps(height: int, width: int, repeats: int, seed: int, n_sweeps: int = 50):
    rng = np.random.default_rng(seed)
    base = rng.random((height, width))
    yy, xx = np.mgrid[0:height, 0:width]
    hole = (yy - height / 2) ** 2 + (xx - width / 2) ** 2 < (min(height, width) / 4) ** 2
    unknown = np.ascontiguousarray(hole.astype(np.uint8))
    cnt = np.full((height, width), 4.0)
    cnt[0, :] -= 1.0
    cnt[-1, :] -= 1.0
    cnt[:, 0] -= 1.0
    cnt[:, -1] -= 1.0

    def run(sweep_fn, v):
        for _ in range(n_sweeps):
            sweep_fn(v, unknown, cnt)
        return v

    v_np = run(reference.redblack_sweep, base.copy())
    t_np = _best_of(lambda: run(reference.redblack_sweep, base.copy()), repeats)
    if _ext is None:
        return t_np, None, None
    v_cy = run(_ext.redblack_sweep, base.copy())
    t_cy = _best_of(lambda: run(_ext.redblack_sweep, base.copy()), repeats)
    return t_np, t_cy, float(np.abs(v_np - v_cy).max())


def _row(name: str, t_np: float, t_cy, diff) -> str:
    if t_cy is None:
        return f"{name:<28} numpy {t_np * 1e3:8.2f} ms   (cython backend unavailable)"
    return (
        f"{name:<28} numpy {t_np * 1e3:8.2f} ms   cython {t_cy * 1e3:8.2f} ms"
        f"   speedup {t_np / t_cy:5.2f}x   max|diff| {diff:.1e}"
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--width", type=int, default=640)
    parser.add_argument("--height", type=int, default=480)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    h, w = args.height, args.width
    print(f"workload {w}x{h}, best of {args.repeats}")
    print(_row(
        f"scatter ({4 * h * w} splats)", *bench_scatter(h, w, args.repeats, args.seed)
    ))
    print(_row("redblack (50 sweeps)", *bench_sweeps(h, w, args.repeats, args.seed)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
