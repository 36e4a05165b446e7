from __future__ import annotations

import numpy as np
import pytest

from pseudoview.bounds import WarpBudget, certify_pose, solve_bounds_lateral
from pseudoview.camera import CameraIntrinsics, Pose, relative_pose
from pseudoview.cascade import CascadeConfig, cascade_round, run_cascade
from pseudoview.errors import InpaintContractError
from pseudoview.image import ColorImage, DepthImage
from pseudoview.inpaint import diffusion_free_inpaint, identity_inpaint
from pseudoview.selftest import demo_scene
from pseudoview.warp import forward_warp


def _k(width=96, height=72):
    return CameraIntrinsics(
        fx=260.0 * width / 320.0,
        fy=260.0 * width / 320.0,
        cx=(width - 1) / 2.0,
        cy=(height - 1) / 2.0,
        width=width,
        height=height,
    )


def _config(**kw) -> CascadeConfig:
    base = dict(
        total_iterations=12,
        warp_steps=(4,),
        warmup_iterations=2,
        views_per_round=3,
        input_view_count=1,
        budget=WarpBudget(epsilon=24.0, z_min=5.0),
    )
    base.update(kw)
    return CascadeConfig(**base)


def _inputs(renderer, K):
    pose = Pose.identity()
    img, dep = renderer.render(pose, K)
    return [(pose, K, img, dep)]


def test_config_validation() -> None:
    with pytest.raises(ValueError):
        _config(warp_steps=(2,), warmup_iterations=2)  # warmup must precede
    with pytest.raises(ValueError):
        _config(warp_steps=(4, 4))
    with pytest.raises(ValueError):
        _config(views_per_round=0)
    with pytest.raises(ValueError):
        _config(step_scale=0.0)
    cfg = _config(warp_steps=(5, 9), warmup_iterations=4)
    assert cfg.warp_steps == (5, 9)


def test_default_schedule_shape() -> None:
    cfg = CascadeConfig.default_schedule(scale=1e-3)
    assert cfg.warmup_iterations < cfg.warp_steps[0]
    assert len(cfg.warp_steps) == 3
    assert list(cfg.warp_steps) == sorted(set(cfg.warp_steps))
    assert cfg.total_iterations > cfg.warp_steps[-1]
    assert cfg.views_per_round == 3


def test_empty_warp_steps_yields_no_views() -> None:
    renderer = demo_scene()
    K = _k()
    _r, records, trace = run_cascade(
        _config(warp_steps=(), warmup_iterations=1, total_iterations=6),
        renderer,
        diffusion_free_inpaint,
        _inputs(renderer, K),
    )
    assert records == []
    assert len(trace) == 6
    assert all(row[2] == 0.0 for row in trace)


def test_single_round_ledger() -> None:
    renderer = demo_scene()
    K = _k()
    _r, records, _trace = run_cascade(
        _config(), renderer, diffusion_free_inpaint, _inputs(renderer, K)
    )
    assert len(records) == 3
    assert [r.index for r in records] == [0, 1, 2]
    assert records[0].parent == "input:0"
    assert records[1].parent == 0
    assert records[2].parent == 1
    for r in records:
        assert r.certified_max_disp <= 24.0 * (1 + 1e-12)
        assert r.gt_image.data.shape == (72, 96, 3)


def test_chained_offsets_accumulate() -> None:
    # pure lateral steps: each pose advances by the same solved bound, so the
    # cumulative offset after j views is j times the per-step offset
    renderer = demo_scene()
    K = _k()
    _r, records, _t = run_cascade(
        _config(), renderer, diffusion_free_inpaint, _inputs(renderer, K)
    )
    steps = [r.pose.translation[0] for r in records]
    diffs = np.diff([0.0] + steps)
    assert np.all(diffs > 0)
    b0 = diffs[0]
    assert records[2].pose.translation[0] == pytest.approx(3 * b0, rel=1e-6)
    assert all(abs(r.pose.translation[1]) < 1e-15 for r in records)
    assert all(abs(r.pose.translation[2]) < 1e-15 for r in records)


def test_identity_inpainter_on_identity_warp() -> None:
    # no-op inpainter passes the contract when the warp has no holes
    renderer = demo_scene()
    K = _k()
    pose = Pose.identity()
    img, dep = renderer.render(pose, K)
    out = forward_warp(img, dep, K, Pose.identity())
    assert not out.hole_mask.any()
    img_i, dep_i, residual = identity_inpaint(out.image, out.depth, out.hole_mask)
    assert np.array_equal(img_i.data, img.data)
    assert np.array_equal(dep_i.data, dep.data)
    assert not residual.any()


def test_round_views_warp_from_inpainted_parent() -> None:
    renderer = demo_scene()
    K = _k()
    anchor_pose = Pose.identity()
    records = cascade_round(
        renderer, diffusion_free_inpaint, (anchor_pose, K), _config()
    )
    # child view content equals warp(parent content) on its non-hole set
    parent = records[0]
    child = records[1]
    redo = forward_warp(
        parent.gt_image,
        parent.gt_depth,
        K,
        relative_pose(parent.pose, child.pose),
    )
    keep = ~redo.hole_mask
    assert np.array_equal(redo.image.data[keep], child.gt_image.data[keep])


def test_contract_violation_detected() -> None:
    def vandal(image: ColorImage, depth: DepthImage, hole_mask):
        v, u = np.argwhere(~hole_mask)[0]  # clobber a non-hole pixel
        data = image.data.copy()
        data[v, u] = 1.0 - data[v, u]
        return ColorImage(data), depth, np.zeros_like(hole_mask)

    renderer = demo_scene()
    K = _k()
    with pytest.raises(InpaintContractError):
        cascade_round(renderer, vandal, (Pose.identity(), K), _config())


def test_residual_leak_detected() -> None:
    def leaky(image: ColorImage, depth: DepthImage, hole_mask):
        res = np.zeros_like(hole_mask)
        v, u = np.argwhere(~hole_mask)[0]
        res[v, u] = True  # claims a residual outside the hole set
        return image, depth, res

    renderer = demo_scene()
    K = _k()
    with pytest.raises(InpaintContractError):
        cascade_round(renderer, leaky, (Pose.identity(), K), _config())


def test_multi_round_reanchors_at_input() -> None:
    renderer = demo_scene()
    K = _k()
    _r, records, _t = run_cascade(
        _config(total_iterations=16, warp_steps=(4, 9)),
        renderer,
        diffusion_free_inpaint,
        _inputs(renderer, K),
    )
    assert len(records) == 6
    assert records[3].parent == "input:0"
    assert records[4].parent == 3


def test_continue_chain_extends_last_view() -> None:
    renderer = demo_scene()
    K = _k()
    _r, records, _t = run_cascade(
        _config(total_iterations=16, warp_steps=(4, 9), continue_chain=True),
        renderer,
        diffusion_free_inpaint,
        _inputs(renderer, K),
    )
    assert records[3].parent == "pseudo:2"
    x = [r.pose.translation[0] for r in records]
    assert all(b > a for a, b in zip(x, x[1:]))  # keeps marching outward


def test_multiple_input_views_cycle_and_anchor() -> None:
    renderer = demo_scene()
    K = _k()
    p0 = Pose.identity()
    # second observation placed along +x travel: its center has the largest
    # projection onto the travel direction, so rounds re-anchor off it
    p1 = Pose(np.eye(3), np.array([-0.4, 0.0, 0.0]))
    i0, d0 = renderer.render(p0, K)
    i1, d1 = renderer.render(p1, K)
    cfg = _config(input_view_count=2, total_iterations=10, warp_steps=(3,))
    _r, records, trace = run_cascade(
        cfg, renderer, diffusion_free_inpaint, [(p0, K, i0, d0), (p1, K, i1, d1)]
    )
    assert records[0].parent == "input:1"
    assert len(trace) == 10


def test_input_count_mismatch_rejected() -> None:
    renderer = demo_scene()
    K = _k()
    with pytest.raises(ValueError):
        run_cascade(
            _config(input_view_count=2),
            renderer,
            diffusion_free_inpaint,
            _inputs(renderer, K),
        )


def test_trace_totals_are_exact_sums() -> None:
    renderer = demo_scene()
    K = _k()
    _r, _records, trace = run_cascade(
        _config(), renderer, diffusion_free_inpaint, _inputs(renderer, K)
    )
    for _t, l_ori, l_con, total in trace:
        assert total == l_ori + l_con


def test_residual_holes_zero_confidence_weight() -> None:
    # an inpainter that refuses to fill marks everything residual; those
    # pixels must not contribute any confidence loss
    renderer = demo_scene()
    K = _k()
    _r, records, trace = run_cascade(
        _config(), renderer, identity_inpaint, _inputs(renderer, K)
    )
    assert all(r.gt_mask.any() for r in records)
    assert len(trace) == 12
    warped_any = [row for row in trace if row[0] >= 4]
    assert all(np.isfinite(row[3]) for row in warped_any)
