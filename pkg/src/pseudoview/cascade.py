"""Cascade pseudo-view orchestration over pluggable back ends.

The run interleaves plain training iterations with scheduled warp rounds.
Before the warm-up ends only the input views drive the loss.  At each
scheduled iteration a round generates ``views_per_round`` chained pseudo
views: view j is forward-warped from view j-1's inpainted output (view 1
from a freshly rendered anchor), so inpainted content propagates down the
chain and consecutive views stay consistent where they co-observe the
scene.  Every step is certified against the pixel-displacement budget before
it is applied; the certificate is retried at geometrically shrinking step
scales and the round aborts if none passes.

Each iteration feeds the renderer twice once pseudo views exist: first the
base loss on an input view, then the total including the confidence loss on
a pseudo view.  The renderer is treated as an opaque state token; rendering
must be deterministic for a fixed state, and the orchestrator requires
exclusive access to it for the duration of a run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import (
    TranslationBounds,
    WarpBudget,
    certify_pose,
    certify_pose_full,
    generate_pseudo_pose,
    scene_extent_from_depth,
    solve_bounds_lateral,
    solve_bounds_with_tz,
)
from .camera import CameraIntrinsics, Pose, relative_pose
from .errors import CertificationError, InpaintContractError
from .image import ColorImage, DepthImage
from .losses import (
    LAMBDA,
    LAMBDA1,
    ConfidenceMap,
    base_loss,
    confidence_loss,
    confidence_weights,
    with_confidence,
)
from .warp import forward_warp

_ROT_IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class CascadeConfig:
    total_iterations: int
    warp_steps: tuple
    warmup_iterations: int
    views_per_round: int
    input_view_count: int
    budget: WarpBudget
    lam: float = LAMBDA
    lambda1: float = LAMBDA1
    direction: tuple = (1.0, 0.0)
    step_scale: float = 1.0
    continue_chain: bool = False
    seed: int = 0

    def __post_init__(self):
        steps = tuple(sorted(int(s) for s in self.warp_steps))
        object.__setattr__(self, "warp_steps", steps)
        object.__setattr__(self, "direction", tuple(float(d) for d in self.direction))
        if self.total_iterations < 1:
            raise ValueError("total_iterations must be positive")
        if self.warmup_iterations < 1:
            raise ValueError("warmup_iterations must be positive")
        if self.views_per_round < 1 or self.input_view_count < 1:
            raise ValueError("views_per_round and input_view_count must be >= 1")
        if len(set(steps)) != len(steps):
            raise ValueError("warp_steps must be distinct")
        if steps:
            if self.warmup_iterations >= steps[0]:
                raise ValueError(
                    f"warmup ({self.warmup_iterations}) must end strictly before "
                    f"the first warp step ({steps[0]})"
                )
            if steps[-1] >= self.total_iterations:
                raise ValueError("all warp steps must lie before total_iterations")
        if not 0 < self.step_scale <= 1:
            raise ValueError("step_scale must be in (0, 1]")

    @staticmethod
    def default_schedule(scale: float = 1.0, **overrides) -> "CascadeConfig":
        """Warm-up then rounds at the 3000/6000/9000 marks of a
        12000-iteration run, all multiplied by ``scale``; tiny scales keep
        the steps distinct and the warm-up strictly before the first round."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        s1 = max(int(3000 * scale), 2)
        s2 = max(int(6000 * scale), s1 + 1)
        s3 = max(int(9000 * scale), s2 + 1)
        cfg = dict(
            total_iterations=max(int(12000 * scale), s3 + 1),
            warp_steps=(s1, s2, s3),
            warmup_iterations=min(max(int(3000 * scale), 1), s1 - 1),
            views_per_round=3,
            input_view_count=1,
            budget=WarpBudget(epsilon=32.0, z_min=4.0),
        )
        cfg.update(overrides)
        return CascadeConfig(**cfg)


@dataclass(frozen=True)
class PseudoViewRecord:
    """One generated pseudo view: pose, camera, stored ground truth
    (inpainted warp), provenance, and its certified worst-case displacement.

    ``parent`` is the previous record's integer index, or "input:<k>" /
    "pseudo:<k>" for the anchor a round started from.
    """

    index: int
    pose: Pose
    intrinsics: CameraIntrinsics
    parent: object
    gt_image: ColorImage
    gt_depth: DepthImage
    gt_mask: np.ndarray  # residual holes: true where gt carries no content
    certified_max_disp: float

    def __post_init__(self):
        mask = np.ascontiguousarray(np.asarray(self.gt_mask, dtype=bool))
        if mask.shape != self.gt_depth.data.shape:
            raise ValueError("gt_mask shape mismatch")
        mask.setflags(write=False)
        object.__setattr__(self, "gt_mask", mask)


def _certify(depth: DepthImage, K: CameraIntrinsics, rel: Pose, epsilon: float):
    """Closed-form certificate for translation-only steps, full pipeline
    otherwise."""
    if np.abs(rel.rotation - np.eye(3)).max() <= _ROT_IDENTITY_TOL:
        return certify_pose(depth, K, rel.translation, epsilon)
    return certify_pose_full(depth, K, rel, epsilon)


def _solve_step_bounds(
    config: CascadeConfig, K: CameraIntrinsics, depth: DepthImage
) -> TranslationBounds:
    if config.budget.fixed_t_z == 0.0:
        return solve_bounds_lateral(config.budget, K)
    return solve_bounds_with_tz(config.budget, K, scene_extent_from_depth(depth, K))


def _check_inpaint_contract(warp_out, img_i: ColorImage, dep_i: DepthImage, residual):
    hole = warp_out.hole_mask
    keep = ~hole
    residual = np.asarray(residual, dtype=bool)
    if img_i.data.shape != warp_out.image.data.shape or (
        dep_i.data.shape != warp_out.depth.data.shape
    ):
        raise InpaintContractError("inpainter changed buffer dimensions")
    if residual.shape != hole.shape:
        raise InpaintContractError("residual mask has wrong shape")
    if not np.array_equal(img_i.data[keep], warp_out.image.data[keep]):
        raise InpaintContractError("inpainter modified non-hole colors")
    if not np.array_equal(dep_i.data[keep], warp_out.depth.data[keep]):
        raise InpaintContractError("inpainter modified non-hole depths")
    if not dep_i.mask[keep].all():
        raise InpaintContractError("inpainter invalidated non-hole depths")
    if (residual & keep).any():
        raise InpaintContractError("residual mask leaks outside the hole mask")


def cascade_round(
    renderer,
    inpainter,
    anchor: tuple,
    config: CascadeConfig,
    start_index: int = 0,
    anchor_id: object = "input:0",
) -> list:
    """Generate one chained round of pseudo views off the given anchor.

    ``anchor`` is (Pose, CameraIntrinsics); its content is rendered fresh.
    Certification shrinks the step geometrically (up to 60 halvings) when the
    nominal step fails, and raises CertificationError if no scale passes.
    """
    cur_pose, K = anchor
    cur_image, cur_depth = renderer.render(cur_pose, K)
    records = []
    for j in range(config.views_per_round):
        bounds = _solve_step_bounds(config, K, cur_depth)
        scale = config.step_scale
        next_pose = rel = None
        ok, max_disp = False, float("inf")
        for _ in range(60):
            cand_pose = generate_pseudo_pose(
                cur_pose, bounds.scaled(scale), config.direction
            )
            cand_rel = relative_pose(cur_pose, cand_pose)
            ok, max_disp = _certify(cur_depth, K, cand_rel, config.budget.epsilon)
            if ok:
                next_pose, rel = cand_pose, cand_rel
                break
            scale *= 0.5
        if not ok:
            raise CertificationError(
                f"round aborted at view {start_index + j}: no step scale down to "
                f"{scale:.3e} fits the {config.budget.epsilon}-pixel budget "
                f"(last max_disp {max_disp:.3e})"
            )
        warp_out = forward_warp(cur_image, cur_depth, K, rel)
        img_i, dep_i, residual = inpainter(
            warp_out.image, warp_out.depth, warp_out.hole_mask
        )
        _check_inpaint_contract(warp_out, img_i, dep_i, residual)
        records.append(
            PseudoViewRecord(
                index=start_index + j,
                pose=next_pose,
                intrinsics=K,
                parent=anchor_id if j == 0 else start_index + j - 1,
                gt_image=img_i,
                gt_depth=dep_i,
                gt_mask=residual,
                certified_max_disp=max_disp,
            )
        )
        cur_pose, cur_image, cur_depth = next_pose, img_i, dep_i
    return records


def _travel_direction_world(config: CascadeConfig, reference: Pose) -> np.ndarray:
    d = np.asarray(config.direction, dtype=np.float64)
    if d.shape[0] == 2:
        step = np.array([d[0], d[1], config.budget.fixed_t_z])
    else:
        step = np.array([d[0], d[1], d[2] * config.budget.fixed_t_z])
    n = np.linalg.norm(step)
    if n == 0.0:
        step = np.array([1.0, 0.0, 0.0])
        n = 1.0
    return reference.rotation.T @ (step / n)


def _pick_anchor(config: CascadeConfig, input_views: list, records: list):
    if config.continue_chain and records:
        last = records[-1]
        return (last.pose, last.intrinsics), f"pseudo:{last.index}"
    if len(input_views) == 1:
        k = 0
    else:
        # re-anchor at the input view sitting furthest along the direction
        # of travel, so each round explores fresh territory from the nearest
        # real observation
        w = _travel_direction_world(config, input_views[0][0])
        proj = []
        for pose, _K, _img, _dep in input_views:
            center = -(pose.rotation.T @ pose.translation)
            proj.append(float(center @ w))
        k = int(np.argmax(proj))
    pose, K, _img, _dep = input_views[k]
    return (pose, K), f"input:{k}"


def run_cascade(
    config: CascadeConfig, renderer, inpainter, input_views: list
) -> tuple:
    """Run the full schedule; returns (renderer, records, trace).

    ``input_views`` is a list of (Pose, CameraIntrinsics, ColorImage,
    DepthImage) ground-truth observations.  ``trace`` holds one
    (iteration, l_ori, l_con, total) row per iteration; l_con is 0 until the
    first round has produced pseudo views.  Pseudo views are cycled one per
    iteration for the confidence loss, with residual-hole pixels given zero
    confidence weight so unfilled content cannot contribute.
    """
    if not input_views:
        raise ValueError("need at least one input view")
    if len(input_views) != config.input_view_count:
        raise ValueError(
            f"config declares {config.input_view_count} input views, got "
            f"{len(input_views)}"
        )
    warp_steps = set(config.warp_steps)
    records: list = []
    trace = []
    for t in range(config.total_iterations):
        pose, K, gt_img, gt_depth = input_views[t % len(input_views)]
        rendered_img, rendered_depth = renderer.render(pose, K)
        base = base_loss(rendered_img, gt_img, rendered_depth, gt_depth, config.lam)
        renderer.update({"kind": "base", "iteration": t, "loss": base.l_ori})
        if t in warp_steps:
            anchor, anchor_id = _pick_anchor(config, input_views, records)
            records.extend(
                cascade_round(
                    renderer,
                    inpainter,
                    anchor,
                    config,
                    start_index=len(records),
                    anchor_id=anchor_id,
                )
            )
        l_con = 0.0
        if records:
            rec = records[t % len(records)]
            pseudo_img, _ = renderer.render(rec.pose, rec.intrinsics)
            W = confidence_weights(pseudo_img, rec.gt_image, config.lambda1)
            if rec.gt_mask.any():
                W = ConfidenceMap(np.where(rec.gt_mask, 0.0, W.data))
            l_con = confidence_loss(pseudo_img, rec.gt_image, W)
            full = with_confidence(base, l_con)
            renderer.update(
                {"kind": "confidence", "iteration": t, "loss": full.total}
            )
        trace.append((t, base.l_ori, l_con, base.l_ori + l_con))
    return renderer, records, trace
