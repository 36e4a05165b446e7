"""Command-line front end.

Subcommands: warp, bounds, calibrate, confidence, loss, cascade-sim,
selftest.  Exit codes: 0 success, 1 validation/input error (including bad
flags), 2 runtime failure.  With --json-errors, failures print a
machine-readable {"error", "message"} object to stderr instead of prose.
All file outputs are written atomically.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .bounds import (
    WarpBudget,
    certify_pose,
    scene_extent_from_depth,
    solve_bounds_lateral,
    solve_bounds_with_tz,
)
from .calibration import (
    HUBER_DELTA,
    MAX_PAIRS,
    MIN_PAIRS,
    build_pairs,
    fit_calibration,
)
from .camera import relative_pose
from .cascade import CascadeConfig, run_cascade
from .errors import (
    FormatError,
    InsufficientDataError,
    PseudoviewError,
    RankDeficiencyError,
)
from .image import DepthImage
from .inpaint import diffusion_free_inpaint
from .losses import (
    LAMBDA,
    LAMBDA1,
    base_loss,
    confidence_loss,
    confidence_weights,
    with_confidence,
)
from .pfm import load_pfm, load_pfm_disparity, save_pfm
from .pngio import load_color_png, save_color_png, save_mask_png
from .pointcloud import load_pointcloud, project_pointcloud
from .scene import load_scene, scene_from_dict
from .serialization import (
    atomic_write_text,
    dumps_json,
    load_camera,
    load_json,
    save_json,
)
from .warp import forward_warp, hole_fraction

_VALIDATION_ERRORS = (
    ValueError,
    FormatError,
    InsufficientDataError,
    RankDeficiencyError,
    FileNotFoundError,
    IsADirectoryError,
    NotADirectoryError,
)


def _data_path(name: str) -> str:
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", name)


def _cmd_warp(args) -> int:
    src_K, src_pose = load_camera(args.src_cam)
    dst_K, dst_pose = load_camera(args.dst_cam)
    image = load_color_png(args.src_image)
    depth = load_pfm(args.src_depth)
    rel = relative_pose(src_pose, dst_pose)
    out = forward_warp(
        image,
        depth,
        src_K,
        rel,
        target_K=dst_K,
        depth_band=args.depth_band,
        weight_floor=args.weight_floor,
    )
    prefix = args.out_prefix
    save_color_png(prefix + "_image.png", out.image)
    save_pfm(prefix + "_depth.pfm", out.depth)
    save_mask_png(prefix + "_mask.png", out.hole_mask)
    print(dumps_json({"hole_fraction": hole_fraction(out)}), end="")
    return 0


def _cmd_bounds(args) -> int:
    K, _pose = load_camera(args.cam)
    depth = load_pfm(args.depth)
    budget = WarpBudget(
        epsilon=args.epsilon, z_min=depth.min_valid_depth(), fixed_t_z=args.tz
    )
    if budget.fixed_t_z == 0.0:
        b = solve_bounds_lateral(budget, K)
    else:
        b = solve_bounds_with_tz(budget, K, scene_extent_from_depth(depth, K))
    _ok, max_disp = certify_pose(
        depth, K, np.array([b.max_t_x, b.max_t_y, b.t_z]), budget.epsilon
    )
    print(
        dumps_json(
            {
                "max_t_x": b.max_t_x,
                "max_t_y": b.max_t_y,
                "t_z": b.t_z,
                "certified_max_disp": max_disp,
            }
        ),
        end="",
    )
    return 0


def _load_lidar_depth(path: str, cam_path: str) -> DepthImage:
    K, pose = load_camera(cam_path)
    if path.endswith(".pfm"):
        depth = load_pfm(path)
        if (depth.height, depth.width) != (K.height, K.width):
            raise ValueError(
                f"{path}: {depth.height}x{depth.width} does not match camera "
                f"{K.height}x{K.width}"
            )
        return depth
    points, skipped = load_pointcloud(path)
    if skipped:
        print(f"note: skipped {skipped} non-finite point rows", file=sys.stderr)
    return project_pointcloud(points, pose, K)


def _cmd_calibrate(args) -> int:
    disparity = load_pfm_disparity(args.disparity)
    lidar = _load_lidar_depth(args.lidar, args.cam)
    pairs = build_pairs(
        lidar,
        disparity,
        max_pairs=args.max_pairs,
        min_pairs=args.min_pairs,
        seed=args.seed,
    )
    report = fit_calibration(pairs, delta=args.delta)
    p = report.params
    if args.pairs_csv:
        rows = ["i,j,lidar_depth,d_mono"]
        for k in range(pairs.size):
            rows.append(
                f"{pairs.i[k]},{pairs.j[k]},{pairs.lidar[k]:.17g},{pairs.d_mono[k]:.17g}"
            )
        atomic_write_text(args.pairs_csv, "\n".join(rows) + "\n")
    save_json(args.out, {"c1": p.c1, "c2": p.c2, "c3": p.c3})
    if args.report:
        save_json(
            args.report,
            {
                "c1": p.c1,
                "c2": p.c2,
                "c3": p.c3,
                "inlier_rmse": report.inlier_rmse,
                "iterations": report.iterations,
                "converged": report.converged,
                "residual_percentiles": {
                    "p50": report.residual_percentiles[0],
                    "p90": report.residual_percentiles[1],
                    "p99": report.residual_percentiles[2],
                },
                "pairs": pairs.size,
            },
        )
    print(
        dumps_json(
            {"c1": p.c1, "c2": p.c2, "c3": p.c3, "converged": report.converged}
        ),
        end="",
    )
    return 0


def _cmd_confidence(args) -> int:
    rendered = load_color_png(args.rendered)
    inpainted = load_color_png(args.inpainted)
    W = confidence_weights(rendered, inpainted, args.lambda1)
    save_pfm(args.out, W.data)
    l_con = confidence_loss(rendered, inpainted, W)
    print(dumps_json({"l_con": l_con}), end="")
    return 0


def _cmd_loss(args) -> int:
    rendered = load_color_png(args.rendered)
    gt = load_color_png(args.gt)
    if (args.rendered_depth is None) != (args.gt_depth is None):
        raise ValueError("provide both --rendered-depth and --gt-depth or neither")
    rd = load_pfm(args.rendered_depth) if args.rendered_depth else None
    gd = load_pfm(args.gt_depth) if args.gt_depth else None
    breakdown = base_loss(rendered, gt, rd, gd, args.lam)
    if args.inpainted:
        inpainted = load_color_png(args.inpainted)
        W = confidence_weights(rendered, inpainted, args.lambda1)
        breakdown = with_confidence(
            breakdown, confidence_loss(rendered, inpainted, W)
        )
    print(
        dumps_json(
            {
                "l1": breakdown.l1,
                "ssim_term": breakdown.ssim_term,
                "depth_l1": breakdown.depth_l1,
                "l_ori": breakdown.l_ori,
                "l_con": breakdown.l_con,
                "total": breakdown.total,
            }
        ),
        end="",
    )
    return 0


def _build_cascade_inputs(config_doc: dict, renderer):
    views = []
    for cam_doc in config_doc["input_views"]:
        from .camera import CameraIntrinsics, Pose

        K = CameraIntrinsics(
            fx=cam_doc["fx"],
            fy=cam_doc["fy"],
            cx=cam_doc["cx"],
            cy=cam_doc["cy"],
            width=cam_doc["width"],
            height=cam_doc["height"],
        )
        pose = Pose(
            np.asarray(cam_doc["rotation"], dtype=np.float64).reshape(3, 3),
            np.asarray(cam_doc["translation"], dtype=np.float64),
        )
        gt_img, gt_depth = renderer.render(pose, K)
        views.append((pose, K, gt_img, gt_depth))
    return views


def cascade_config_from_doc(doc: dict) -> CascadeConfig:
    return CascadeConfig(
        total_iterations=doc["total_iterations"],
        warp_steps=tuple(doc["warp_steps"]),
        warmup_iterations=doc["warmup_iterations"],
        views_per_round=doc["views_per_round"],
        input_view_count=len(doc["input_views"]),
        budget=WarpBudget(
            epsilon=doc["epsilon"], z_min=doc["z_min"], fixed_t_z=doc.get("t_z", 0.0)
        ),
        lam=doc.get("lam", LAMBDA),
        lambda1=doc.get("lambda1", LAMBDA1),
        direction=tuple(doc.get("direction", (1.0, 0.0))),
        step_scale=doc.get("step_scale", 1.0),
        continue_chain=doc.get("continue_chain", False),
        seed=doc.get("seed", 0),
    )


def write_cascade_outputs(out_dir: str, config: CascadeConfig, records, trace) -> None:
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for rec in records:
        stem = f"view_{rec.index:03d}"
        save_color_png(os.path.join(out_dir, stem + "_image.png"), rec.gt_image)
        save_pfm(os.path.join(out_dir, stem + "_depth.pfm"), rec.gt_depth)
        save_mask_png(os.path.join(out_dir, stem + "_mask.png"), rec.gt_mask)
        entries.append(
            {
                "index": rec.index,
                "parent": rec.parent,
                "pose": {
                    "rotation": [float(v) for v in rec.pose.rotation.reshape(9)],
                    "translation": [float(v) for v in rec.pose.translation],
                },
                "certified_max_disp": rec.certified_max_disp,
                "files": {
                    "image": stem + "_image.png",
                    "depth": stem + "_depth.pfm",
                    "mask": stem + "_mask.png",
                },
            }
        )
    ledger = {
        "epsilon": config.budget.epsilon,
        "views_per_round": config.views_per_round,
        "rounds": len(config.warp_steps),
        "records": entries,
    }
    save_json(os.path.join(out_dir, "ledger.json"), ledger)
    rows = ["iteration,l_ori,l_con,total"]
    for t, l_ori, l_con, total in trace:
        rows.append(f"{t},{l_ori:.17g},{l_con:.17g},{total:.17g}")
    atomic_write_text(os.path.join(out_dir, "loss_trace.csv"), "\n".join(rows) + "\n")


def _cmd_cascade_sim(args) -> int:
    scene_path = args.scene or _data_path("demo_scene.json")
    config_path = args.config or _data_path("demo_cascade.json")
    renderer = load_scene(scene_path)
    doc = load_json(config_path)
    config = cascade_config_from_doc(doc)
    input_views = _build_cascade_inputs(doc, renderer)
    _renderer, records, trace = run_cascade(
        config, renderer, diffusion_free_inpaint, input_views
    )
    write_cascade_outputs(args.out, config, records, trace)
    print(dumps_json({"records": len(records), "out": args.out}), end="")
    return 0


def _cmd_selftest(args) -> int:
    from . import selftest

    return selftest.run(verbose=not args.quiet)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pseudoview",
        description="Pseudo-view synthesis core: warping, bounds, calibration, "
        "losses, cascade simulation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--json-errors",
        action="store_true",
        help="print failures as JSON on stderr",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("warp", help="forward-warp a source view to a target pose")
    p.add_argument("--src-image", required=True)
    p.add_argument("--src-depth", required=True)
    p.add_argument("--src-cam", required=True)
    p.add_argument("--dst-cam", required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--depth-band", type=float, default=0.01)
    p.add_argument("--weight-floor", type=float, default=1e-4)
    p.set_defaults(func=_cmd_warp)

    p = sub.add_parser("bounds", help="solve translation bounds for a depth map")
    p.add_argument("--cam", required=True)
    p.add_argument("--depth", required=True)
    p.add_argument("--epsilon", type=float, default=32.0)
    p.add_argument("--tz", type=float, default=0.0)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("calibrate", help="fit disparity-to-depth calibration")
    p.add_argument("--disparity", required=True)
    p.add_argument("--lidar", required=True, help=".xyz/.bin cloud or sparse .pfm")
    p.add_argument("--cam", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.add_argument("--pairs-csv")
    p.add_argument("--delta", type=float, default=HUBER_DELTA)
    p.add_argument("--max-pairs", type=int, default=MAX_PAIRS)
    p.add_argument("--min-pairs", type=int, default=MIN_PAIRS)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("confidence", help="confidence weight map and loss")
    p.add_argument("--rendered", required=True)
    p.add_argument("--inpainted", required=True)
    p.add_argument("--lambda1", type=float, default=LAMBDA1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_confidence)

    p = sub.add_parser("loss", help="loss breakdown for an image (and depth) pair")
    p.add_argument("--rendered", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--rendered-depth")
    p.add_argument("--gt-depth")
    p.add_argument("--inpainted", help="adds the confidence term")
    p.add_argument("--lam", type=float, default=LAMBDA)
    p.add_argument("--lambda1", type=float, default=LAMBDA1)
    p.set_defaults(func=_cmd_loss)

    p = sub.add_parser(
        "cascade-sim", help="run the cascade on a synthetic plane scene"
    )
    p.add_argument("--scene", help="scene JSON (default: bundled demo)")
    p.add_argument("--config", help="cascade JSON (default: bundled demo)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cascade_sim)

    p = sub.add_parser("selftest", help="run the embedded invariant suite")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; map those to validation (1)
        if e.code in (None, 0):
            return 0
        return 1
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as e:
        _report_error(args, e)
        return 1
    except (PseudoviewError, Exception) as e:  # noqa: BLE001 - single funnel
        _report_error(args, e)
        return 2


def _report_error(args, e: Exception) -> None:
    if getattr(args, "json_errors", False):
        print(
            dumps_json({"error": type(e).__name__, "message": str(e)}),
            end="",
            file=sys.stderr,
        )
    else:
        print(f"error: {e}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
