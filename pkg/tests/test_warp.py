from __future__ import annotations

import numpy as np
import pytest

from pseudoview._oracles import forward_warp_translation_oracle
from pseudoview.camera import CameraIntrinsics, Pose
from pseudoview.image import ColorImage, DepthImage
from pseudoview.scene import Plane, SceneRenderer, sine_texture
from pseudoview.warp import forward_warp, forward_warp_point, hole_fraction


def _k(width=64, height=48, fx=80.0, fy=80.0):
    return CameraIntrinsics(
        fx=fx, fy=fy, cx=(width - 1) / 2.0, cy=(height - 1) / 2.0,
        width=width, height=height,
    )


def _random_input(rng, K, hole_frac=0.0):
    H, W = K.height, K.width
    depth = 2.0 + rng.uniform(0.0, 6.0, size=(H, W))
    mask = (
        rng.random((H, W)) >= hole_frac
        if hole_frac
        else np.ones((H, W), dtype=bool)
    )
    mask.flat[0] = True
    img = ColorImage(rng.random((H, W, 3)))
    return img, DepthImage(np.where(mask, depth, 0.0), mask)


def test_forward_warp_point_identity() -> None:
    p = np.array([0.3, -1.2, 4.0])
    assert np.array_equal(forward_warp_point(p, Pose.identity()), p)


def test_forward_warp_point_pure_translation() -> None:
    p = np.array([0.0, 0.0, 10.0])
    out = forward_warp_point(p, Pose(np.eye(3), np.array([1.0, 0.0, 0.0])))
    assert np.array_equal(out, [1.0, 0.0, 10.0])


def test_identity_warp_is_bit_lossless() -> None:
    rng = np.random.default_rng(0)
    K = _k()
    img, depth = _random_input(rng, K, hole_frac=0.2)
    out = forward_warp(img, depth, K, Pose.identity())
    assert np.array_equal(out.image.data[depth.mask], img.data[depth.mask])
    assert np.array_equal(out.depth.data, depth.data)
    assert np.array_equal(out.hole_mask, ~depth.mask)


def test_occlusion_nearer_pixel_wins() -> None:
    # u' = u + fx*tx/z: pixel (2,1) at 5 m and pixel (2,2) at 10 m both land
    # exactly on u'=3 under tx=1; the 10 m splat is outside the 1% band of
    # the 5 m minimum and must be culled
    K = CameraIntrinsics(fx=10.0, fy=10.0, cx=3.0, cy=2.0, width=7, height=5)
    depth = np.zeros((5, 7))
    mask = np.zeros((5, 7), dtype=bool)
    depth[2, 1] = 5.0
    depth[2, 2] = 10.0
    mask[2, 1] = True
    mask[2, 2] = True
    img = np.zeros((5, 7, 3))
    img[2, 1] = [1.0, 0.0, 0.0]
    img[2, 2] = [0.0, 1.0, 0.0]
    src_depth = DepthImage(depth, mask)
    out = forward_warp(
        ColorImage(img), src_depth, K, Pose(np.eye(3), np.array([1.0, 0.0, 0.0]))
    )
    assert out.depth.data[2, 3] == 5.0
    assert np.array_equal(out.image.data[2, 3], [1.0, 0.0, 0.0])
    assert not out.hole_mask[2, 3]


def test_plane_translation_matches_shifted_source() -> None:
    # fronto-parallel plane at z=10: the warp is a pure horizontal shift by
    # fx*tx/10 px, so target color (u, v) must equal source (u - shift, v)
    K = _k(width=96, height=64, fx=120.0)
    plane = Plane(
        point=np.array([0.0, 0.0, 10.0]),
        normal=np.array([0.0, 0.0, -1.0]),
        texture=sine_texture(2.0),
    )
    img, depth = SceneRenderer([plane]).render(Pose.identity(), K)
    tx = 0.25  # shift = 120*0.25/10 = 3 px exactly
    out = forward_warp(img, depth, K, Pose(np.eye(3), np.array([tx, 0.0, 0.0])))
    shift = 3
    seen = ~out.hole_mask
    assert seen[:, shift:].all()
    got = out.image.data[:, shift:]
    want = img.data[:, : 96 - shift]
    assert np.abs(got - want).max() <= 1e-12
    assert out.hole_mask[:, :shift].all()


@pytest.mark.parametrize("seed", range(8))
def test_warp_matches_translation_oracle_bitwise(seed: int) -> None:
    rng = np.random.default_rng(seed)
    K = _k(width=32, height=32, fx=40.0, fy=44.0)
    img, depth = _random_input(rng, K, hole_frac=0.25)
    zmin = depth.min_valid_depth()
    dt = np.array(
        [
            rng.uniform(-0.6, 0.6),
            rng.uniform(-0.6, 0.6),
            [0.0, 0.35 * zmin, -0.35 * zmin, 0.0][seed % 4],
        ]
    )
    got = forward_warp(img, depth, K, Pose(np.eye(3), dt))
    want = forward_warp_translation_oracle(img, depth, K, dt)
    assert np.array_equal(got.image.data, want.image.data)
    assert np.array_equal(got.depth.data, want.depth.data)
    assert np.array_equal(got.hole_mask, want.hole_mask)


def test_warp_with_rotation_round_trips() -> None:
    # small rotation: warp forward then back, compare where both sides exist
    rng = np.random.default_rng(3)
    K = _k(width=160, height=120, fx=130.0, fy=130.0)
    plane = Plane(
        point=np.array([0.0, 0.0, 10.0]),
        normal=np.array([0.1, -0.05, -1.0]),
        texture=sine_texture(4.0),
    )
    img, depth = SceneRenderer([plane]).render(Pose.identity(), K)
    angle = 0.01
    R = np.array(
        [
            [np.cos(angle), 0.0, np.sin(angle)],
            [0.0, 1.0, 0.0],
            [-np.sin(angle), 0.0, np.cos(angle)],
        ]
    )
    rel = Pose(R, np.array([0.05, 0.0, 0.0]))
    fwd = forward_warp(img, depth, K, rel)
    back = forward_warp(fwd.image, fwd.depth, K, rel.inverse())
    seen = ~back.hole_mask
    assert seen.mean() > 0.8
    mae = float(np.abs(back.image.data[seen] - img.data[seen]).mean())
    assert mae <= 2.0 / 255.0
    # most pixels essentially exact
    per_px = np.abs(back.image.data - img.data).max(axis=2)[seen]
    assert (per_px <= 1.0 / 255.0).mean() >= 0.95


def test_target_intrinsics_can_differ() -> None:
    rng = np.random.default_rng(9)
    K = _k(width=64, height=48)
    target = CameraIntrinsics(
        fx=60.0, fy=60.0, cx=39.5, cy=29.5, width=80, height=60
    )
    img, depth = _random_input(rng, K)
    out = forward_warp(img, depth, K, Pose.identity(), target_K=target)
    assert out.image.data.shape == (60, 80, 3)
    assert out.hole_mask.shape == (60, 80)


def test_all_behind_camera_gives_full_holes() -> None:
    rng = np.random.default_rng(1)
    K = _k()
    img, depth = _random_input(rng, K)
    dt = np.array([0.0, 0.0, -(depth.data.max() + 1.0)])
    out = forward_warp(img, depth, K, Pose(np.eye(3), dt))
    assert out.hole_mask.all()
    assert hole_fraction(out) == 1.0


def test_hole_fraction_endpoints() -> None:
    rng = np.random.default_rng(2)
    K = _k()
    img, depth = _random_input(rng, K)
    assert hole_fraction(forward_warp(img, depth, K, Pose.identity())) == 0.0


def test_hole_fraction_out_of_frame_band() -> None:
    # plane at z=10, fx=120, tx=1.0 shifts content 12 px right; the leftmost
    # 12 columns have no source and must be exactly the hole set
    K = _k(width=96, height=64, fx=120.0)
    plane = Plane(
        point=np.array([0.0, 0.0, 10.0]),
        normal=np.array([0.0, 0.0, -1.0]),
        texture=sine_texture(2.0),
    )
    img, depth = SceneRenderer([plane]).render(Pose.identity(), K)
    out = forward_warp(img, depth, K, Pose(np.eye(3), np.array([1.0, 0.0, 0.0])))
    assert hole_fraction(out) == pytest.approx(12.0 / 96.0, abs=1e-12)


def test_warp_rejects_mismatched_shapes() -> None:
    rng = np.random.default_rng(4)
    K = _k()
    img, _ = _random_input(rng, K)
    bad_depth = DepthImage(np.ones((10, 10)), np.ones((10, 10), dtype=bool))
    with pytest.raises(ValueError):
        forward_warp(img, bad_depth, K, Pose.identity())


def test_output_invariants() -> None:
    rng = np.random.default_rng(6)
    K = _k()
    img, depth = _random_input(rng, K, hole_frac=0.3)
    out = forward_warp(
        img, depth, K, Pose(np.eye(3), np.array([0.15, -0.08, 0.0]))
    )
    assert np.array_equal(out.hole_mask, ~out.depth.mask)
    assert np.all(out.depth.data[out.depth.mask] > 0.0)
    assert np.all(out.depth.data[~out.depth.mask] == 0.0)
    assert np.all(out.image.data[out.hole_mask] == 0.0)
    assert out.image.data.min() >= 0.0 and out.image.data.max() <= 1.0
