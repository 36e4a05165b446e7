from __future__ import annotations

import numpy as np
import pytest

from pseudoview._oracles import render_planes_oracle
from pseudoview.camera import CameraIntrinsics, Pose
from pseudoview.errors import RenderError
from pseudoview.scene import (
    Plane,
    SceneRenderer,
    checkerboard_texture,
    load_scene,
    scene_from_dict,
    sine_texture,
)
from pseudoview.serialization import save_json


def _k(width=64, height=48, fx=80.0):
    return CameraIntrinsics(
        fx=fx, fy=fx, cx=(width - 1) / 2.0, cy=(height - 1) / 2.0,
        width=width, height=height,
    )


def _fronto(z: float, texture, extent=None) -> Plane:
    return Plane(
        point=np.array([0.0, 0.0, z]),
        normal=np.array([0.0, 0.0, -1.0]),
        texture=texture,
        extent=extent,
    )


def test_fronto_plane_depth_is_constant() -> None:
    r = SceneRenderer([_fronto(10.0, checkerboard_texture(1.0, (1, 0, 0), (0, 0, 1)))])
    _img, depth = r.render(Pose.identity(), _k())
    assert np.all(depth.data == 10.0)
    assert depth.mask.all()


def test_nearest_plane_wins() -> None:
    far = _fronto(12.0, checkerboard_texture(1.0, (1, 0, 0), (1, 0, 0)))
    near = _fronto(
        7.0, checkerboard_texture(1.0, (0, 1, 0), (0, 1, 0)), extent=(0.5, 0.5)
    )
    _img, depth = SceneRenderer([far, near]).render(Pose.identity(), _k())
    K = _k()
    # principal pixel looks straight at the near plane
    cv, cu = int(K.cy), int(K.cx)
    assert depth.data[cv, cu] == 7.0
    assert depth.data[0, 0] == 12.0


@pytest.mark.parametrize("seed", range(4))
def test_matches_ray_oracle(seed: int) -> None:
    rng = np.random.default_rng(seed)
    planes = [
        _fronto(12.0, sine_texture(2.0)),
        Plane(
            point=np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), 6.0]),
            normal=np.array([rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), -1.0]),
            texture=sine_texture(1.3),
            extent=(1.0, 0.8),
        ),
    ]
    K = _k(width=40, height=30, fx=50.0)
    pose = Pose(np.eye(3), np.array([rng.uniform(-0.3, 0.3), 0.0, 0.0]))
    img, depth = SceneRenderer(planes).render(pose, K)
    o_color, o_depth, o_valid = render_planes_oracle(planes, pose, K)
    assert np.array_equal(depth.mask, o_valid)
    assert np.abs(depth.data - o_depth).max() <= 1e-9
    assert np.abs(img.data - o_color).max() <= 1e-9


def test_render_is_deterministic() -> None:
    r = SceneRenderer([_fronto(9.0, sine_texture(1.7))])
    a_img, a_dep = r.render(Pose.identity(), _k())
    b_img, b_dep = r.render(Pose.identity(), _k())
    assert np.array_equal(a_img.data, b_img.data)
    assert np.array_equal(a_dep.data, b_dep.data)


def test_no_visible_plane_raises() -> None:
    r = SceneRenderer([_fronto(5.0, sine_texture(1.0), extent=(0.1, 0.1))])
    # camera center c = -R^T t = (0,0,10): past the plane, which ends up behind
    behind = Pose(np.eye(3), np.array([0.0, 0.0, -10.0]))
    with pytest.raises(RenderError):
        r.render(behind, _k())


def test_plane_validation() -> None:
    with pytest.raises(ValueError):
        Plane(
            point=np.zeros(3), normal=np.zeros(3), texture=sine_texture(1.0)
        )
    with pytest.raises(ValueError):
        _fronto(5.0, sine_texture(1.0), extent=(0.0, 1.0))


def test_update_records_feedback() -> None:
    r = SceneRenderer([_fronto(5.0, sine_texture(1.0))])
    r.update({"kind": "base", "loss": 0.1})
    r.update({"kind": "confidence", "loss": 0.2})
    assert len(r.feedback_log) == 2
    assert r.feedback_log[0]["kind"] == "base"


def test_checkerboard_texture_values() -> None:
    tex = checkerboard_texture(1.0, (1.0, 0.0, 0.0), (0.0, 0.0, 1.0))
    a = np.array([0.25, 1.25, 0.25])
    b = np.array([0.25, 0.25, 1.25])
    out = tex(a, b)
    assert np.array_equal(out[0], [1.0, 0.0, 0.0])  # (0,0) cell
    assert np.array_equal(out[1], [0.0, 0.0, 1.0])  # one cell over in a
    assert np.array_equal(out[2], [0.0, 0.0, 1.0])  # one cell over in b


def test_sine_texture_smooth_and_in_range() -> None:
    tex = sine_texture(2.0)
    a = np.linspace(-5, 5, 200)
    out = tex(a, a * 0.5)
    assert out.shape == (200, 3)
    assert out.min() >= 0.0 and out.max() <= 1.0
    assert np.abs(np.diff(out[:, 0])).max() < 0.1


def test_scene_from_dict_and_file(tmp_path) -> None:
    doc = {
        "planes": [
            {
                "point": [0.0, 0.0, 10.0],
                "normal": [0.0, 0.0, -1.0],
                "texture": {"kind": "sine", "period": 2.0},
            },
            {
                "point": [0.5, 0.0, 6.0],
                "normal": [0.0, 0.0, -1.0],
                "texture": {
                    "kind": "checkerboard",
                    "period": 0.5,
                    "color_a": [1, 0, 0],
                    "color_b": [0, 1, 0],
                },
                "extent": [0.8, 0.6],
            },
        ]
    }
    r = scene_from_dict(doc)
    assert len(r.planes) == 2
    path = tmp_path / "scene.json"
    save_json(str(path), doc)
    r2 = load_scene(str(path))
    a, _ = r.render(Pose.identity(), _k())
    b, _ = r2.render(Pose.identity(), _k())
    assert np.array_equal(a.data, b.data)


def test_unknown_texture_kind_rejected() -> None:
    with pytest.raises(ValueError):
        scene_from_dict(
            {
                "planes": [
                    {
                        "point": [0, 0, 5],
                        "normal": [0, 0, -1],
                        "texture": {"kind": "perlin"},
                    }
                ]
            }
        )
