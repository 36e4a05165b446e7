from __future__ import annotations

import warnings

import numpy as np
import pytest

from pseudoview.image import ColorImage, DepthImage
from pseudoview.losses import (
    ConfidenceMap,
    LossBreakdown,
    base_loss,
    confidence_loss,
    confidence_weights,
    total_loss,
    with_confidence,
)
from pseudoview.ssim import ssim_map, ssim_mean


def _img(rng, h=32, w=48):
    return ColorImage(rng.random((h, w, 3)))


def test_weights_identical_pair_exactly_one() -> None:
    rng = np.random.default_rng(0)
    a = _img(rng)
    W = confidence_weights(a, a)
    assert np.all(W.data == 1.0)


def test_weights_opposite_constants_lambda1_one() -> None:
    h, w = 24, 24
    zeros = ColorImage(np.zeros((h, w, 3)))
    ones = ColorImage(np.ones((h, w, 3)))
    W = confidence_weights(zeros, ones, lambda1=1.0)
    assert np.all(W.data == 0.0)  # 1 - L2 with L2 = 1 everywhere


def test_weights_hand_composition() -> None:
    rng = np.random.default_rng(1)
    a, b = _img(rng), _img(rng)
    W = confidence_weights(a, b, lambda1=0.5)
    l2 = ((a.data - b.data) ** 2).mean(axis=2)
    want = np.clip(0.5 * (1.0 - l2) + 0.5 * ssim_map(a, b), 0.0, 1.0)
    assert np.array_equal(W.data, want)


def test_weights_clamped_to_unit_interval() -> None:
    rng = np.random.default_rng(2)
    for lam1 in (0.0, 0.3, 1.0):
        W = confidence_weights(_img(rng), _img(rng), lambda1=lam1)
        assert W.data.min() >= 0.0 and W.data.max() <= 1.0


def test_weights_validate_lambda1() -> None:
    rng = np.random.default_rng(3)
    with pytest.raises(ValueError):
        confidence_weights(_img(rng), _img(rng), lambda1=1.5)


def test_confidence_loss_identical_is_zero() -> None:
    rng = np.random.default_rng(4)
    a = _img(rng)
    assert confidence_loss(a, a, confidence_weights(a, a)) == 0.0


def test_confidence_loss_zero_weights() -> None:
    rng = np.random.default_rng(5)
    a, b = _img(rng), _img(rng)
    W = ConfidenceMap(np.zeros((a.height, a.width)))
    assert confidence_loss(a, b, W) == 0.0


def test_confidence_loss_unit_weights_is_plain_l1() -> None:
    rng = np.random.default_rng(6)
    a, b = _img(rng), _img(rng)
    W = ConfidenceMap(np.ones((a.height, a.width)))
    want = float(np.abs(a.data - b.data).mean(axis=2).mean())
    assert confidence_loss(a, b, W) == want


def test_confidence_map_validation() -> None:
    with pytest.raises(ValueError):
        ConfidenceMap(np.full((4, 4), 1.5))
    with pytest.raises(ValueError):
        ConfidenceMap(np.full((4, 4), -0.1))


def test_base_loss_identical_inputs_zero() -> None:
    rng = np.random.default_rng(7)
    a = _img(rng)
    d = DepthImage(np.full((32, 48), 5.0), np.ones((32, 48), bool))
    out = base_loss(a, a, d, d)
    assert out.l1 == 0.0
    assert out.ssim_term == 0.0
    assert out.depth_l1 == 0.0
    assert out.l_ori == 0.0
    assert out.total == 0.0


def test_base_loss_lambda_one_drops_ssim() -> None:
    rng = np.random.default_rng(8)
    a, b = _img(rng), _img(rng)
    da = DepthImage(rng.uniform(1, 9, (32, 48)), np.ones((32, 48), bool))
    db = DepthImage(rng.uniform(1, 9, (32, 48)), np.ones((32, 48), bool))
    out = base_loss(a, b, da, db, lam=1.0)
    want = float(np.abs(a.data - b.data).mean()) + float(
        np.abs(da.data - db.data).mean()
    )
    assert out.l_ori == pytest.approx(want, abs=1e-15)


def test_base_loss_hand_composed_breakdown() -> None:
    rng = np.random.default_rng(9)
    a, b = _img(rng), _img(rng)
    da = DepthImage(rng.uniform(1, 9, (32, 48)), np.ones((32, 48), bool))
    db = DepthImage(rng.uniform(1, 9, (32, 48)), np.ones((32, 48), bool))
    out = base_loss(a, b, da, db, lam=0.8)
    l1 = float(np.abs(a.data - b.data).mean())
    ssim_term = (1.0 - ssim_mean(a, b)) / 2.0
    dl1 = float(np.abs(da.data - db.data).mean())
    assert out.l1 == l1
    assert out.ssim_term == ssim_term
    assert out.depth_l1 == dl1
    assert out.l_ori == 0.8 * l1 + 0.2 * ssim_term + dl1


def test_base_loss_depth_on_mutual_validity_only() -> None:
    rng = np.random.default_rng(10)
    a, b = _img(rng), _img(rng)
    H, W = 32, 48
    ma = rng.random((H, W)) > 0.4
    mb = rng.random((H, W)) > 0.4
    ma.flat[0] = mb.flat[0] = True
    da = DepthImage(np.where(ma, 5.0, 0.0), ma)
    db = DepthImage(np.where(mb, 7.0, 0.0), mb)
    out = base_loss(a, b, da, db)
    assert out.depth_l1 == pytest.approx(2.0, abs=1e-12)


def test_base_loss_no_mutual_depth_warns() -> None:
    rng = np.random.default_rng(11)
    a, b = _img(rng), _img(rng)
    H, W = 32, 48
    ma = np.zeros((H, W), dtype=bool)
    mb = np.zeros((H, W), dtype=bool)
    ma[0, 0] = True
    mb[5, 5] = True
    da = DepthImage(np.where(ma, 3.0, 0.0), ma)
    db = DepthImage(np.where(mb, 4.0, 0.0), mb)
    with pytest.warns(UserWarning):
        out = base_loss(a, b, da, db)
    assert out.depth_l1 == 0.0


def test_base_loss_optional_depths() -> None:
    rng = np.random.default_rng(12)
    a, b = _img(rng), _img(rng)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        out = base_loss(a, b)
    assert out.depth_l1 == 0.0
    with pytest.raises(ValueError):
        base_loss(a, b, DepthImage(np.ones((32, 48)), np.ones((32, 48), bool)))


def test_with_confidence_totals() -> None:
    rng = np.random.default_rng(13)
    base = base_loss(_img(rng), _img(rng))
    out = with_confidence(base, 0.02)
    assert out.l_con == 0.02
    assert out.total == out.l_ori + 0.02
    assert total_loss(base, 0.02) == out.total


def test_total_hand_values() -> None:
    zero = LossBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    assert total_loss(zero, 0.0) == 0.0
    some = LossBreakdown(0.1, 0.05, 0.04, 0.15, 0.0, 0.15)
    assert total_loss(some, 0.02) == pytest.approx(0.17, abs=1e-15)


def test_breakdown_rejects_inconsistent_total() -> None:
    with pytest.raises(ValueError):
        LossBreakdown(0.1, 0.0, 0.0, 0.1, 0.0, 0.2)
