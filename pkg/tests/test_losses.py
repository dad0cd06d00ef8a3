"""
IoU 계열 손실과 WCE 테스트
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.autodiff import Tensor, finite_diff_check, parameter
from app.core.exceptions import ShapeError
from app.core.losses import (
    LOSS_KINDS,
    Box,
    FocalerParams,
    LossConfig,
    WceConfig,
    box_loss,
    box_losses,
    ciou_loss,
    focaler_loss,
    focaler_map,
    focaler_map_simplified,
    fp_iou_loss,
    iou,
    iou_loss,
    nonmonotonic_attention,
    penalty_factor,
    piou_loss,
    piouv2_loss,
    piouv2_weight,
    quality,
    weighted_cross_entropy,
)


def random_box(rng: np.random.Generator, space: float = 50.0) -> Box:
    x1, y1 = rng.uniform(0.0, space, 2)
    w, h = rng.uniform(1.0, space / 2.0, 2)
    return Box(x1=x1, y1=y1, x2=x1 + w, y2=y1 + h)


SCALAR = {
    "iou": lambda p, g, c: iou_loss(p, g),
    "ciou": lambda p, g, c: ciou_loss(p, g),
    "focaler": lambda p, g, c: focaler_loss(p, g, c.focaler),
    "piou": lambda p, g, c: piou_loss(p, g),
    "piouv2": lambda p, g, c: piouv2_loss(p, g, c.lam, c.strict_eq24),
    "fpiou": lambda p, g, c: fp_iou_loss(p, g, c.u, c.lam, c.strict_eq24),
}


def scalar_loss(kind: str, pred: Box, gt: Box, cfg: LossConfig) -> float:
    """Box 한 쌍 기준 구현"""
    return SCALAR[kind](pred, gt, cfg)


class TestClosedForms:
    def test_piou_example(self):
        pred, gt = Box.of((0, 0, 2, 2)), Box.of((1, 1, 4, 5))
        assert iou(pred, gt) == pytest.approx(1.0 / 15.0, abs=1e-12)
        p = 0.25 * (1 / 3 + 2 / 3 + 1 / 4 + 3 / 4)
        assert penalty_factor(pred, gt) == pytest.approx(p, abs=1e-12)
        assert piou_loss(pred, gt) == pytest.approx(14.0 / 15.0 + 1.0 - math.exp(-p * p), abs=1e-12)

    def test_fp_iou_zero_for_coincident_boxes(self, rng):
        for _ in range(20):
            box = random_box(rng)
            assert fp_iou_loss(box, box) == 0.0

    def test_piou_bounded(self, rng):
        for _ in range(500):
            assert piou_loss(random_box(rng), random_box(rng)) < 2.0

    def test_attention_peak(self):
        peak = 1.0 / math.sqrt(2.0)
        assert nonmonotonic_attention(peak) == pytest.approx(3.0 / math.sqrt(2.0 * math.e), abs=1e-12)
        for x in (0.3, 0.6, 0.8, 1.2):
            assert nonmonotonic_attention(x) < nonmonotonic_attention(peak)

    def test_piouv2_weight(self):
        assert piouv2_weight(0.5, lam=1.0) == pytest.approx(4.5 * math.exp(-0.25), abs=1e-12)
        assert piouv2_weight(0.5, lam=1.0, strict_eq24=False) == pytest.approx(1.5 * math.exp(-0.25), abs=1e-12)
        lam = 1.3
        peak = 1.0 / (lam * math.sqrt(2.0))
        assert piouv2_weight(peak, lam) > piouv2_weight(peak - 0.05, lam)
        assert piouv2_weight(peak, lam) > piouv2_weight(peak + 0.05, lam)

    def test_quality_range(self, rng):
        assert quality(0.0) == 1.0
        for p in rng.uniform(0.0, 10.0, 50):
            assert 0.0 < quality(p) <= 1.0
        with pytest.raises(ValueError):
            quality(-0.1)

    def test_ciou_zero_for_coincident(self):
        box = Box.of((2, 3, 10, 7))
        assert ciou_loss(box, box) == pytest.approx(0.0, abs=1e-12)

    def test_focaler_simplified_matches_general(self, rng):
        p = FocalerParams(d=0.0, u=0.9)
        for v in rng.uniform(0.0, 1.0, 100):
            assert focaler_map(v, p) == pytest.approx(focaler_map_simplified(v, 0.9), abs=1e-12)
        assert focaler_map(0.1, FocalerParams(d=0.2, u=0.8)) == 0.0
        assert focaler_map(0.5, FocalerParams(d=0.2, u=0.8)) == pytest.approx(0.5)

    @pytest.mark.parametrize("kind", LOSS_KINDS)
    def test_translation_and_scale_invariance(self, rng, kind):
        cfg = LossConfig(kind=kind)
        for _ in range(50):
            pred, gt = random_box(rng), random_box(rng)
            base = scalar_loss(kind, pred, gt, cfg)
            dx, dy = rng.uniform(-20, 20, 2)
            moved = scalar_loss(kind, pred.translate(dx, dy), gt.translate(dx, dy), cfg)
            factor = float(rng.uniform(0.2, 5.0))
            scaled = scalar_loss(kind, pred.scale(factor), gt.scale(factor), cfg)
            assert moved == pytest.approx(base, abs=1e-10)
            assert scaled == pytest.approx(base, abs=1e-10)


class TestBatched:
    @pytest.mark.parametrize("kind", LOSS_KINDS)
    def test_matches_scalar_reference(self, rng, kind):
        cfg = LossConfig(kind=kind)
        pairs = [(random_box(rng), random_box(rng)) for _ in range(64)]
        pred = np.array([p.as_tuple() for p, _ in pairs])
        gt = np.array([g.as_tuple() for _, g in pairs])
        batched = box_losses(kind, pred, gt, cfg).data
        expected = [scalar_loss(kind, p, g, cfg) for p, g in pairs]
        np.testing.assert_allclose(batched, expected, atol=1e-12, rtol=0)

    def test_reductions(self, rng):
        pred = np.array([random_box(rng).as_tuple() for _ in range(5)])
        gt = np.array([random_box(rng).as_tuple() for _ in range(5)])
        per = box_loss("piou", pred, gt, reduction="none").data
        assert box_loss("piou", pred, gt, reduction="sum").item() == pytest.approx(per.sum())
        assert box_loss("piou", pred, gt).item() == pytest.approx(per.mean())
        with pytest.raises(ValueError):
            box_loss("piou", pred, gt, reduction="max")

    def test_unknown_kind(self):
        with pytest.raises(KeyError):
            box_loss("giou", np.ones((1, 4)), np.ones((1, 4)))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            box_loss("iou", np.ones((2, 4)), np.ones((3, 4)))

    def test_fpiou_gradient(self):
        gt = np.array([[10.0, 10.0, 30.0, 26.0]])
        x = Tensor(np.array([[12.5, 8.0, 27.0, 29.5]]))
        assert finite_diff_check(lambda p: box_loss("fpiou", p, gt), x) < 1e-6

    def test_gradient_pulls_toward_target(self):
        gt = np.array([[10.0, 10.0, 30.0, 30.0]])
        pred = parameter(np.array([[14.0, 14.0, 34.0, 34.0]]))
        box_loss("fpiou", pred, gt).backward()
        # 오른쪽/아래로 밀린 box는 왼쪽/위로 당겨짐
        assert np.all(pred.grad > 0)

    def test_loss_grows_with_horizontal_shift(self):
        gt = Box.of((10, 10, 30, 26))
        h = 1e-6
        for t in np.linspace(0.2, 15.0, 40):
            slope = (fp_iou_loss(gt.translate(t + h), gt) - fp_iou_loss(gt.translate(t - h), gt)) / (2 * h)
            assert slope > 0, t


class TestConfig:
    def test_lambda_alias(self):
        assert LossConfig.model_validate({"lambda": 2.0}).lam == 2.0
        assert LossConfig(lam=1.1).model_dump(by_alias=True)["lambda"] == 1.1

    def test_interval_validation(self):
        with pytest.raises(ValidationError):
            LossConfig(d=0.9, u=0.5)
        with pytest.raises(ValidationError):
            FocalerParams(u=0.0)

    def test_box_extent_validation(self):
        with pytest.raises(ValidationError):
            Box.of((5, 0, 5, 3))

    def test_every_kind_has_reference(self):
        assert sorted(SCALAR) == sorted(LOSS_KINDS)


class TestWeightedCrossEntropy:
    def test_uniform_logits_give_ln2(self):
        logits = Tensor(np.zeros((2, 2, 3, 3)))
        target = np.zeros((2, 3, 3), dtype=int)
        loss = weighted_cross_entropy(logits, target, WceConfig(weights=(1.0, 1.0)))
        assert loss.item() == pytest.approx(math.log(2.0), abs=1e-12)

    def test_class_weights(self):
        logits = Tensor(np.zeros((1, 2, 1, 2)))
        target = np.array([[[0, 1]]])
        loss = weighted_cross_entropy(logits, target, WceConfig(weights=(1.0, 5.0)))
        assert loss.item() == pytest.approx(3.0 * math.log(2.0), abs=1e-12)

    def test_gradient(self, rng):
        target = (rng.random((2, 3, 3)) > 0.5).astype(int)
        x = Tensor(rng.normal(size=(2, 2, 3, 3)))
        assert finite_diff_check(lambda z: weighted_cross_entropy(z, target), x) < 1e-6

    def test_shape_and_label_checks(self):
        logits = Tensor(np.zeros((2, 2, 3, 3)))
        with pytest.raises(ShapeError):
            weighted_cross_entropy(logits, np.zeros((2, 3, 4), dtype=int))
        with pytest.raises(ShapeError):
            weighted_cross_entropy(logits, np.full((2, 3, 3), 2))
        with pytest.raises(ShapeError):
            weighted_cross_entropy(logits, np.zeros((2, 3, 3), dtype=int), WceConfig(batch_size=8, strict_batch=True))
