"""
검출 평가 지표 테스트
"""
import itertools
from typing import Dict, List

import numpy as np
import pytest

from app.core.exceptions import DataFormatError, ShapeError
from app.core.losses import Box, iou
from app.metrics import (
    IOU_THRESHOLDS,
    Detection,
    average_precision,
    confidence_curves,
    confusion_matrix_images,
    evaluate_detections,
    match_detections,
    mdr_fdr,
    mean_ap,
    nms,
    normalize_confusion,
    pairwise_iou,
    pixel_iou_dice,
    pr_curve,
    predictions_frame,
    precision_recall,
    read_predictions,
)


def random_box(rng: np.random.Generator, space: float = 20.0) -> Box:
    x1, y1 = rng.uniform(0.0, space, 2)
    w, h = rng.uniform(2.0, space / 2.0, 2)
    return Box(x1=x1, y1=y1, x2=x1 + w, y2=y1 + h)


def brute_force_match(dets: List[Detection], gts: Dict[int, List[Box]], threshold: float) -> List[bool]:
    """
    가능한 모든 할당을 나열하고 탐욕 규칙과 모순 없는 할당 하나를 고름

    할당은 점수 내림차순 검출마다 gt 번호 또는 None. 모순이 없다는 것은 각 검출이
    앞선 검출이 가져가지 않은 gt 중 IoU 최대인 것을, 그 IoU ≥ threshold 일 때만 가져간다는 뜻.
    """
    ranked = [dets[i] for i in sorted(range(len(dets)), key=lambda i: -dets[i].score)]
    table = [[iou(d.box, g) for g in gts.get(d.image_id, [])] for d in ranked]
    candidates = [[None] + [j for j, v in enumerate(row) if v >= threshold] for row in table]

    def consistent(assignment) -> bool:
        taken = {k: set() for k in gts}
        for det, row, choice in zip(ranked, table, assignment):
            used = taken.get(det.image_id, set())
            best = max((v for j, v in enumerate(row) if j not in used), default=-1.0)
            if choice is None:
                if best >= threshold:
                    return False
                continue
            if choice in used or row[choice] < best:
                return False
            used.add(choice)
        return True

    valid = [a for a in itertools.product(*candidates) if consistent(a)]
    assert len(valid) == 1
    return [choice is not None for choice in valid[0]]


def scene(rng: np.random.Generator, n_dets: int, n_gts: int):
    """gt 두 장에 나눠 놓고, 검출 절반은 gt를 살짝 옮긴 box"""
    gts = {0: [], 1: []}
    for _ in range(n_gts):
        gts[int(rng.integers(0, 2))].append(random_box(rng, space=40.0))
    placed = [(k, b) for k, boxes in gts.items() for b in boxes]
    dets = []
    for _ in range(n_dets):
        if placed and rng.random() < 0.5:
            k, b = placed[int(rng.integers(0, len(placed)))]
            box = b.translate(*rng.uniform(-1.5, 1.5, 2))
        else:
            k, box = int(rng.integers(0, 2)), random_box(rng, space=40.0)
        dets.append(Detection(box=box, score=float(rng.random()), image_id=k))
    return dets, gts


def rectangle_ap(tp: List[bool], total_gt: int) -> float:
    """TP 순위마다 (1/G) × 그 뒤 최대 precision 을 더한 면적"""
    hits = np.cumsum(tp)
    precision = hits / np.arange(1, len(tp) + 1)
    area = 0.0
    for i, flag in enumerate(tp):
        if flag:
            area += max(precision[i:]) / total_gt
    return area


class TestMatching:
    @pytest.mark.parametrize("n_dets", range(9))
    def test_matches_brute_force_on_small_scenes(self, rng, n_dets):
        for n_gts in range(9):
            for _ in range(2):
                dets, gts = scene(rng, n_dets, n_gts)
                for threshold in (0.3, 0.5):
                    result = match_detections(dets, gts, threshold)
                    assert result.tp.tolist() == brute_force_match(dets, gts, threshold)
                    assert result.num_tp + result.num_fn == result.total_gt == n_gts

    def test_detection_on_unknown_image_is_false_positive(self):
        det = Detection(box=Box.of((0, 0, 2, 2)), score=0.9, image_id=7)
        result = match_detections([det], {0: [Box.of((0, 0, 2, 2))]})
        assert result.num_fp == 1
        assert result.num_fn == 1

    def test_pairwise_iou(self):
        ious = pairwise_iou(np.array([[0, 0, 2, 2]]), np.array([[1, 1, 4, 5], [0, 0, 2, 2]]))
        np.testing.assert_allclose(ious, [[1.0 / 15.0, 1.0]])

    def test_score_range(self):
        with pytest.raises(ValueError):
            Detection(box=Box.of((0, 0, 1, 1)), score=1.2, image_id=0)


class TestNms:
    def test_suppresses_overlaps_per_image(self):
        dets = [
            Detection(box=Box.of((0, 0, 10, 10)), score=0.9, image_id=0),
            Detection(box=Box.of((1, 0, 11, 10)), score=0.8, image_id=0),
            Detection(box=Box.of((1, 0, 11, 10)), score=0.7, image_id=1),
            Detection(box=Box.of((20, 20, 25, 25)), score=0.6, image_id=0),
        ]
        kept = nms(dets)
        assert [d.score for d in kept] == [0.9, 0.7, 0.6]

    def test_boundary_overlap_kept(self):
        # IoU가 정확히 0.5 이면 제거하지 않음
        dets = [
            Detection(box=Box.of((0, 0, 4, 3)), score=0.9, image_id=0),
            Detection(box=Box.of((0, 0, 2, 3)), score=0.5, image_id=0),
        ]
        assert len(nms(dets)) == 2


class TestAveragePrecision:
    def test_matches_rectangle_sum(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 30))
            tp = (rng.random(n) < 0.5).tolist()
            total_gt = int(sum(tp) + rng.integers(0, 5)) or 1
            assert average_precision(tp, total_gt) == pytest.approx(rectangle_ap(tp, total_gt), abs=1e-12)

    def test_degenerate_inputs(self):
        assert average_precision([True, False], 0) is None
        assert average_precision([], 3) == 0.0
        assert average_precision([True, True], 2) == 1.0

    def test_only_rank_matters(self, rng):
        for _ in range(50):
            dets, gts = scene(rng, 8, 6)
            rescaled = [d.model_copy(update={"score": d.score**3}) for d in dets]
            for threshold in (0.3, 0.5):
                base = match_detections(dets, gts, threshold)
                other = match_detections(rescaled, gts, threshold)
                assert average_precision(other.tp, other.total_gt) == average_precision(base.tp, base.total_gt)

    def test_lowest_ranked_additions(self, rng):
        for _ in range(500):
            n = int(rng.integers(0, 20))
            tp = (rng.random(n) < 0.5).tolist()
            total_gt = sum(tp) + 1 + int(rng.integers(0, 4))
            base = average_precision(tp, total_gt)
            assert average_precision(tp + [False], total_gt) <= base
            assert average_precision(tp + [True], total_gt) >= base

    def test_envelope_non_increasing(self, rng):
        curve = pr_curve((rng.random(40) < 0.4).tolist(), 20)
        assert np.all(np.diff(curve["interpolated"].to_numpy()) <= 0)
        assert np.all(curve["interpolated"] >= curve["precision"])

    def test_mean_ap(self):
        table = {t: [0.5] for t in IOU_THRESHOLDS}
        table[0.5] = [0.9, None]
        map50, map50_95 = mean_ap(table)
        assert map50 == pytest.approx(0.9)
        assert map50_95 == pytest.approx((0.9 + 9 * 0.5) / 10)
        with pytest.raises(ValueError):
            mean_ap({0.5: [None]})


class TestRates:
    def test_precision_recall_zero_denominators(self):
        assert precision_recall(0, 0, 0) == (0.0, 0.0)

    def test_mdr_complements_recall(self):
        # 재현율 72.3% / 73.2% → 미검출률 27.7% / 26.8%
        for recall, expected in ((723, 0.277), (732, 0.268)):
            mdr, _ = mdr_fdr(recall, 0, 1000 - recall)
            assert mdr == pytest.approx(expected, abs=1e-12)

    def test_fdr_complements_precision(self):
        p, _ = precision_recall(30, 10, 5)
        _, fdr = mdr_fdr(30, 10, 5)
        assert fdr == pytest.approx(1.0 - p)

    def test_confusion_matrix_layout(self):
        cm = confusion_matrix_images([1, 1, 1, 0], [1, 1, 0, 0])
        assert cm.tolist() == [[2, 0], [1, 1]]
        norm = normalize_confusion([[2, 0], [0, 0]])
        assert norm.tolist() == [[1.0, 0.0], [0.0, 0.0]]

    def test_confidence_curves_monotone_recall(self, rng):
        gts = {0: [random_box(rng) for _ in range(4)]}
        dets = [Detection(box=b, score=s, image_id=0) for b, s in zip(gts[0], (0.9, 0.6, 0.3, 0.1))]
        curves = confidence_curves(match_detections(dets, gts))
        assert curves["recall"].iloc[0] == 1.0
        assert np.all(np.diff(curves["recall"].to_numpy()) <= 0)


class TestSegmentation:
    def test_both_empty(self):
        assert pixel_iou_dice(np.zeros((4, 4)), np.zeros((4, 4))) == (1.0, 1.0)

    def test_partial_overlap(self):
        pred = np.array([[1, 1, 0, 0]])
        gt = np.array([[0, 1, 1, 0]])
        v_iou, dice = pixel_iou_dice(pred, gt)
        assert v_iou == pytest.approx(1.0 / 3.0)
        assert dice == pytest.approx(0.5)

    def test_dice_dominates_iou(self, rng):
        for _ in range(300):
            density = rng.uniform(0.05, 0.6)
            pred = rng.random((8, 8)) < density
            gt = rng.random((8, 8)) < density
            v_iou, dice = pixel_iou_dice(pred, gt)
            assert dice >= v_iou
            if 0.0 < v_iou < 1.0:
                assert dice > v_iou
            else:
                assert dice == v_iou

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            pixel_iou_dice(np.zeros((2, 2)), np.zeros((2, 3)))


class TestEvaluate:
    GTS = {0: [Box.of((2, 2, 10, 8))], 1: [Box.of((5, 5, 9, 15)), Box.of((12, 1, 20, 6))], 2: []}

    def test_perfect_predictions(self):
        dets = [Detection(box=b, score=0.9, image_id=k) for k, boxes in self.GTS.items() for b in boxes]
        report = evaluate_detections(dets, self.GTS)
        assert report.map50 == 1.0
        assert report.map50_95 == 1.0
        assert (report.precision, report.recall) == (1.0, 1.0)
        assert report.confusion_matrix == [[2, 0], [0, 1]]
        assert report.mdr == 0.0

    def test_empty_predictions(self):
        report = evaluate_detections([], self.GTS)
        assert report.recall == 0.0
        assert report.map50 == 0.0
        assert report.fn == 3
        assert report.confusion_matrix == [[0, 2], [0, 1]]

    def test_no_ground_truth(self):
        det = Detection(box=Box.of((0, 0, 3, 3)), score=0.5, image_id=0)
        report = evaluate_detections([det], {0: []})
        assert report.map50 == 0.0
        assert report.fp == 1

    def test_low_confidence_excluded_from_rates(self):
        dets = [Detection(box=b, score=0.1, image_id=k) for k, boxes in self.GTS.items() for b in boxes]
        report = evaluate_detections(dets, self.GTS, conf_threshold=0.25)
        assert report.map50 == 1.0
        assert report.recall == 0.0


class TestPredictionsCsv:
    HEADER = "image_id,x1,y1,x2,y2,score\n"

    def test_round_trip(self, tmp_path):
        dets = [Detection(box=Box.of((1, 2, 3, 4)), score=0.75, image_id=3)]
        predictions_frame(dets).to_csv(tmp_path / "p.csv", index=False)
        assert read_predictions(tmp_path / "p.csv") == dets

    def test_header_only(self, tmp_path):
        (tmp_path / "p.csv").write_text(self.HEADER)
        assert read_predictions(tmp_path / "p.csv") == []

    @pytest.mark.parametrize(
        "body,row",
        [
            ("0,1,1,2,2,0.5\n0,1,1,2,2,abc\n", 3),
            ("0,3,1,2,2,0.5\n", 2),
            ("0,1,1,2,2,1.5\n", 2),
        ],
    )
    def test_bad_rows_report_row_number(self, tmp_path, body, row):
        (tmp_path / "p.csv").write_text(self.HEADER + body)
        with pytest.raises(DataFormatError) as info:
            read_predictions(tmp_path / "p.csv")
        assert info.value.row == row

    def test_unknown_image(self, tmp_path):
        (tmp_path / "p.csv").write_text(self.HEADER + "9,1,1,2,2,0.5\n")
        with pytest.raises(DataFormatError):
            read_predictions(tmp_path / "p.csv", known_ids={0, 1})

    def test_bad_header_and_missing_file(self, tmp_path):
        (tmp_path / "p.csv").write_text("id,x1,y1,x2,y2,score\n")
        with pytest.raises(DataFormatError) as info:
            read_predictions(tmp_path / "p.csv")
        assert info.value.row == 1
        with pytest.raises(DataFormatError):
            read_predictions(tmp_path / "missing.csv")
