"""
검출 평가 지표
단일 책임: P/R/F1, all-point AP, mAP@50 / mAP@50:95, MDR/FDR, 이미지 단위 혼동 행렬, EvalReport 조립
"""
import logging
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix

from ..core.losses.box import Box
from .matching import NMS_IOU, Detection, MatchResult, match_detections, nms
from .report import EvalReport
from .segmentation import pixel_iou_dice

logger = logging.getLogger(__name__)

IOU_THRESHOLDS: Tuple[float, ...] = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))
DEFAULT_CONF = 0.25
CONFIDENCE_GRID = np.linspace(0.0, 1.0, 101)

CRACK, BACKGROUND = 1, 0


def _ratio(num: float, den: float) -> float:
    return float(num) / float(den) if den > 0 else 0.0


def precision_recall(tp: int, fp: int, fn: int) -> Tuple[float, float]:
    """P = TP/(TP+FP), R = TP/(TP+FN) (분모 0 이면 0)"""
    return _ratio(tp, tp + fp), _ratio(tp, tp + fn)


def f1_score(precision: float, recall: float) -> float:
    return _ratio(2.0 * precision * recall, precision + recall)


def mdr_fdr(tp: int, fp: int, fn: int) -> Tuple[float, float]:
    """MDR = FN/(TP+FN), FDR = FP/(TP+FP) (분모 0 이면 0)"""
    return _ratio(fn, tp + fn), _ratio(fp, tp + fp)


def pr_curve(tp: Sequence[bool], total_gt: int, scores: Optional[Sequence[float]] = None) -> pd.DataFrame:
    """
    점수 내림차순 TP 판정열로부터 이산 PR 곡선

    Returns:
        confidence, recall, precision, interpolated 열을 가진 DataFrame
        (interpolated는 뒤쪽 최대값으로 만든 단조 비증가 envelope)
    """
    flags = np.asarray(tp, dtype=bool)
    cum_tp = np.cumsum(flags)
    cum_fp = np.cumsum(~flags)
    recall = cum_tp / total_gt if total_gt > 0 else np.zeros(len(flags))
    precision = cum_tp / np.maximum(cum_tp + cum_fp, 1)
    envelope = np.maximum.accumulate(precision[::-1])[::-1] if len(flags) else precision
    conf = np.asarray(scores, dtype=np.float64) if scores is not None else np.full(len(flags), np.nan)
    return pd.DataFrame(
        {"confidence": conf, "recall": recall, "precision": precision, "interpolated": envelope}
    )


def average_precision(tp: Sequence[bool], total_gt: int) -> Optional[float]:
    """
    all-point 보간 AP = Σ ΔR · P_interp

    Args:
        tp: 점수 내림차순 검출의 TP 여부
        total_gt: 전체 gt 수

    Returns:
        AP, total_gt = 0 이면 None (해당 클래스 없음)
    """
    if total_gt <= 0:
        return None
    if len(tp) == 0:
        return 0.0
    curve = pr_curve(tp, total_gt)
    recall = curve["recall"].to_numpy()
    delta = np.diff(np.concatenate([[0.0], recall]))
    return float(np.sum(delta * curve["interpolated"].to_numpy()))


def mean_ap(ap_table: Mapping[float, Sequence[Optional[float]]]) -> Tuple[float, float]:
    """
    임계값별 클래스 AP → (mAP@50, mAP@50:95)

    Args:
        ap_table: IoU 임계값 → 클래스별 AP (None은 없는 클래스로 제외)

    Raises:
        ValueError: 어떤 임계값에도 유효한 클래스가 없을 때
    """
    per_threshold = {}
    for threshold in IOU_THRESHOLDS:
        present = [ap for ap in ap_table.get(threshold, ()) if ap is not None]
        if not present:
            raise ValueError(f"mean_ap: IoU {threshold:.2f}에서 유효한 클래스 AP가 없습니다")
        per_threshold[threshold] = float(np.mean(present))
    return per_threshold[IOU_THRESHOLDS[0]], float(np.mean(list(per_threshold.values())))


def confusion_matrix_images(pred_labels: Sequence[int], true_labels: Sequence[int]) -> np.ndarray:
    """이미지 단위 2×2 [[TP, FN], [FP, TN]] (행: 실제 crack/background)"""
    if len(pred_labels) == 0:
        return np.zeros((2, 2), dtype=np.int64)
    return confusion_matrix(
        np.asarray(true_labels, dtype=int), np.asarray(pred_labels, dtype=int), labels=[CRACK, BACKGROUND]
    ).astype(np.int64)


def normalize_confusion(matrix: np.ndarray) -> np.ndarray:
    """행 합으로 나눔 (빈 행은 0 유지)"""
    matrix = np.asarray(matrix, dtype=np.float64)
    sums = matrix.sum(axis=1, keepdims=True)
    return np.divide(matrix, sums, out=np.zeros_like(matrix), where=sums > 0)


def confidence_curves(match: MatchResult, grid: np.ndarray = CONFIDENCE_GRID) -> pd.DataFrame:
    """신뢰도 임계값별 P/R/F1 (탐욕 매칭은 점수 순이므로 prefix가 그대로 유지됨)"""
    scores = match.scores
    rows = []
    for c in grid:
        keep = scores >= c
        tp = int(match.tp[keep].sum())
        fp = int(keep.sum()) - tp
        p, r = precision_recall(tp, fp, match.total_gt - tp)
        rows.append({"confidence": float(c), "precision": p, "recall": r, "f1": f1_score(p, r)})
    return pd.DataFrame(rows)


def evaluate_detections(
    dets: Sequence[Detection],
    ground_truths: Mapping[int, Sequence[Box]],
    conf_threshold: float = DEFAULT_CONF,
    nms_iou: Optional[float] = NMS_IOU,
    pred_masks: Optional[Sequence[np.ndarray]] = None,
    gt_masks: Optional[Sequence[np.ndarray]] = None,
) -> EvalReport:
    """
    평가 전체 조립

    Args:
        dets: 검출 목록
        ground_truths: image_id → gt box 목록 (평가 대상 이미지 전체, 빈 목록 허용)
        conf_threshold: P/R/F1, 혼동 행렬에 쓰는 신뢰도 임계값
        nms_iou: 탐욕 NMS 임계값 (None이면 생략)
        pred_masks: 예측 mask 목록 (선택)
        gt_masks: 정답 mask 목록 (선택)

    Returns:
        EvalReport
    """
    if nms_iou is not None:
        dets = nms(dets, nms_iou)

    ap_table = {}
    match50 = None
    for threshold in IOU_THRESHOLDS:
        match = match_detections(dets, ground_truths, threshold)
        if match50 is None:
            match50 = match
        ap_table[threshold] = [average_precision(match.tp, match.total_gt)]
    try:
        map50, map50_95 = mean_ap(ap_table)
    except ValueError:
        logger.warning("⚠️ gt box가 없어 mAP를 0으로 보고합니다")
        map50, map50_95 = 0.0, 0.0

    keep = match50.scores >= conf_threshold
    tp = int(match50.tp[keep].sum())
    fp = int(keep.sum()) - tp
    fn = match50.total_gt - tp
    precision, recall = precision_recall(tp, fp, fn)
    mdr, fdr = mdr_fdr(tp, fp, fn)

    image_ids = sorted(ground_truths)
    flagged = {d.image_id for d in dets if d.score >= conf_threshold}
    pred_labels = [CRACK if i in flagged else BACKGROUND for i in image_ids]
    true_labels = [CRACK if len(ground_truths[i]) > 0 else BACKGROUND for i in image_ids]
    cm = confusion_matrix_images(pred_labels, true_labels)

    pixel_iou = dice = None
    if pred_masks is not None and gt_masks is not None and len(gt_masks) > 0:
        pixel_iou, dice = pixel_iou_dice(np.stack(pred_masks), np.stack(gt_masks))

    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        map50=map50,
        map50_95=map50_95,
        ap_table={f"{t:.2f}": aps[0] for t, aps in ap_table.items()},
        confusion_matrix=cm.tolist(),
        confusion_normalized=normalize_confusion(cm).tolist(),
        pixel_iou=pixel_iou,
        dice=dice,
        mdr=mdr,
        fdr=fdr,
        tp=tp,
        fp=fp,
        fn=fn,
        image_count=len(image_ids),
        conf_threshold=conf_threshold,
    )
