"""
검출/분할 평가 지표
"""
from .detection import (
    IOU_THRESHOLDS,
    average_precision,
    confidence_curves,
    confusion_matrix_images,
    evaluate_detections,
    f1_score,
    mdr_fdr,
    mean_ap,
    normalize_confusion,
    pr_curve,
    precision_recall,
)
from .matching import Detection, MatchResult, match_detections, nms, pairwise_iou
from .predictions import PREDICTION_COLUMNS, predictions_frame, read_predictions
from .report import EvalReport
from .segmentation import pixel_iou_dice

__all__ = [
    "Detection",
    "EvalReport",
    "IOU_THRESHOLDS",
    "PREDICTION_COLUMNS",
    "MatchResult",
    "average_precision",
    "confidence_curves",
    "confusion_matrix_images",
    "evaluate_detections",
    "f1_score",
    "match_detections",
    "mdr_fdr",
    "mean_ap",
    "nms",
    "normalize_confusion",
    "pairwise_iou",
    "pixel_iou_dice",
    "pr_curve",
    "precision_recall",
    "predictions_frame",
    "read_predictions",
]
