"""
픽셀 단위 분할 지표
"""
from typing import Tuple

import numpy as np

from ..core.exceptions import ShapeError


def pixel_iou_dice(pred_mask: np.ndarray, gt_mask: np.ndarray) -> Tuple[float, float]:
    """
    이진 mask의 IoU와 Dice

    두 mask가 모두 비어 있으면 (1, 1).

    Raises:
        ShapeError: shape 불일치
    """
    pred = np.asarray(pred_mask).astype(bool)
    gt = np.asarray(gt_mask).astype(bool)
    if pred.shape != gt.shape:
        raise ShapeError(f"pixel_iou_dice: shape 불일치 {pred.shape} vs {gt.shape}")
    inter = int(np.logical_and(pred, gt).sum())
    union = int(np.logical_or(pred, gt).sum())
    total = int(pred.sum() + gt.sum())
    if union == 0:
        return 1.0, 1.0
    return inter / union, 2.0 * inter / total
