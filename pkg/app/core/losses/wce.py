"""
클래스 가중 cross-entropy
단일 책임: 2-클래스 픽셀/셀 분류 손실
"""
import logging
from typing import Optional

import numpy as np

from ..autodiff import functional as F
from ..autodiff.tensor import Tensor
from ..exceptions import ShapeError
from .params import WceConfig

logger = logging.getLogger(__name__)


def weighted_cross_entropy(
    logits: Tensor,
    target: np.ndarray,
    cfg: Optional[WceConfig] = None,
) -> Tensor:
    """
    −(1/(N·H·W)) Σ w_c · log softmax_c(logits) · onehot_c(target)

    Args:
        logits: N × 2 × H × W
        target: N × H × W 클래스 맵 (0 배경, 1 균열)
        cfg: 클래스 가중치 / 배치 설정

    Returns:
        스칼라 손실
    """
    cfg = cfg or WceConfig()
    target = np.asarray(target)
    if logits.ndim != 4 or logits.shape[1] != len(cfg.weights):
        raise ShapeError(f"WCE: logits는 N×{len(cfg.weights)}×H×W여야 합니다 ({logits.shape})")
    n, _, h, w = logits.shape
    if target.shape != (n, h, w):
        raise ShapeError(
            f"WCE: target {target.shape}가 logits {logits.shape}와 맞지 않습니다",
            details={"logits": list(logits.shape), "target": list(target.shape)},
        )
    if not np.isin(target, (0, 1)).all():
        raise ShapeError("WCE: target 클래스는 0 또는 1이어야 합니다")
    if cfg.strict_batch and n != cfg.batch_size:
        raise ShapeError(f"WCE: 배치 크기 {n} ≠ 설정 N={cfg.batch_size}")

    labels = target.astype(np.int64)
    weight_map = np.zeros(logits.shape)
    for c, w_c in enumerate(cfg.weights):
        weight_map[:, c][labels == c] = w_c

    log_probs = F.log_softmax(logits, axis=1)
    total = F.sum(F.mul(log_probs, Tensor(weight_map)))
    return F.scale(total, -1.0 / (n * h * w))
