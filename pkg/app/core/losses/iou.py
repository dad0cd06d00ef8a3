"""
IoU 계열 손실 (스칼라 기준 구현)
단일 책임: Box 한 쌍에 대한 IoU, Focaler, PIoU, PIoUv2, FP-IoU, CIoU 계산

Focaler 사상의 입력은 IoU 값 자체이고, PIoU의 덧셈 항은 손실 1 − IoU 입니다.
"""
import math
from typing import Optional

from .box import Box, EdgeDistances
from .params import FocalerParams


def iou(a: Box, b: Box) -> float:
    iw = max(0.0, min(a.x2, b.x2) - max(a.x1, b.x1))
    ih = max(0.0, min(a.y2, b.y2) - max(a.y1, b.y1))
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def iou_loss(pred: Box, gt: Box) -> float:
    return 1.0 - iou(pred, gt)


def focaler_map(v: float, p: Optional[FocalerParams] = None) -> float:
    """[d, u] 구간 선형 재사상 (아래는 0, 위는 1)"""
    p = p or FocalerParams()
    if v < p.d:
        return 0.0
    if v > p.u:
        return 1.0
    return (v - p.d) / (p.u - p.d)


def focaler_map_simplified(v: float, u: float = 0.95) -> float:
    """d = 0 형태: v/u (v ≤ u), 1 (v > u)"""
    if not 0.0 < u <= 1.0:
        raise ValueError(f"u는 (0, 1] 범위여야 합니다: {u}")
    return v / u if v <= u else 1.0


def focaler_loss(pred: Box, gt: Box, p: Optional[FocalerParams] = None) -> float:
    return 1.0 - focaler_map(iou(pred, gt), p)


def edge_distances(pred: Box, gt: Box) -> EdgeDistances:
    return EdgeDistances(
        dw1=abs(pred.x1 - gt.x1),
        dw2=abs(pred.x2 - gt.x2),
        dh1=abs(pred.y1 - gt.y1),
        dh2=abs(pred.y2 - gt.y2),
    )


def penalty_factor(pred: Box, gt: Box) -> float:
    """정답 폭/높이로 정규화한 edge 거리 평균"""
    d = edge_distances(pred, gt)
    w, h = gt.width, gt.height
    return 0.25 * (d.dw1 / w + d.dw2 / w + d.dh1 / h + d.dh2 / h)


def piou_loss(pred: Box, gt: Box) -> float:
    p = penalty_factor(pred, gt)
    return (1.0 - iou(pred, gt)) + 1.0 - math.exp(-p * p)


def quality(p: float) -> float:
    if p < 0:
        raise ValueError(f"penalty factor는 0 이상이어야 합니다: {p}")
    return math.exp(-p)


def nonmonotonic_attention(x: float) -> float:
    """m(x) = 3x·e^(−x²)"""
    return 3.0 * x * math.exp(-x * x)


def piouv2_weight(q: float, lam: float = 1.3, strict_eq24: bool = True) -> float:
    """3·m(λq) (strict_eq24=False 이면 m(λq))"""
    weight = nonmonotonic_attention(lam * q)
    return 3.0 * weight if strict_eq24 else weight


def piouv2_loss(pred: Box, gt: Box, lam: float = 1.3, strict_eq24: bool = True) -> float:
    q = quality(penalty_factor(pred, gt))
    return piouv2_weight(q, lam, strict_eq24) * piou_loss(pred, gt)


def fp_iou_loss(
    pred: Box,
    gt: Box,
    u: float = 0.95,
    lam: float = 1.3,
    strict_eq24: bool = True,
) -> float:
    """3·m(λe^(−p))·((1 − focaler_simplified(IoU)) + 1 − e^(−p²))"""
    p = penalty_factor(pred, gt)
    inner = (1.0 - focaler_map_simplified(iou(pred, gt), u)) + 1.0 - math.exp(-p * p)
    return piouv2_weight(quality(p), lam, strict_eq24) * inner


def ciou_loss(pred: Box, gt: Box) -> float:
    """(1 − IoU) + 중심 거리²/외접 대각선² + α·v"""
    v_iou = iou(pred, gt)
    (pcx, pcy), (gcx, gcy) = pred.center, gt.center
    rho2 = (pcx - gcx) ** 2 + (pcy - gcy) ** 2
    cw = max(pred.x2, gt.x2) - min(pred.x1, gt.x1)
    ch = max(pred.y2, gt.y2) - min(pred.y1, gt.y1)
    diag2 = cw * cw + ch * ch
    v = (4.0 / math.pi**2) * (math.atan(gt.width / gt.height) - math.atan(pred.width / pred.height)) ** 2
    denom = (1.0 - v_iou) + v
    alpha = v / denom if denom > 0 else 0.0
    return (1.0 - v_iou) + rho2 / diag2 + alpha * v
