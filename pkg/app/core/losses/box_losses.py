"""
IoU 계열 손실 (배치 / 미분 가능)
단일 책임: K개 box 쌍에 대한 손실을 autodiff 연산으로 구성

pred는 K×4 텐서 (x1, y1, x2, y2), gt는 상수 K×4 배열입니다.
"""
import logging
import math
from typing import Callable, Dict, Union

import numpy as np

from ..autodiff import functional as F
from ..autodiff.tensor import Tensor, as_tensor
from ..exceptions import ShapeError
from .params import LOSS_KINDS, LossConfig

logger = logging.getLogger(__name__)

BoxArray = Union[Tensor, np.ndarray]


class _Pair:
    """예측 corner 텐서와 정답 상수 열을 묶어 둔 보조 객체"""

    def __init__(self, pred: BoxArray, gt: BoxArray):
        pred = as_tensor(pred)
        gt_arr = gt.data if isinstance(gt, Tensor) else np.asarray(gt, dtype=np.float64)
        if pred.ndim != 2 or pred.shape[1] != 4 or pred.shape != gt_arr.shape:
            raise ShapeError(f"box loss: pred {pred.shape}와 gt {gt_arr.shape}는 같은 K×4여야 합니다")
        self.pred = pred
        self.px1, self.py1, self.px2, self.py2 = (pred[:, i] for i in range(4))
        self.g = gt_arr
        self.gx1, self.gy1, self.gx2, self.gy2 = (Tensor(gt_arr[:, i]) for i in range(4))
        self.gw = Tensor(gt_arr[:, 2] - gt_arr[:, 0])
        self.gh = Tensor(gt_arr[:, 3] - gt_arr[:, 1])


def _iou(pair: _Pair) -> Tensor:
    iw = F.relu(F.sub(F.minimum(pair.px2, pair.gx2), F.maximum(pair.px1, pair.gx1)))
    ih = F.relu(F.sub(F.minimum(pair.py2, pair.gy2), F.maximum(pair.py1, pair.gy1)))
    inter = F.mul(iw, ih)
    area_p = F.mul(F.sub(pair.px2, pair.px1), F.sub(pair.py2, pair.py1))
    area_g = F.mul(pair.gw, pair.gh)
    union = F.sub(F.add(area_p, area_g), inter)
    return F.div(inter, union)


def _penalty(pair: _Pair) -> Tensor:
    terms = [
        F.div(F.abs(F.sub(pair.px1, pair.gx1)), pair.gw),
        F.div(F.abs(F.sub(pair.px2, pair.gx2)), pair.gw),
        F.div(F.abs(F.sub(pair.py1, pair.gy1)), pair.gh),
        F.div(F.abs(F.sub(pair.py2, pair.gy2)), pair.gh),
    ]
    return F.scale(F.add(F.add(terms[0], terms[1]), F.add(terms[2], terms[3])), 0.25)


def quality(p: Tensor) -> Tensor:
    """q = e^(−p)"""
    return F.exp(F.neg(p))


def nonmonotonic_attention(x: Tensor) -> Tensor:
    """m(x) = 3x·e^(−x²)"""
    return F.scale(F.mul(x, F.exp(F.neg(F.square(x)))), 3.0)


def _piouv2_weight(p: Tensor, cfg: LossConfig) -> Tensor:
    weight = nonmonotonic_attention(F.scale(quality(p), cfg.lam))
    return F.scale(weight, 3.0) if cfg.strict_eq24 else weight


def _edge_term(p: Tensor) -> Tensor:
    """1 − e^(−p²)"""
    return F.add_scalar(F.neg(F.exp(F.neg(F.square(p)))), 1.0)


def box_iou(pred: BoxArray, gt: BoxArray) -> Tensor:
    return _iou(_Pair(pred, gt))


def penalty_factor(pred: BoxArray, gt: BoxArray) -> Tensor:
    return _penalty(_Pair(pred, gt))


def iou_losses(pair: _Pair, cfg: LossConfig) -> Tensor:
    return F.add_scalar(F.neg(_iou(pair)), 1.0)


def focaler_losses(pair: _Pair, cfg: LossConfig) -> Tensor:
    return F.add_scalar(F.neg(F.ramp(_iou(pair), cfg.d, cfg.u)), 1.0)


def piou_losses(pair: _Pair, cfg: LossConfig) -> Tensor:
    return F.add(F.add_scalar(F.neg(_iou(pair)), 1.0), _edge_term(_penalty(pair)))


def piouv2_losses(pair: _Pair, cfg: LossConfig) -> Tensor:
    p = _penalty(pair)
    piou = F.add(F.add_scalar(F.neg(_iou(pair)), 1.0), _edge_term(p))
    return F.mul(_piouv2_weight(p, cfg), piou)


def fpiou_losses(pair: _Pair, cfg: LossConfig) -> Tensor:
    p = _penalty(pair)
    focal = F.add_scalar(F.neg(F.ramp(_iou(pair), 0.0, cfg.u)), 1.0)
    return F.mul(_piouv2_weight(p, cfg), F.add(focal, _edge_term(p)))


def ciou_losses(pair: _Pair, cfg: LossConfig) -> Tensor:
    v_iou = _iou(pair)
    half = 0.5
    dcx = F.scale(F.sub(F.add(pair.px1, pair.px2), F.add(pair.gx1, pair.gx2)), half)
    dcy = F.scale(F.sub(F.add(pair.py1, pair.py2), F.add(pair.gy1, pair.gy2)), half)
    rho2 = F.add(F.square(dcx), F.square(dcy))
    cw = F.sub(F.maximum(pair.px2, pair.gx2), F.minimum(pair.px1, pair.gx1))
    ch = F.sub(F.maximum(pair.py2, pair.gy2), F.minimum(pair.py1, pair.gy1))
    diag2 = F.add(F.square(cw), F.square(ch))

    pw, ph = F.sub(pair.px2, pair.px1), F.sub(pair.py2, pair.py1)
    gt_angle = np.arctan(pair.gw.data / pair.gh.data)
    dv = F.sub(Tensor(gt_angle), F.atan(F.div(pw, ph)))
    v = F.scale(F.square(dv), 4.0 / math.pi**2)

    # α는 상수로 취급 (gradient 차단)
    denom = (1.0 - v_iou.data) + v.data
    alpha = np.where(denom > 0, v.data / np.where(denom > 0, denom, 1.0), 0.0)
    loss = F.add(F.add_scalar(F.neg(v_iou), 1.0), F.div(rho2, diag2))
    return F.add(loss, F.mul(Tensor(alpha), v))


_KINDS: Dict[str, Callable[[_Pair, LossConfig], Tensor]] = {
    "iou": iou_losses,
    "ciou": ciou_losses,
    "focaler": focaler_losses,
    "piou": piou_losses,
    "piouv2": piouv2_losses,
    "fpiou": fpiou_losses,
}


def box_losses(kind: str, pred: BoxArray, gt: BoxArray, cfg: LossConfig = None) -> Tensor:
    """K개 쌍의 쌍별 손실 (길이 K 텐서)"""
    if kind not in _KINDS:
        raise KeyError(f"알 수 없는 손실 종류: {kind} (가능: {', '.join(LOSS_KINDS)})")
    return _KINDS[kind](_Pair(pred, gt), cfg or LossConfig(kind=kind))


def box_loss(
    kind: str,
    pred: BoxArray,
    gt: BoxArray,
    cfg: LossConfig = None,
    reduction: str = "mean",
) -> Tensor:
    """
    K개 box 쌍 손실의 축약

    Args:
        kind: iou|ciou|focaler|piou|piouv2|fpiou
        pred: K×4 예측 corner (requires_grad 가능)
        gt: K×4 정답 corner
        cfg: 손실 하이퍼파라미터
        reduction: mean|sum|none

    Returns:
        스칼라 (mean/sum) 또는 길이 K 텐서 (none)
    """
    losses = box_losses(kind, pred, gt, cfg)
    if reduction == "none":
        return losses
    if reduction == "sum":
        return F.sum(losses)
    if reduction == "mean":
        return F.mean(losses)
    raise ValueError(f"알 수 없는 reduction: {reduction}")
