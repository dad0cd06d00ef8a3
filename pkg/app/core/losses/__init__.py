"""
IoU 계열 box 회귀 손실과 클래스 가중 cross-entropy
"""
from .box import Box, EdgeDistances
from .box_losses import box_loss, box_losses
from .iou import (
    ciou_loss,
    edge_distances,
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
)
from .params import LOSS_KINDS, FocalerParams, LossConfig, WceConfig
from .wce import weighted_cross_entropy

__all__ = [
    "Box",
    "EdgeDistances",
    "FocalerParams",
    "LOSS_KINDS",
    "LossConfig",
    "WceConfig",
    "box_loss",
    "box_losses",
    "ciou_loss",
    "edge_distances",
    "focaler_loss",
    "focaler_map",
    "focaler_map_simplified",
    "fp_iou_loss",
    "iou",
    "iou_loss",
    "nonmonotonic_attention",
    "penalty_factor",
    "piou_loss",
    "piouv2_loss",
    "piouv2_weight",
    "quality",
    "weighted_cross_entropy",
]
