"""
검출 결과 매칭
단일 책임: 점수 순 탐욕 매칭 (TP/FP 판정)과 고정 IoU 0.5 탐욕 NMS
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.losses.box import Box

logger = logging.getLogger(__name__)

NMS_IOU = 0.5


class Detection(BaseModel):
    """한 이미지 위의 예측 box와 신뢰도"""

    model_config = ConfigDict(frozen=True)

    box: Box
    score: float = Field(..., ge=0.0, le=1.0, description="신뢰도")
    image_id: int = Field(..., description="이미지 식별자 (sample_id)")


def pairwise_iou(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """A×4, B×4 corner 배열 → A×B IoU 행렬"""
    a = np.asarray(a, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 4)
    iw = np.clip(np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0]), 0.0, None)
    ih = np.clip(np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1]), 0.0, None)
    inter = iw * ih
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    return inter / (area_a[:, None] + area_b[None, :] - inter)


def _boxes(items: Sequence[Box]) -> np.ndarray:
    return np.array([b.as_tuple() for b in items], dtype=np.float64).reshape(-1, 4)


def sort_detections(dets: Sequence[Detection]) -> List[Detection]:
    """점수 내림차순 (동점은 입력 순서 유지)"""
    return sorted(dets, key=lambda d: -d.score)


@dataclass
class MatchResult:
    """
    매칭 결과

    detections는 점수 내림차순으로 정렬된 목록이고 tp[i]는 그 i번째의 판정입니다.
    """

    detections: List[Detection]
    tp: np.ndarray
    matched: Dict[int, List[bool]] = field(default_factory=dict)

    @property
    def scores(self) -> np.ndarray:
        return np.array([d.score for d in self.detections], dtype=np.float64)

    @property
    def num_tp(self) -> int:
        return int(self.tp.sum())

    @property
    def num_fp(self) -> int:
        return int(len(self.tp) - self.tp.sum())

    @property
    def num_fn(self) -> int:
        return sum(len(flags) - sum(flags) for flags in self.matched.values())

    @property
    def total_gt(self) -> int:
        return sum(len(flags) for flags in self.matched.values())


def match_detections(
    dets: Sequence[Detection],
    ground_truths: Mapping[int, Sequence[Box]],
    iou_threshold: float = 0.5,
) -> MatchResult:
    """
    점수 순 탐욕 매칭

    각 검출은 같은 이미지에서 아직 매칭되지 않은 gt 중 IoU가 가장 큰 것과
    IoU ≥ threshold 이면 매칭(TP), 아니면 FP. 남은 gt는 FN.

    Args:
        dets: 검출 목록 (내부에서 안정 정렬)
        ground_truths: image_id → gt box 목록
        iou_threshold: 매칭 임계값

    Returns:
        MatchResult
    """
    ordered = sort_detections(dets)
    gt_arrays = {image_id: _boxes(boxes) for image_id, boxes in ground_truths.items()}
    used = {image_id: np.zeros(len(arr), dtype=bool) for image_id, arr in gt_arrays.items()}
    tp = np.zeros(len(ordered), dtype=bool)

    for i, det in enumerate(ordered):
        gts = gt_arrays.get(det.image_id)
        if gts is None or len(gts) == 0:
            continue
        ious = pairwise_iou(np.array([det.box.as_tuple()]), gts)[0]
        ious[used[det.image_id]] = -1.0
        best = int(np.argmax(ious))
        if ious[best] >= iou_threshold:
            tp[i] = True
            used[det.image_id][best] = True

    matched = {image_id: flags.tolist() for image_id, flags in used.items()}
    return MatchResult(detections=ordered, tp=tp, matched=matched)


def nms(dets: Sequence[Detection], iou_threshold: float = NMS_IOU) -> List[Detection]:
    """이미지별 탐욕 NMS: 높은 점수부터 남기고 IoU > threshold 인 나머지는 제거"""
    by_image: Dict[int, List[Detection]] = defaultdict(list)
    for det in sort_detections(dets):
        by_image[det.image_id].append(det)

    kept: List[Detection] = []
    for image_id in sorted(by_image):
        group = by_image[image_id]
        boxes = _boxes([d.box for d in group])
        alive = np.ones(len(group), dtype=bool)
        for i in range(len(group)):
            if not alive[i]:
                continue
            kept.append(group[i])
            if i + 1 < len(group):
                overlap = pairwise_iou(boxes[i : i + 1], boxes[i + 1 :])[0]
                alive[i + 1 :] &= overlap <= iou_threshold
    return sort_detections(kept)
