"""
균열 샘플 타입
단일 책임: CrackSample / Difficulty 정의와 mask↔box 일관성 도구
"""
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import ndimage

from ..core.losses.box import Box

logger = logging.getLogger(__name__)

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


class Difficulty(BaseModel):
    """절차적 균열 생성 난이도"""

    model_config = ConfigDict(frozen=True)

    crack_count: Tuple[int, int] = Field((1, 2), description="균열 개수 범위 (양 끝 포함)")
    walk_length: Tuple[int, int] = Field((20, 48), description="random walk 길이 범위 (px)")
    thickness: Tuple[int, int] = Field((1, 3), description="선 두께 범위 (px)")
    texture_amplitude: float = Field(0.1, ge=0.0, description="배경 텍스처 진폭")
    contrast: float = Field(0.45, gt=0.0, le=1.0, description="균열 명암 대비")

    @model_validator(mode="after")
    def _check_ranges(self) -> "Difficulty":
        for name in ("crack_count", "walk_length", "thickness"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi < lo:
                raise ValueError(f"{name} 범위가 잘못되었습니다: ({lo}, {hi})")
        if self.thickness[0] < 1:
            raise ValueError("두께는 1 이상이어야 합니다")
        return self


@dataclass
class CrackSample:
    """
    흑백 이미지 + 이진 mask + 연결 성분 box

    image는 [0, 1] 실수, mask는 bool, box 좌표는 픽셀 경계 기준입니다.
    """

    image: np.ndarray
    mask: np.ndarray
    boxes: List[Box] = field(default_factory=list)
    seed: int = 0
    sample_id: int = 0

    @property
    def size(self) -> Tuple[int, int]:
        return tuple(self.image.shape)  # type: ignore[return-value]

    @property
    def has_crack(self) -> bool:
        return bool(self.mask.any())

    def box_array(self) -> np.ndarray:
        if not self.boxes:
            return np.zeros((0, 4))
        return np.array([b.as_tuple() for b in self.boxes], dtype=np.float64)

    def copy(self) -> "CrackSample":
        return CrackSample(self.image.copy(), self.mask.copy(), list(self.boxes), self.seed, self.sample_id)


def _overlap(a: Tuple[int, int, int, int], b: Tuple[int, int, int, int]) -> bool:
    return min(a[2], b[2]) > max(a[0], b[0]) and min(a[3], b[3]) > max(a[1], b[1])


def boxes_from_mask(mask: np.ndarray) -> List[Box]:
    """
    8-연결 성분의 tight box 계산, 겹치는 box는 하나로 병합

    병합 후 box 내부는 서로 겹치지 않으므로 양성 픽셀은 정확히 하나의 box에 속합니다.
    순서는 (y1, x1) 오름차순입니다.
    """
    labels, count = ndimage.label(np.asarray(mask, dtype=bool), structure=EIGHT_CONNECTED)
    rects = []
    for sl in ndimage.find_objects(labels):
        if sl is None:
            continue
        rows, cols = sl
        rects.append((cols.start, rows.start, cols.stop, rows.stop))

    merged = True
    while merged:
        merged = False
        for i in range(len(rects)):
            for j in range(i + 1, len(rects)):
                if _overlap(rects[i], rects[j]):
                    a, b = rects[i], rects[j]
                    rects[i] = (min(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), max(a[3], b[3]))
                    del rects[j]
                    merged = True
                    break
            if merged:
                break

    rects.sort(key=lambda r: (r[1], r[0]))
    return [Box.of(r) for r in rects]


def check_sample(sample: CrackSample) -> List[str]:
    """
    mask↔box 불변식 위반 목록 (비어 있으면 정상)

    - 모든 양성 픽셀은 정확히 하나의 box 안에 있음
    - 모든 box는 양성 픽셀을 하나 이상 포함
    """
    violations: List[str] = []
    mask = np.asarray(sample.mask, dtype=bool)
    if sample.image.shape != mask.shape:
        violations.append(f"image {sample.image.shape}와 mask {mask.shape} shape 불일치")
        return violations

    cover = np.zeros(mask.shape, dtype=np.int64)
    for k, box in enumerate(sample.boxes):
        x1, y1, x2, y2 = (int(round(v)) for v in box.as_tuple())
        cover[y1:y2, x1:x2] += 1
        if not mask[y1:y2, x1:x2].any():
            violations.append(f"box {k} {box.as_tuple()}에 양성 픽셀이 없습니다")
    bad = mask & (cover != 1)
    if bad.any():
        ys, xs = np.nonzero(bad)
        violations.append(
            f"양성 픽셀 {int(bad.sum())}개가 box 하나에 속하지 않습니다 (첫 위치 y={ys[0]}, x={xs[0]})"
        )
    return violations
