"""
데이터 증강
단일 책임: 회전/뒤집기/스케일/잡음을 이미지·mask에 함께 적용하고 box 재계산
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import ndimage

from .sample import CrackSample, boxes_from_mask

logger = logging.getLogger(__name__)


class AugmentConfig(BaseModel):
    """증강 분포"""

    model_config = ConfigDict(frozen=True)

    rotation_deg: Tuple[float, float] = Field((-30.0, 30.0), description="회전 각도 범위 (도)")
    hflip_p: float = Field(0.5, ge=0.0, le=1.0, description="좌우 뒤집기 확률")
    vflip_p: float = Field(0.5, ge=0.0, le=1.0, description="상하 뒤집기 확률")
    scale: Tuple[float, float] = Field((0.8, 1.2), description="스케일 범위")
    noise_sigma: float = Field(0.1, ge=0.0, description="가우시안 잡음 표준편차 (평균 0)")

    @model_validator(mode="after")
    def _check_ranges(self) -> "AugmentConfig":
        if self.rotation_deg[0] > self.rotation_deg[1]:
            raise ValueError(f"rotation_deg 범위가 잘못되었습니다: {self.rotation_deg}")
        if not 0 < self.scale[0] <= self.scale[1]:
            raise ValueError(f"scale 범위는 양수여야 합니다: {self.scale}")
        return self


class AugmentDraw(BaseModel):
    """한 번의 증강 추출 결과"""

    model_config = ConfigDict(frozen=True)

    angle_deg: float = 0.0
    hflip: bool = False
    vflip: bool = False
    scale: float = Field(1.0, gt=0.0)
    noise_sigma: float = Field(0.0, ge=0.0)

    @property
    def is_identity(self) -> bool:
        return (
            self.angle_deg == 0.0
            and not self.hflip
            and not self.vflip
            and self.scale == 1.0
            and self.noise_sigma == 0.0
        )


def draw_augment(cfg: AugmentConfig, rng: np.random.Generator) -> AugmentDraw:
    return AugmentDraw(
        angle_deg=float(rng.uniform(*cfg.rotation_deg)),
        hflip=bool(rng.random() < cfg.hflip_p),
        vflip=bool(rng.random() < cfg.vflip_p),
        scale=float(rng.uniform(*cfg.scale)),
        noise_sigma=cfg.noise_sigma,
    )


def _affine(array: np.ndarray, angle_deg: float, scale: float, order: int, cval: float, mode: str) -> np.ndarray:
    """중심 기준 회전 + 스케일 (출력 좌표 → 입력 좌표 역사상)"""
    theta = math.radians(angle_deg)
    cos, sin = math.cos(theta), math.sin(theta)
    inverse = np.array([[cos, sin], [-sin, cos]]) / scale
    center = (np.array(array.shape, dtype=np.float64) - 1.0) / 2.0
    offset = center - inverse @ center
    return ndimage.affine_transform(array, inverse, offset=offset, order=order, mode=mode, cval=cval)


def apply_augment(sample: CrackSample, draw: AugmentDraw, rng: Optional[np.random.Generator] = None) -> CrackSample:
    """
    추출된 증강을 샘플에 적용

    이미지는 bilinear, mask는 nearest 보간. 잡음은 이미지에만 더한 뒤 [0, 1]로 자름.
    box는 변환된 mask에서 다시 계산합니다.
    """
    if draw.is_identity:
        return sample.copy()

    image = sample.image.astype(np.float64)
    mask = sample.mask.astype(np.float64)
    if draw.angle_deg != 0.0 or draw.scale != 1.0:
        image = _affine(image, draw.angle_deg, draw.scale, order=1, cval=0.0, mode="nearest")
        mask = _affine(mask, draw.angle_deg, draw.scale, order=0, cval=0.0, mode="constant")
    if draw.hflip:
        image, mask = image[:, ::-1], mask[:, ::-1]
    if draw.vflip:
        image, mask = image[::-1, :], mask[::-1, :]
    if draw.noise_sigma > 0:
        rng = rng if rng is not None else np.random.default_rng(sample.seed)
        image = image + rng.normal(0.0, draw.noise_sigma, image.shape)

    mask = np.ascontiguousarray(mask > 0.5)
    return CrackSample(
        image=np.ascontiguousarray(np.clip(image, 0.0, 1.0)),
        mask=mask,
        boxes=boxes_from_mask(mask),
        seed=sample.seed,
        sample_id=sample.sample_id,
    )


def augment(sample: CrackSample, cfg: AugmentConfig, rng: np.random.Generator) -> CrackSample:
    return apply_augment(sample, draw_augment(cfg, rng), rng)
