"""
손실 함수 파라미터 모델
단일 책임: Focaler / WCE / 손실 선택 설정 검증
"""
from typing import Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

LossKind = Literal["iou", "ciou", "focaler", "piou", "piouv2", "fpiou"]
LOSS_KINDS: Tuple[str, ...] = ("iou", "ciou", "focaler", "piou", "piouv2", "fpiou")


class FocalerParams(BaseModel):
    """IoU 구간 재사상 [d, u]"""

    model_config = ConfigDict(frozen=True)

    d: float = Field(0.0, ge=0.0, lt=1.0, description="구간 하한")
    u: float = Field(0.95, gt=0.0, le=1.0, description="구간 상한")

    @model_validator(mode="after")
    def _check_interval(self) -> "FocalerParams":
        if not self.d < self.u:
            raise ValueError(f"d({self.d}) < u({self.u}) 이어야 합니다")
        return self


class WceConfig(BaseModel):
    """클래스 가중 cross-entropy 설정 (배경, 균열)"""

    model_config = ConfigDict(frozen=True)

    weights: Tuple[float, float] = Field((1.0, 5.0), description="클래스별 가중치 (배경, 균열)")
    batch_size: int = Field(8, ge=1, description="명목 mini-batch 크기 N")
    strict_batch: bool = Field(False, description="logits 배치 크기와 N이 다르면 거부")

    @model_validator(mode="after")
    def _check_weights(self) -> "WceConfig":
        if any(w <= 0 for w in self.weights):
            raise ValueError(f"클래스 가중치는 양수여야 합니다: {self.weights}")
        return self


class LossConfig(BaseModel):
    """
    box 회귀 손실 선택

    `lambda`는 파이썬 예약어라 필드 이름은 lam, 설정 파일 키는 loss.lambda 입니다.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: LossKind = Field("fpiou", description="손실 종류")
    u: float = Field(0.95, gt=0.0, le=1.0, description="Focaler 상한")
    d: float = Field(0.0, ge=0.0, lt=1.0, description="일반 Focaler 하한 (kind=focaler)")
    lam: float = Field(1.3, gt=0.0, alias="lambda", description="PIoUv2 λ")
    strict_eq24: bool = Field(True, description="바깥 계수 3을 문자 그대로 유지")

    @model_validator(mode="after")
    def _check_interval(self) -> "LossConfig":
        if not self.d < self.u:
            raise ValueError(f"d({self.d}) < u({self.u}) 이어야 합니다")
        return self

    @property
    def focaler(self) -> FocalerParams:
        return FocalerParams(d=self.d, u=self.u)
