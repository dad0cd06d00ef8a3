"""
실험 설정 스키마
단일 책임: 실행 설정 파일(key=value)이 채우는 설정 트리 정의
"""
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..core.losses.params import LossConfig
from ..data.augment import AugmentConfig
from ..data.phash import DEFAULT_THRESHOLD
from ..data.pipeline import SUBSAMPLE_FRACTIONS
from ..metrics.detection import DEFAULT_CONF
from ..metrics.matching import NMS_IOU
from ..training.model import ModelConfig
from ..training.optim import SgdConfig
from ..training.race import RaceConfig
from ..training.trainer import TrainConfig


class DataConfig(BaseModel):
    """합성 데이터셋 구성"""

    model_config = ConfigDict(frozen=True)

    count: int = Field(1000, ge=1, description="생성 이미지 수 (중복 제거 전)")
    size: int = Field(64, ge=16, description="이미지 한 변 크기")
    threshold: int = Field(DEFAULT_THRESHOLD, ge=0, le=64, description="pHash 해밍 거리 임계값")
    dir: Optional[str] = Field(None, description="기존 데이터셋 디렉토리 (지정 시 생성 대신 로드)")


class RobustConfig(BaseModel):
    """강건성 실험 종류"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["subsample", "augment"] = Field("subsample", description="subsample: 학습 비율, augment: 증강 유무")
    fractions: Tuple[float, ...] = Field(SUBSAMPLE_FRACTIONS, description="학습 세트 비율 (오름차순)")


class EvalConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    conf_threshold: float = Field(DEFAULT_CONF, ge=0.0, le=1.0, description="P/R 신뢰도 임계값")
    nms_iou: float = Field(NMS_IOU, gt=0.0, le=1.0, description="탐욕 NMS IoU")


class ExperimentConfig(BaseModel):
    """
    실험 설정 루트

    설정 파일 키는 `섹션.필드` 형태이며 (예: sgd.lr0=0.01), 최상위 키는 seed 하나입니다.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(42, description="데이터 생성 마스터 seed")
    data: DataConfig = Field(default_factory=DataConfig)
    sgd: SgdConfig = Field(default_factory=SgdConfig)
    loss: LossConfig = Field(default_factory=LossConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    race: RaceConfig = Field(default_factory=RaceConfig)
    augment: AugmentConfig = Field(default_factory=AugmentConfig)
    robust: RobustConfig = Field(default_factory=RobustConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """CLI --seed: 데이터, SGD, 경주 seed를 함께 덮어씀"""
        return self.model_copy(
            update={
                "seed": seed,
                "sgd": self.sgd.model_copy(update={"seed": seed}),
                "race": self.race.model_copy(update={"seed": seed}),
            }
        )
