"""
소형 모델 학습 루프
단일 책임: mini-batch SGD 학습, epoch별 held-out 평가, 발산 감지
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Literal, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from ..core.autodiff.tensor import zero_grad
from ..core.exceptions import DivergenceError, NumericalError
from ..core.losses.params import LossConfig
from ..data.augment import AugmentConfig, augment
from ..data.pipeline import CrackDataset, subsample
from ..data.sample import CrackSample
from ..metrics.detection import DEFAULT_CONF, evaluate_detections
from ..metrics.report import EvalReport
from .model import ModelConfig, TinyDetector
from .optim import SgdConfig, SgdState, clip_grad_norm, sgd_step

logger = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    """학습/평가 절차 설정"""

    model_config = ConfigDict(frozen=True)

    augment: bool = Field(False, description="학습 배치에 증강 적용")
    fraction: float = Field(1.0, gt=0.0, le=1.0, description="학습 세트 사용 비율")
    eval_split: Literal["train", "val", "test"] = Field("test", description="epoch별 평가 분할")
    top_k: int = Field(20, ge=1, description="이미지당 최대 검출 수")
    conf_threshold: float = Field(DEFAULT_CONF, ge=0.0, le=1.0, description="P/R 계산 신뢰도")


@dataclass
class TrainResult:
    """epoch별 평가 리포트와 학습 곡선"""

    reports: List[EvalReport]
    epochs: pd.DataFrame
    steps: pd.DataFrame
    model: TinyDetector
    train_size: int = 0

    @property
    def final(self) -> EvalReport:
        return self.reports[-1]


def evaluate_model(
    model: TinyDetector,
    samples: Sequence[CrackSample],
    epoch: int,
    top_k: int = 20,
    conf_threshold: float = DEFAULT_CONF,
) -> EvalReport:
    dets, masks = model.predict(samples, epoch=epoch, top_k=top_k)
    return evaluate_detections(
        dets,
        {s.sample_id: s.boxes for s in samples},
        conf_threshold=conf_threshold,
        pred_masks=masks,
        gt_masks=[s.mask for s in samples],
    )


def _check_finite(value: float, step: int, what: str) -> None:
    if not np.isfinite(value):
        raise DivergenceError(step, f"학습 {step}번째 step에서 {what}이(가) 비유한 값입니다")


def train_toy(
    dataset: CrackDataset,
    model_cfg: Optional[ModelConfig] = None,
    sgd_cfg: Optional[SgdConfig] = None,
    loss_cfg: Optional[LossConfig] = None,
    train_cfg: Optional[TrainConfig] = None,
    augment_cfg: Optional[AugmentConfig] = None,
) -> TrainResult:
    """
    TinyDetector 학습

    Args:
        dataset: 분할이 기록된 합성 데이터셋
        model_cfg: 모델 구성
        sgd_cfg: SGD 설정 (epochs, batch, seed 포함)
        loss_cfg: box 회귀 손실
        train_cfg: 평가/증강/부분 추출 설정
        augment_cfg: 증강 분포 (train_cfg.augment일 때)

    Returns:
        TrainResult

    Raises:
        DivergenceError: 손실 또는 gradient가 비유한 값이 된 step
    """
    model_cfg = model_cfg or ModelConfig()
    sgd_cfg = sgd_cfg or SgdConfig()
    loss_cfg = loss_cfg or LossConfig()
    train_cfg = train_cfg or TrainConfig()
    augment_cfg = augment_cfg or AugmentConfig()

    train = dataset.train
    if train_cfg.fraction < 1.0:
        train = subsample(train, train_cfg.fraction, sgd_cfg.seed)
    if not train:
        raise ValueError("train_toy: 학습 세트가 비어 있습니다")
    held_out = dataset.subset(train_cfg.eval_split)

    model = TinyDetector(model_cfg, seed=sgd_cfg.seed)
    params = model.parameters()
    state = SgdState.for_params(params)
    shuffle_seed, augment_seed = np.random.SeedSequence(sgd_cfg.seed).spawn(2)
    shuffle_rng = np.random.default_rng(shuffle_seed)
    augment_rng = np.random.default_rng(augment_seed)

    logger.info(
        f"🔄 학습 시작: 학습 {len(train)}개, 평가({train_cfg.eval_split}) {len(held_out)}개, "
        f"kwconv={model_cfg.kwconv}, ta={model_cfg.ta}, loss={loss_cfg.kind}, 파라미터 {model.num_params}개"
    )

    step = 0
    step_rows: List[Dict[str, float]] = []
    epoch_rows: List[Dict[str, float]] = []
    reports: List[EvalReport] = []
    for epoch in range(sgd_cfg.epochs):
        order = shuffle_rng.permutation(len(train))
        epoch_terms = []
        for start in range(0, len(order), sgd_cfg.batch):
            batch = [train[int(i)] for i in order[start : start + sgd_cfg.batch]]
            if train_cfg.augment:
                batch = [augment(s, augment_cfg, augment_rng) for s in batch]
            images = np.stack([s.image for s in batch])[:, None]
            try:
                output = model.forward(images, epoch)
                terms = model.loss(output, batch, loss_cfg)
                _check_finite(terms.total.item(), step, "손실")
                zero_grad(params)
                terms.total.backward()
            except NumericalError as e:
                if isinstance(e, DivergenceError):
                    raise
                raise DivergenceError(step, f"학습 {step}번째 step에서 수치 오류: {e.message}") from e

            grads = [p.grad for p in params]
            for g in grads:
                if g is not None:
                    _check_finite(float(np.sum(g)), step, "gradient")
            sgd_step(params, clip_grad_norm(grads, sgd_cfg.max_grad_norm), state, sgd_cfg)

            row = {
                "epoch": epoch,
                "step": step,
                "loss": terms.total.item(),
                "obj": terms.obj,
                "box": terms.box,
                "mask": terms.mask,
                "positives": terms.positives,
            }
            step_rows.append(row)
            epoch_terms.append(row)
            step += 1

        report = evaluate_model(model, held_out, epoch, train_cfg.top_k, train_cfg.conf_threshold)
        reports.append(report)
        frame = pd.DataFrame(epoch_terms)
        epoch_rows.append(
            {
                "epoch": epoch,
                "loss": float(frame["loss"].mean()),
                "obj": float(frame["obj"].mean()),
                "box": float(frame["box"].mean()),
                "mask": float(frame["mask"].mean()),
                "precision": report.precision,
                "recall": report.recall,
                "map50": report.map50,
                "map50_95": report.map50_95,
            }
        )
        logger.info(
            f"✅ epoch {epoch + 1}/{sgd_cfg.epochs}: loss={epoch_rows[-1]['loss']:.4f}, "
            f"P={report.precision:.3f}, R={report.recall:.3f}, mAP50={report.map50:.3f}"
        )

    return TrainResult(
        reports=reports,
        epochs=pd.DataFrame(epoch_rows),
        steps=pd.DataFrame(step_rows),
        model=model,
        train_size=len(train),
    )


def ema(values: Sequence[float], window: int = 20) -> np.ndarray:
    """지수 이동 평균 (α = 2/(window+1))"""
    alpha = 2.0 / (window + 1.0)
    return pd.Series(list(values), dtype=np.float64).ewm(alpha=alpha, adjust=False).mean().to_numpy()
