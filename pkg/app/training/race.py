"""
box 회귀 수렴 경주
단일 책임: 고정 seed의 (anchor, target) 쌍을 손실별로 독립 최적화하고 수렴 궤적 기록

anchor의 corner 좌표를 직접 파라미터로 두며, 매 step 뒤 x2 ≥ x1 + ε 로 투영합니다.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from ..core.autodiff import functional as F
from ..core.autodiff.tensor import parameter
from ..core.losses.box_losses import box_losses
from ..core.losses.params import LOSS_KINDS, LossConfig, LossKind
from .optim import SgdConfig, SgdState, sgd_step

logger = logging.getLogger(__name__)

CLAMP_EPS = 1e-3


class RaceConfig(BaseModel):
    """경주 설정"""

    model_config = ConfigDict(frozen=True)

    losses: Tuple[LossKind, ...] = Field(("ciou", "fpiou"), description="비교할 손실 종류")
    n_pairs: int = Field(256, ge=1, description="box 쌍 수")
    steps: int = Field(1000, ge=1, description="최적화 step 수")
    space: float = Field(64.0, gt=0.0, description="좌표 공간 크기")
    target_iou: float = Field(0.9, gt=0.0, le=1.0, description="수렴 판정 IoU")
    seed: int = Field(42, description="쌍 생성 seed")


def row_iou(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """대응 행끼리의 IoU"""
    iw = np.clip(np.minimum(a[:, 2], b[:, 2]) - np.maximum(a[:, 0], b[:, 0]), 0.0, None)
    ih = np.clip(np.minimum(a[:, 3], b[:, 3]) - np.maximum(a[:, 1], b[:, 1]), 0.0, None)
    inter = iw * ih
    union = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1]) + (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1]) - inter
    return inter / union


def make_pairs(n_pairs: int, space: float = 64.0, seed: int = 42) -> Tuple[np.ndarray, np.ndarray]:
    """
    겹침이 보장된 (anchor, target) corner 쌍 생성

    target은 폭/높이 [space/8, space/2], anchor는 중심을 폭의 ±40% 안에서 옮기고
    폭/높이를 [0.6, 1.6]배 한 box 입니다 (항상 IoU > 0).

    Returns:
        (anchors, targets) 각각 n_pairs × 4
    """
    rng = np.random.default_rng(seed)
    wh = rng.uniform(space / 8.0, space / 2.0, size=(n_pairs, 2))
    lo = rng.uniform(0.0, 1.0, size=(n_pairs, 2)) * (space - wh)
    targets = np.concatenate([lo, lo + wh], axis=1)

    center = lo + wh / 2.0
    shift = rng.uniform(-0.4, 0.4, size=(n_pairs, 2)) * wh
    anchor_wh = wh * rng.uniform(0.6, 1.6, size=(n_pairs, 2))
    anchor_center = center + shift
    anchors = np.concatenate([anchor_center - anchor_wh / 2.0, anchor_center + anchor_wh / 2.0], axis=1)
    return anchors, targets


def clamp_boxes(boxes: np.ndarray, eps: float = CLAMP_EPS) -> np.ndarray:
    """퇴화 box (x2 < x1 + ε) 투영 (제자리)"""
    boxes[:, 2] = np.maximum(boxes[:, 2], boxes[:, 0] + eps)
    boxes[:, 3] = np.maximum(boxes[:, 3], boxes[:, 1] + eps)
    return boxes


@dataclass
class ConvergenceTrace:
    """손실 하나의 step별 궤적"""

    kind: str
    losses: List[float] = field(default_factory=list)
    mean_iou: List[float] = field(default_factory=list)
    # 쌍별 최초 도달 step (미도달은 None)
    pair_steps: List[Optional[int]] = field(default_factory=list)
    target_iou: float = 0.9

    def __post_init__(self):
        if len(self.losses) != len(self.mean_iou):
            raise ValueError("ConvergenceTrace: 손실과 IoU 궤적 길이가 다릅니다")

    @property
    def steps(self) -> int:
        return len(self.losses)

    @property
    def steps_to(self) -> Optional[int]:
        """평균 IoU가 처음 target_iou 이상이 된 step"""
        reached = np.flatnonzero(np.asarray(self.mean_iou) >= self.target_iou)
        return int(reached[0]) if reached.size else None

    @property
    def median_steps_to(self) -> float:
        """쌍별 도달 step의 중앙값 (미도달은 ∞)"""
        if not self.pair_steps:
            return float("inf")
        values = [float("inf") if s is None else float(s) for s in self.pair_steps]
        return float(np.median(values))

    @property
    def reached_fraction(self) -> float:
        if not self.pair_steps:
            return 0.0
        return sum(s is not None for s in self.pair_steps) / len(self.pair_steps)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"loss": self.kind, "step": np.arange(self.steps), "loss_value": self.losses, "mean_iou": self.mean_iou}
        )

    def summary(self) -> Dict[str, object]:
        median = self.median_steps_to
        return {
            "loss": self.kind,
            "steps_to": self.steps_to,
            "median_steps_to": None if np.isinf(median) else median,
            "reached_fraction": self.reached_fraction,
            "final_iou": self.mean_iou[-1] if self.mean_iou else None,
        }


def run_lane(
    kind: str,
    anchors: np.ndarray,
    targets: np.ndarray,
    steps: int,
    sgd: SgdConfig,
    loss_cfg: Optional[LossConfig] = None,
    target_iou: float = 0.9,
) -> ConvergenceTrace:
    """
    손실 하나로 모든 쌍을 동시에 최적화 (합 축약이라 쌍끼리 gradient가 섞이지 않음)

    Args:
        kind: 손실 종류
        anchors: n × 4 초기 anchor
        targets: n × 4 target
        steps: step 수
        sgd: 학습률/momentum
        loss_cfg: 손실 하이퍼파라미터 (kind는 덮어씀)
        target_iou: 수렴 판정 IoU

    Returns:
        ConvergenceTrace (길이 = steps)
    """
    if kind not in LOSS_KINDS:
        raise KeyError(f"알 수 없는 손실 종류: {kind}")
    cfg = (loss_cfg or LossConfig()).model_copy(update={"kind": kind})
    boxes = parameter(clamp_boxes(np.array(anchors, dtype=np.float64)))
    state = SgdState.for_params([boxes])
    trace = ConvergenceTrace(kind=kind, target_iou=target_iou)
    pair_steps: List[Optional[int]] = [None] * len(targets)

    for step in range(steps):
        ious = row_iou(boxes.data, targets)
        for i in np.flatnonzero(ious >= target_iou):
            if pair_steps[i] is None:
                pair_steps[i] = step
        per_pair = box_losses(kind, boxes, targets, cfg)
        trace.losses.append(float(per_pair.data.mean()))
        trace.mean_iou.append(float(ious.mean()))

        boxes.zero_grad()
        F.sum(per_pair).backward()
        sgd_step([boxes], [boxes.grad], state, sgd)
        clamp_boxes(boxes.data)

    trace.pair_steps = pair_steps
    return trace


def box_regression_race(
    loss_kinds: Sequence[str],
    n_pairs: int = 256,
    steps: int = 1000,
    cfg: Optional[RaceConfig] = None,
    sgd: Optional[SgdConfig] = None,
    loss_cfg: Optional[LossConfig] = None,
) -> Dict[str, ConvergenceTrace]:
    """
    같은 쌍 집합에서 손실별 수렴 궤적 비교

    Returns:
        손실 종류 → ConvergenceTrace (입력 순서)
    """
    cfg = cfg or RaceConfig()
    sgd = sgd or SgdConfig()
    anchors, targets = make_pairs(n_pairs, cfg.space, cfg.seed)
    traces = {}
    for kind in loss_kinds:
        logger.info(f"🔄 경주 시작: {kind} (쌍 {n_pairs}개, {steps} step)")
        traces[kind] = run_lane(kind, anchors, targets, steps, sgd, loss_cfg, cfg.target_iou)
        summary = traces[kind].summary()
        logger.info(
            f"✅ 경주 완료: {kind} median steps_to={summary['median_steps_to']}, "
            f"도달 비율={summary['reached_fraction']:.3f}"
        )
    return traces
