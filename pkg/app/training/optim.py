"""
SGD 최적화기
단일 책임: momentum SGD 설정과 한 step 갱신, gradient norm 제한
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.autodiff.tensor import Tensor
from ..core.exceptions import ShapeError

logger = logging.getLogger(__name__)


class SgdConfig(BaseModel):
    """momentum SGD 하이퍼파라미터 (고정 학습률)"""

    model_config = ConfigDict(frozen=True)

    lr0: float = Field(0.01, gt=0.0, description="초기(고정) 학습률")
    momentum: float = Field(0.937, ge=0.0, lt=1.0, description="momentum")
    batch: int = Field(16, ge=1, description="mini-batch 크기")
    epochs: int = Field(30, ge=1, description="학습 epoch 수")
    seed: int = Field(42, description="셔플/초기화 seed")
    max_grad_norm: Optional[float] = Field(10.0, gt=0.0, description="전역 gradient norm 상한 (None이면 제한 없음)")


@dataclass
class SgdState:
    """파라미터별 velocity"""

    velocity: List[np.ndarray] = field(default_factory=list)
    steps: int = 0

    @classmethod
    def for_params(cls, params: Sequence[Tensor]) -> "SgdState":
        return cls(velocity=[np.zeros_like(p.data) for p in params])


def sgd_step(
    params: Sequence[Tensor],
    grads: Sequence[Optional[np.ndarray]],
    state: SgdState,
    cfg: SgdConfig,
) -> SgdState:
    """
    v ← momentum·v + g,  θ ← θ − lr·v  (파라미터 data를 제자리 갱신)

    gradient가 None인 파라미터는 0 gradient로 취급합니다.

    Raises:
        ShapeError: 파라미터/gradient/velocity shape 불일치
    """
    if len(params) != len(grads):
        raise ShapeError(f"sgd_step: 파라미터 {len(params)}개, gradient {len(grads)}개")
    if not state.velocity:
        state.velocity = [np.zeros_like(p.data) for p in params]
    if len(state.velocity) != len(params):
        raise ShapeError(f"sgd_step: velocity {len(state.velocity)}개 ≠ 파라미터 {len(params)}개")

    for i, (p, g) in enumerate(zip(params, grads)):
        g = np.zeros_like(p.data) if g is None else np.asarray(g, dtype=np.float64)
        if g.shape != p.shape or state.velocity[i].shape != p.shape:
            raise ShapeError(
                f"sgd_step: {i}번 파라미터 shape {p.shape}, gradient {g.shape}",
                details={"index": i},
            )
        state.velocity[i] = cfg.momentum * state.velocity[i] + g
        p.data -= cfg.lr0 * state.velocity[i]
    state.steps += 1
    return state


def clip_grad_norm(grads: Sequence[Optional[np.ndarray]], max_norm: Optional[float]) -> List[Optional[np.ndarray]]:
    """전역 L2 norm이 max_norm을 넘으면 비례 축소"""
    if max_norm is None:
        return list(grads)
    total = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads if g is not None)))
    if total <= max_norm:
        return list(grads)
    factor = max_norm / (total + 1e-12)
    return [None if g is None else g * factor for g in grads]
