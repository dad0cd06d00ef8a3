"""
정규화 attention 함수 (NAF)
단일 책임: 점수 정규화, 온도 스케줄, budget 기반 마스크 초기화
"""
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Union

import numpy as np

from ..autodiff import functional as F
from ..autodiff.tensor import Tensor, as_tensor
from ..exceptions import NumericalError, ShapeError

if TYPE_CHECKING:
    from .kwconv import ScorerParams

logger = logging.getLogger(__name__)


@dataclass
class NafConfig:
    """
    NAF 설정

    masks와 scorers는 레이어 id별로 `build_stage`가 채웁니다.
    """

    tau_epochs: int = 20
    budget_b: float = 2.0
    m: int = 4
    masks: Dict[str, np.ndarray] = field(default_factory=dict)
    scorers: Dict[str, "ScorerParams"] = field(default_factory=dict)

    def __post_init__(self):
        if self.tau_epochs < 0:
            raise ValueError(f"tau_epochs는 0 이상이어야 합니다: {self.tau_epochs}")
        if self.budget_b <= 0:
            raise ValueError(f"budget_b는 양수여야 합니다: {self.budget_b}")
        if self.m < 1:
            raise ValueError(f"m은 1 이상이어야 합니다: {self.m}")


def temperature(epoch: int, cfg: NafConfig) -> float:
    """선형 감쇠 온도 max(0, 1 − epoch/tau_epochs)"""
    if epoch < 0:
        raise ValueError(f"epoch는 0 이상이어야 합니다: {epoch}")
    if cfg.tau_epochs == 0:
        return 0.0
    return max(0.0, 1.0 - epoch / cfg.tau_epochs)


def init_masks(num_mixing: int, n: int, b: float, offset: int = 0) -> np.ndarray:
    """
    budget 규칙에 맞는 이진 마스크 β 생성

    Args:
        num_mixing: 혼합 위치 수 (행)
        n: warehouse unit 수 (열)
        b: budget
        offset: 첫 전용 unit 번호 (n을 넘으면 처음으로 돌아감)

    Returns:
        num_mixing × n 0/1 행렬. b ≥ 1 이면 모든 행이 전용 unit 하나,
        b < 1 이면 ⌊b·num_mixing⌋ 행만 서로 다른 unit 하나, 나머지 행은 0
    """
    if num_mixing < 1 or n < 1:
        raise ShapeError(f"init_masks: num_mixing={num_mixing}, n={n}은 양수여야 합니다")
    covered = num_mixing if b >= 1 else int(np.floor(b * num_mixing))
    if b >= 1 and n < num_mixing:
        raise ShapeError(
            f"init_masks: b={b} ≥ 1 이면 n({n}) ≥ 혼합 위치 수({num_mixing})여야 합니다"
        )
    if covered > n:
        raise ShapeError(f"init_masks: 전용 unit {covered}개를 n={n}에서 배정할 수 없습니다")
    beta = np.zeros((num_mixing, n))
    rows = np.arange(covered)
    beta[rows, (offset + rows) % n] = 1.0
    return beta


def naf(z: Union[Tensor, np.ndarray], tau: float, beta: np.ndarray) -> Tensor:
    """
    정규화 attention: α = (1−τ)·z/Σ|z| + τ·β (행 단위)

    Args:
        z: 혼합 위치 × n 점수
        tau: 온도 [0, 1]
        beta: 같은 shape의 마스크

    Raises:
        NumericalError: τ < 1 인데 점수 행이 전부 0인 경우 (행 인덱스 포함)
    """
    z = as_tensor(z)
    if z.ndim != 2 or z.shape != tuple(beta.shape):
        raise ShapeError(f"naf: 점수 {z.shape}와 마스크 {tuple(beta.shape)}가 맞지 않습니다")
    if tau >= 1.0:
        return Tensor(np.array(beta, dtype=np.float64, copy=True))

    norms = np.abs(z.data).sum(axis=1)
    zero_rows = np.flatnonzero(norms == 0)
    if zero_rows.size:
        raise NumericalError(
            f"naf: {int(zero_rows[0])}번째 점수 행이 전부 0이라 정규화할 수 없습니다",
            details={"row": int(zero_rows[0])},
        )

    denom = F.expand(F.sum(F.abs(z), axis=1, keepdims=True), z.shape)
    normalized = F.div(z, denom)
    if tau <= 0.0:
        return normalized
    return F.add(F.scale(normalized, 1.0 - tau), Tensor(tau * beta))
