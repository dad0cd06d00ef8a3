"""
유한차분 gradient 검사
단일 책임: 해석적 gradient와 중앙 차분 근사 비교
"""
import logging
from typing import Callable, Dict, Mapping

import numpy as np

from ..exceptions import GradientCheckError, NumericalError
from .tensor import Tensor

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-5


def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    if analytic.size == 0:
        return 0.0
    return float(np.max(np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))))


def _probe(loss_fn: Callable[[], Tensor], index: int) -> float:
    try:
        value = loss_fn().item()
    except NumericalError as e:
        raise GradientCheckError(index) from e
    if not np.isfinite(value):
        raise GradientCheckError(index)
    return value


def finite_diff_check(
    f: Callable[[Tensor], Tensor],
    x: Tensor,
    eps: float = DEFAULT_EPS,
) -> float:
    """
    단일 입력 함수의 gradient 검사

    Args:
        f: Tensor → 스칼라 Tensor
        x: 검사할 지점
        eps: 중앙 차분 간격 (> 0)

    Returns:
        max_i |analytic − numeric| / max(1, |analytic|)

    Raises:
        GradientCheckError: 비유한 중간값이 나온 좌표 인덱스 포함
    """
    leaf = Tensor(x.data.copy(), requires_grad=True)
    return check_parameters(lambda: f(leaf), {"x": leaf}, eps)["x"]


def check_parameters(
    loss_fn: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    eps: float = DEFAULT_EPS,
) -> Dict[str, float]:
    """
    여러 파라미터 블록에 대한 gradient 검사

    파라미터 data를 제자리에서 ±eps 만큼 흔들고 원래 값으로 되돌립니다.
    좌표 인덱스는 params 순서대로 이어 붙인 전역 인덱스입니다.

    Args:
        loss_fn: 인자 없이 스칼라 손실을 만드는 함수 (params를 closure로 참조)
        params: 이름 → requires_grad leaf 텐서
        eps: 중앙 차분 간격

    Returns:
        블록 이름 → 최대 상대 오차
    """
    if eps <= 0:
        raise ValueError(f"eps는 양수여야 합니다: {eps}")

    for p in params.values():
        p.grad = None
        if not p.data.flags.c_contiguous:
            p.data = np.ascontiguousarray(p.data)
    try:
        loss = loss_fn()
    except NumericalError as e:
        raise GradientCheckError(0) from e
    loss.backward()

    errors: Dict[str, float] = {}
    offset = 0
    for name, p in params.items():
        analytic = np.zeros_like(p.data) if p.grad is None else p.grad.copy()
        numeric = np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            plus = _probe(loss_fn, offset + i)
            flat[i] = original - eps
            minus = _probe(loss_fn, offset + i)
            flat[i] = original
            numeric.reshape(-1)[i] = (plus - minus) / (2.0 * eps)
        errors[name] = _relative_error(analytic, numeric)
        offset += flat.size
    logger.debug(f"gradcheck 블록별 최대 상대 오차: {errors}")
    return errors
