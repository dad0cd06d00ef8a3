"""
Tensor 및 연산 기록 (reverse-mode 자동미분)
단일 책임: 64비트 실수 텐서, 미분 가능한 primitive의 기본 클래스, 역전파 기록 관리

레이아웃은 전역적으로 row-major N×C×H×W 입니다.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import NumericalError, ShapeError

logger = logging.getLogger(__name__)

MAX_RANK = 4

ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]


class Function:
    """
    미분 가능한 primitive 연산의 기본 클래스

    서브클래스는 `forward`(numpy 배열 → numpy 배열)와 `backward`
    (출력 gradient → 입력별 gradient 튜플)를 구현합니다.
    forward에서 backward에 필요한 값은 `self.saved`에 저장합니다.
    """

    kind: str = "function"

    def __init__(self, *inputs: "Tensor"):
        self.inputs = inputs
        self.saved: Dict[str, Any] = {}

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError(f"{self.kind}: forward 미구현")

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError(f"{self.kind}: backward 미구현")

    @classmethod
    def apply(cls, *inputs: "Tensor", **kwargs: Any) -> "Tensor":
        """
        연산을 생성하고 forward를 실행한 뒤 결과 Tensor를 반환

        Args:
            *inputs: 입력 텐서
            **kwargs: forward에 전달할 추가 인자

        Returns:
            결과 텐서 (입력 중 하나라도 requires_grad면 creator가 연결됨)
        """
        fn = cls(*inputs)
        out = fn.forward(*(t.data for t in inputs), **kwargs)
        if not np.all(np.isfinite(out)):
            raise NumericalError(
                f"{fn.kind} 연산 결과에 NaN/Inf가 포함되었습니다",
                details={"op": fn.kind},
            )
        requires_grad = any(t.requires_grad for t in inputs)
        return Tensor(out, requires_grad=requires_grad, _creator=fn if requires_grad else None)


class Tensor:
    """
    64비트 실수 dense 텐서

    shape은 최대 4축, 각 축은 양의 크기를 가져야 합니다 (0-rank 스칼라 허용).
    `grad`는 backward 이후에만 존재하며 data와 같은 shape입니다.
    """

    __slots__ = ("data", "requires_grad", "grad", "_creator")

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        _creator: Optional[Function] = None,
    ):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim > MAX_RANK:
            raise ShapeError(f"Tensor rank는 최대 {MAX_RANK}입니다: shape={arr.shape}")
        if any(extent <= 0 for extent in arr.shape):
            raise ShapeError(f"Tensor 축 크기는 양수여야 합니다: shape={arr.shape}")
        self.data: np.ndarray = arr
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self._creator = _creator

    # ------------------------------------------------------------------
    # 기본 속성
    # ------------------------------------------------------------------
    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self._creator is None

    def item(self) -> float:
        if self.size != 1:
            raise ShapeError(f"item()은 원소 1개 텐서에서만 가능합니다: shape={self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy(), requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # ------------------------------------------------------------------
    # 연산자 (functional 모듈로 위임)
    # ------------------------------------------------------------------
    def __add__(self, other: Union["Tensor", float, int]) -> "Tensor":
        from . import functional as F

        return F.add(self, other)

    __radd__ = __add__

    def __sub__(self, other: Union["Tensor", float, int]) -> "Tensor":
        from . import functional as F

        return F.sub(self, other)

    def __rsub__(self, other: Union[float, int]) -> "Tensor":
        from . import functional as F

        return F.add_scalar(F.neg(self), float(other))

    def __mul__(self, other: Union["Tensor", float, int]) -> "Tensor":
        from . import functional as F

        return F.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["Tensor", float, int]) -> "Tensor":
        from . import functional as F

        return F.div(self, other)

    def __neg__(self) -> "Tensor":
        from . import functional as F

        return F.neg(self)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from . import functional as F

        return F.matmul(self, other)

    def __getitem__(self, idx: Any) -> "Tensor":
        from . import functional as F

        return F.getitem(self, idx)

    def sum(self, axis: Optional[Union[int, Tuple[int, ...]]] = None, keepdims: bool = False) -> "Tensor":
        from . import functional as F

        return F.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: Optional[Union[int, Tuple[int, ...]]] = None, keepdims: bool = False) -> "Tensor":
        from . import functional as F

        return F.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, shape: Sequence[int]) -> "Tensor":
        from . import functional as F

        return F.reshape(self, shape)

    def transpose(self, axes: Sequence[int]) -> "Tensor":
        from . import functional as F

        return F.transpose(self, axes)

    def expand(self, shape: Sequence[int]) -> "Tensor":
        from . import functional as F

        return F.expand(self, shape)

    # ------------------------------------------------------------------
    # 역전파
    # ------------------------------------------------------------------
    def backward(self) -> "ComputationRecord":
        """
        스칼라 손실에서 역전파 실행

        Returns:
            실행된 연산 기록 (topological order)

        Raises:
            ShapeError: 손실이 스칼라가 아닌 경우
        """
        if self.size != 1:
            raise ShapeError(f"backward는 스칼라 손실에서만 가능합니다: shape={self.shape}")
        record = ComputationRecord.trace(self)
        record.replay_backward()
        return record


@dataclass(frozen=True)
class RecordEntry:
    """실행된 primitive 하나의 기록"""

    kind: str
    input_ids: Tuple[int, ...]
    output_id: int
    function: Function


class ComputationRecord:
    """
    실행된 primitive 연산의 순서 있는 기록

    노드 id는 기록 내부에서 post-order로 부여되므로 모든 입력 id가
    소비자 id보다 앞섭니다. 기록은 전역 상태를 공유하지 않으므로
    서로 다른 스레드의 기록은 독립적입니다.
    """

    def __init__(self, nodes: List[Tensor], entries: List[RecordEntry]):
        self.nodes = nodes
        self.entries = entries

    @property
    def root_id(self) -> int:
        return len(self.nodes) - 1

    @classmethod
    def trace(cls, root: Tensor) -> "ComputationRecord":
        """루트 텐서에서 그래프를 역추적하여 topological 기록 생성 (반복 DFS)"""
        index: Dict[int, int] = {}
        nodes: List[Tensor] = []
        entries: List[RecordEntry] = []

        stack: List[Tuple[Tensor, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in index:
                continue
            creator = node._creator
            if expanded or creator is None:
                index[id(node)] = len(nodes)
                nodes.append(node)
                if creator is not None:
                    entries.append(
                        RecordEntry(
                            kind=creator.kind,
                            input_ids=tuple(index[id(t)] for t in creator.inputs),
                            output_id=index[id(node)],
                            function=creator,
                        )
                    )
                continue
            stack.append((node, True))
            for parent in reversed(creator.inputs):
                if id(parent) not in index:
                    stack.append((parent, False))
        return cls(nodes, entries)

    def replay_backward(self) -> None:
        """기록을 역순으로 재생하여 leaf의 grad를 채움 (fan-out gradient는 누적)"""
        root = self.nodes[self.root_id]
        grads: Dict[int, np.ndarray] = {self.root_id: np.ones_like(root.data)}

        for entry in reversed(self.entries):
            grad = grads.pop(entry.output_id, None)
            if grad is None:
                continue
            input_grads = entry.function.backward(grad)
            for tid, g in zip(entry.input_ids, input_grads):
                if g is None or not self.nodes[tid].requires_grad:
                    continue
                grads[tid] = grads[tid] + g if tid in grads else g

        for tid, grad in grads.items():
            node = self.nodes[tid]
            if not node.is_leaf or not node.requires_grad:
                continue
            grad = np.array(grad, dtype=np.float64, copy=True).reshape(node.shape)
            node.grad = grad if node.grad is None else node.grad + grad


def as_tensor(value: Union[Tensor, ArrayLike]) -> Tensor:
    """Tensor가 아닌 값을 상수 텐서로 감쌈"""
    if isinstance(value, Tensor):
        return value
    return Tensor(value, requires_grad=False)


def parameter(data: ArrayLike) -> Tensor:
    """학습 가능한 leaf 텐서 생성"""
    return Tensor(np.array(data, dtype=np.float64, copy=True), requires_grad=True)


def zero_grad(params: Sequence[Tensor]) -> None:
    for p in params:
        p.grad = None
