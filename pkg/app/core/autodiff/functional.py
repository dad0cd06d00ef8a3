"""
미분 가능한 primitive 연산 모음
단일 책임: forward/backward 규칙이 있는 모든 텐서 연산 제공

broadcast는 스칼라(0-rank 텐서 또는 Python 수)와 텐서 사이에서만 허용합니다.
그 밖의 shape 조합은 `expand`로 명시해야 합니다.
"""
from __future__ import annotations

import logging
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from ..exceptions import ShapeError
from .tensor import Function, Tensor, as_tensor

logger = logging.getLogger(__name__)

Scalar = Union[int, float]
Axis = Optional[Union[int, Tuple[int, ...]]]


def _check_binary(kind: str, a: np.ndarray, b: np.ndarray) -> None:
    if a.shape == b.shape or a.ndim == 0 or b.ndim == 0:
        return
    raise ShapeError(
        f"{kind}: shape 불일치 {a.shape} vs {b.shape} (스칼라 broadcast만 허용)",
        details={"left": list(a.shape), "right": list(b.shape)},
    )


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    return np.asarray(grad.sum()).reshape(shape)


# ----------------------------------------------------------------------
# 이항 연산
# ----------------------------------------------------------------------
class Add(Function):
    kind = "add"

    def forward(self, a, b):
        _check_binary(self.kind, a, b)
        self.saved["shapes"] = (a.shape, b.shape)
        return a + b

    def backward(self, grad):
        sa, sb = self.saved["shapes"]
        return _unbroadcast(grad, sa), _unbroadcast(grad, sb)


class Sub(Function):
    kind = "sub"

    def forward(self, a, b):
        _check_binary(self.kind, a, b)
        self.saved["shapes"] = (a.shape, b.shape)
        return a - b

    def backward(self, grad):
        sa, sb = self.saved["shapes"]
        return _unbroadcast(grad, sa), _unbroadcast(-grad, sb)


class Mul(Function):
    kind = "mul"

    def forward(self, a, b):
        _check_binary(self.kind, a, b)
        self.saved["a"], self.saved["b"] = a, b
        return a * b

    def backward(self, grad):
        a, b = self.saved["a"], self.saved["b"]
        return _unbroadcast(grad * b, a.shape), _unbroadcast(grad * a, b.shape)


class Div(Function):
    kind = "div"

    def forward(self, a, b):
        _check_binary(self.kind, a, b)
        self.saved["a"], self.saved["b"] = a, b
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b

    def backward(self, grad):
        a, b = self.saved["a"], self.saved["b"]
        return (
            _unbroadcast(grad / b, a.shape),
            _unbroadcast(-grad * a / (b * b), b.shape),
        )


class Maximum(Function):
    """원소별 최대값 (동률이면 첫 번째 입력으로 gradient 전달)"""

    kind = "maximum"

    def forward(self, a, b):
        _check_binary(self.kind, a, b)
        self.saved["pick_a"] = np.broadcast_to(a >= b, np.broadcast(a, b).shape)
        self.saved["shapes"] = (a.shape, b.shape)
        return np.maximum(a, b)

    def backward(self, grad):
        pick_a = self.saved["pick_a"]
        sa, sb = self.saved["shapes"]
        return _unbroadcast(grad * pick_a, sa), _unbroadcast(grad * ~pick_a, sb)


class Minimum(Function):
    """원소별 최소값 (동률이면 첫 번째 입력으로 gradient 전달)"""

    kind = "minimum"

    def forward(self, a, b):
        _check_binary(self.kind, a, b)
        self.saved["pick_a"] = np.broadcast_to(a <= b, np.broadcast(a, b).shape)
        self.saved["shapes"] = (a.shape, b.shape)
        return np.minimum(a, b)

    def backward(self, grad):
        pick_a = self.saved["pick_a"]
        sa, sb = self.saved["shapes"]
        return _unbroadcast(grad * pick_a, sa), _unbroadcast(grad * ~pick_a, sb)


# ----------------------------------------------------------------------
# 단항 연산
# ----------------------------------------------------------------------
class Scale(Function):
    kind = "scale"

    def forward(self, x, factor: float = 1.0):
        self.saved["factor"] = float(factor)
        return x * self.saved["factor"]

    def backward(self, grad):
        return (grad * self.saved["factor"],)


class AddScalar(Function):
    kind = "add_scalar"

    def forward(self, x, value: float = 0.0):
        return x + float(value)

    def backward(self, grad):
        return (grad,)


class Neg(Function):
    kind = "neg"

    def forward(self, x):
        return -x

    def backward(self, grad):
        return (-grad,)


class Sigmoid(Function):
    kind = "sigmoid"

    def forward(self, x):
        out = expit(x)
        self.saved["out"] = out
        return out

    def backward(self, grad):
        s = self.saved["out"]
        return (grad * s * (1.0 - s),)


class Tanh(Function):
    kind = "tanh"

    def forward(self, x):
        out = np.tanh(x)
        self.saved["out"] = out
        return out

    def backward(self, grad):
        t = self.saved["out"]
        return (grad * (1.0 - t * t),)


class Relu(Function):
    kind = "relu"

    def forward(self, x):
        self.saved["mask"] = x > 0
        return np.where(x > 0, x, 0.0)

    def backward(self, grad):
        return (grad * self.saved["mask"],)


class Exp(Function):
    kind = "exp"

    def forward(self, x):
        out = np.exp(x)
        self.saved["out"] = out
        return out

    def backward(self, grad):
        return (grad * self.saved["out"],)


class Log(Function):
    kind = "log"

    def forward(self, x):
        self.saved["x"] = x
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(x)

    def backward(self, grad):
        return (grad / self.saved["x"],)


class Abs(Function):
    kind = "abs"

    def forward(self, x):
        self.saved["sign"] = np.sign(x)
        return np.abs(x)

    def backward(self, grad):
        return (grad * self.saved["sign"],)


class Atan(Function):
    kind = "atan"

    def forward(self, x):
        self.saved["x"] = x
        return np.arctan(x)

    def backward(self, grad):
        x = self.saved["x"]
        return (grad / (1.0 + x * x),)


class Ramp(Function):
    """
    구간 [lo, hi]를 [0, 1]로 선형 사상하고 바깥은 포화

    gradient는 lo < x ≤ hi 에서 1/(hi−lo), 그 밖에서는 0 (상단 꺾임점은 왼쪽 미분).
    """

    kind = "ramp"

    def forward(self, x, lo: float = 0.0, hi: float = 1.0):
        if not hi > lo:
            raise ShapeError(f"ramp: hi({hi})는 lo({lo})보다 커야 합니다")
        width = hi - lo
        self.saved["active"] = (x > lo) & (x <= hi)
        self.saved["width"] = width
        return np.where(x < lo, 0.0, np.where(x > hi, 1.0, (x - lo) / width))

    def backward(self, grad):
        return (grad * self.saved["active"] / self.saved["width"],)


# ----------------------------------------------------------------------
# 축소 / shape 연산
# ----------------------------------------------------------------------
class Sum(Function):
    kind = "sum"

    def forward(self, x, axis: Axis = None, keepdims: bool = False):
        self.saved["shape"] = x.shape
        self.saved["axis"] = axis
        self.saved["keepdims"] = keepdims
        return np.asarray(np.sum(x, axis=axis, keepdims=keepdims))

    def backward(self, grad):
        shape, axis, keepdims = self.saved["shape"], self.saved["axis"], self.saved["keepdims"]
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, shape).copy(),)


class Reshape(Function):
    kind = "reshape"

    def forward(self, x, shape: Sequence[int] = ()):
        self.saved["shape"] = x.shape
        try:
            return x.reshape(tuple(shape))
        except ValueError as e:
            raise ShapeError(f"reshape: {x.shape} → {tuple(shape)} 불가") from e

    def backward(self, grad):
        return (grad.reshape(self.saved["shape"]),)


class Transpose(Function):
    kind = "transpose"

    def forward(self, x, axes: Sequence[int] = ()):
        axes = tuple(axes)
        if sorted(axes) != list(range(x.ndim)):
            raise ShapeError(f"transpose: 축 순열 {axes}이 rank {x.ndim}와 맞지 않습니다")
        self.saved["inverse"] = tuple(np.argsort(axes))
        return np.transpose(x, axes)

    def backward(self, grad):
        return (np.transpose(grad, self.saved["inverse"]),)


class Expand(Function):
    """
    크기 1 축 확장 또는 앞쪽 축 추가를 명시적으로 수행
    """

    kind = "expand"

    def forward(self, x, shape: Sequence[int] = ()):
        shape = tuple(shape)
        lead = len(shape) - x.ndim
        if lead < 0 or any(
            s != t and s != 1 for s, t in zip(x.shape, shape[lead:])
        ):
            raise ShapeError(f"expand: {x.shape} → {shape} 불가")
        self.saved["shape"] = x.shape
        self.saved["lead"] = lead
        return np.broadcast_to(x, shape).copy()

    def backward(self, grad):
        shape, lead = self.saved["shape"], self.saved["lead"]
        if lead:
            grad = grad.sum(axis=tuple(range(lead)))
        axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
        if axes:
            grad = grad.sum(axis=axes, keepdims=True)
        return (grad,)


class Concat(Function):
    kind = "concat"

    def forward(self, *arrays, axis: int = 0):
        ref = arrays[0]
        for arr in arrays[1:]:
            if arr.ndim != ref.ndim or any(
                s != t for i, (s, t) in enumerate(zip(arr.shape, ref.shape)) if i != axis % ref.ndim
            ):
                raise ShapeError(f"concat: axis {axis} 이외 축이 다릅니다 {ref.shape} vs {arr.shape}")
        self.saved["splits"] = np.cumsum([a.shape[axis] for a in arrays])[:-1]
        self.saved["axis"] = axis
        return np.concatenate(arrays, axis=axis)

    def backward(self, grad):
        return tuple(np.split(grad, self.saved["splits"], axis=self.saved["axis"]))


class GetItem(Function):
    kind = "getitem"

    def forward(self, x, idx: Any = None):
        self.saved["shape"] = x.shape
        self.saved["idx"] = idx
        return np.array(x[idx], dtype=np.float64, copy=True)

    def backward(self, grad):
        out = np.zeros(self.saved["shape"])
        np.add.at(out, self.saved["idx"], grad)
        return (out,)


class MatMul(Function):
    kind = "matmul"

    def forward(self, a, b):
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ShapeError(
                f"matmul: 2차원 행렬 곱 shape 불일치 {a.shape} @ {b.shape}",
                details={"left": list(a.shape), "right": list(b.shape)},
            )
        self.saved["a"], self.saved["b"] = a, b
        return a @ b

    def backward(self, grad):
        a, b = self.saved["a"], self.saved["b"]
        return grad @ b.T, a.T @ grad


# ----------------------------------------------------------------------
# 합성곱 / 풀링
# ----------------------------------------------------------------------
def conv_output_extent(size: int, k: int, stride: int, padding: int) -> int:
    """cross-correlation 출력 크기 계산 (정수가 아니거나 양수가 아니면 ShapeError)"""
    span = size + 2 * padding - k
    if span < 0 or span % stride != 0:
        raise ShapeError(
            f"conv2d: 출력 크기 ({size} + 2·{padding} − {k})/{stride} + 1 이 양의 정수가 아닙니다"
        )
    return span // stride + 1


class Conv2d(Function):
    """N×C×H×W 입력과 K×C×kh×kw 커널의 cross-correlation"""

    kind = "conv2d"

    def forward(self, x, k, stride: int = 1, padding: int = 0):
        if x.ndim != 4 or k.ndim != 4 or x.shape[1] != k.shape[1]:
            raise ShapeError(
                f"conv2d: 입력 {x.shape}와 커널 {k.shape}의 채널이 맞지 않습니다",
                details={"input": list(x.shape), "kernel": list(k.shape)},
            )
        if stride < 1 or padding < 0:
            raise ShapeError(f"conv2d: stride={stride}, padding={padding} 허용 범위 밖")
        _, _, h, w = x.shape
        _, _, kh, kw = k.shape
        ho = conv_output_extent(h, kh, stride, padding)
        wo = conv_output_extent(w, kw, stride, padding)

        xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding))) if padding else x
        windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride][:, :, :ho, :wo]
        self.saved.update(windows=windows, k=k, xp_shape=xp.shape, stride=stride, padding=padding)
        out = np.tensordot(windows, k, axes=([1, 4, 5], [1, 2, 3]))
        return np.ascontiguousarray(out.transpose(0, 3, 1, 2))

    def backward(self, grad):
        windows, k = self.saved["windows"], self.saved["k"]
        stride, padding = self.saved["stride"], self.saved["padding"]
        _, _, kh, kw = k.shape
        _, _, ho, wo = grad.shape

        dk = np.tensordot(grad, windows, axes=([0, 2, 3], [0, 2, 3]))
        dxp = np.zeros(self.saved["xp_shape"])
        for i in range(kh):
            for j in range(kw):
                contrib = np.einsum("nkhw,kc->nchw", grad, k[:, :, i, j])
                dxp[:, :, i : i + stride * ho : stride, j : j + stride * wo : stride] += contrib
        if padding:
            dxp = dxp[:, :, padding:-padding, padding:-padding]
        return dxp, dk


class PoolSpatial(Function):
    """H×W 전체에 대한 채널별 avg/max 풀링 → N×C×1×1"""

    kind = "pool_spatial"

    def forward(self, x, mode: str = "avg"):
        if x.ndim != 4:
            raise ShapeError(f"pool_spatial: N×C×H×W 입력이 필요합니다 (shape={x.shape})")
        n, c, h, w = x.shape
        self.saved["shape"], self.saved["mode"] = x.shape, mode
        if mode == "avg":
            return x.mean(axis=(2, 3), keepdims=True)
        if mode == "max":
            flat = x.reshape(n, c, h * w)
            arg = flat.argmax(axis=2)
            self.saved["arg"] = arg
            return np.take_along_axis(flat, arg[..., None], axis=2).reshape(n, c, 1, 1)
        raise ShapeError(f"pool_spatial: 알 수 없는 mode '{mode}'")

    def backward(self, grad):
        n, c, h, w = self.saved["shape"]
        if self.saved["mode"] == "avg":
            return (np.broadcast_to(grad / (h * w), (n, c, h, w)).copy(),)
        out = np.zeros((n, c, h * w))
        np.put_along_axis(out, self.saved["arg"][..., None], grad.reshape(n, c, 1), axis=2)
        return (out.reshape(n, c, h, w),)


class PoolChannel(Function):
    """채널 축에 대한 픽셀별 avg/max 풀링 → N×1×H×W"""

    kind = "pool_channel"

    def forward(self, x, mode: str = "avg"):
        if x.ndim != 4:
            raise ShapeError(f"pool_channel: N×C×H×W 입력이 필요합니다 (shape={x.shape})")
        self.saved["shape"], self.saved["mode"] = x.shape, mode
        if mode == "avg":
            return x.mean(axis=1, keepdims=True)
        if mode == "max":
            arg = x.argmax(axis=1)[:, None]
            self.saved["arg"] = arg
            return np.take_along_axis(x, arg, axis=1)
        raise ShapeError(f"pool_channel: 알 수 없는 mode '{mode}'")

    def backward(self, grad):
        shape = self.saved["shape"]
        if self.saved["mode"] == "avg":
            return (np.broadcast_to(grad / shape[1], shape).copy(),)
        out = np.zeros(shape)
        np.put_along_axis(out, self.saved["arg"], grad, axis=1)
        return (out,)


class LogSoftmax(Function):
    kind = "log_softmax"

    def forward(self, x, axis: int = 1):
        shifted = x - x.max(axis=axis, keepdims=True)
        out = shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
        self.saved["out"], self.saved["axis"] = out, axis
        return out

    def backward(self, grad):
        out, axis = self.saved["out"], self.saved["axis"]
        return (grad - np.exp(out) * grad.sum(axis=axis, keepdims=True),)


class UpsampleNearest(Function):
    kind = "upsample_nearest"

    def forward(self, x, factor: int = 2):
        if x.ndim != 4 or factor < 1:
            raise ShapeError(f"upsample_nearest: shape={x.shape}, factor={factor}")
        self.saved["factor"] = factor
        return x.repeat(factor, axis=2).repeat(factor, axis=3)

    def backward(self, grad):
        f = self.saved["factor"]
        n, c, h, w = grad.shape
        return (grad.reshape(n, c, h // f, f, w // f, f).sum(axis=(3, 5)),)


class TileUnits(Function):
    """
    혼합 위치별 kernel unit 행렬 (P × unit 원소 수)을 레이어 전체 커널로 배치

    위치 순서는 출력 채널 우선, 그 다음 입력 채널, 그 다음 공간 축입니다.
    """

    kind = "tile_units"

    def forward(self, mixed, grid: Tuple[int, int, int, int] = (1, 1, 1, 1),
                unit: Tuple[int, int, int, int] = (1, 1, 1, 1)):
        grid, unit = tuple(grid), tuple(unit)
        if mixed.shape != (int(np.prod(grid)), int(np.prod(unit))):
            raise ShapeError(
                f"tile_units: 혼합 행렬 {mixed.shape}가 grid {grid} × unit {unit}와 맞지 않습니다"
            )
        self.saved["grid"], self.saved["unit"] = grid, unit
        full = tuple(g * u for g, u in zip(grid, unit))
        return (
            mixed.reshape(grid + unit)
            .transpose(0, 4, 1, 5, 2, 6, 3, 7)
            .reshape(full)
        )

    def backward(self, grad):
        grid, unit = self.saved["grid"], self.saved["unit"]
        split = (grid[0], unit[0], grid[1], unit[1], grid[2], unit[2], grid[3], unit[3])
        return (
            grad.reshape(split)
            .transpose(0, 2, 4, 6, 1, 3, 5, 7)
            .reshape(int(np.prod(grid)), int(np.prod(unit))),
        )


# ----------------------------------------------------------------------
# 공개 함수형 API
# ----------------------------------------------------------------------
def add(a: Union[Tensor, Scalar], b: Union[Tensor, Scalar]) -> Tensor:
    if not isinstance(b, Tensor):
        return add_scalar(as_tensor(a), float(b))
    if not isinstance(a, Tensor):
        return add_scalar(b, float(a))
    return Add.apply(a, b)


def sub(a: Union[Tensor, Scalar], b: Union[Tensor, Scalar]) -> Tensor:
    if not isinstance(b, Tensor):
        return add_scalar(as_tensor(a), -float(b))
    if not isinstance(a, Tensor):
        return add_scalar(neg(b), float(a))
    return Sub.apply(a, b)


def mul(a: Union[Tensor, Scalar], b: Union[Tensor, Scalar]) -> Tensor:
    if not isinstance(b, Tensor):
        return scale(as_tensor(a), float(b))
    if not isinstance(a, Tensor):
        return scale(b, float(a))
    return Mul.apply(a, b)


def div(a: Union[Tensor, Scalar], b: Union[Tensor, Scalar]) -> Tensor:
    if not isinstance(b, Tensor):
        return scale(as_tensor(a), 1.0 / float(b))
    return Div.apply(as_tensor(a), b)


def scale(x: Tensor, factor: float) -> Tensor:
    return Scale.apply(x, factor=factor)


def add_scalar(x: Tensor, value: float) -> Tensor:
    return AddScalar.apply(x, value=value)


def neg(x: Tensor) -> Tensor:
    return Neg.apply(x)


def square(x: Tensor) -> Tensor:
    return Mul.apply(x, x)


def maximum(a: Union[Tensor, Scalar], b: Union[Tensor, Scalar]) -> Tensor:
    return Maximum.apply(as_tensor(a), as_tensor(b))


def minimum(a: Union[Tensor, Scalar], b: Union[Tensor, Scalar]) -> Tensor:
    return Minimum.apply(as_tensor(a), as_tensor(b))


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def tanh(x: Tensor) -> Tensor:
    return Tanh.apply(x)


def relu(x: Tensor) -> Tensor:
    return Relu.apply(x)


def exp(x: Tensor) -> Tensor:
    return Exp.apply(x)


def log(x: Tensor) -> Tensor:
    return Log.apply(x)


def abs(x: Tensor) -> Tensor:  # noqa: A001
    return Abs.apply(x)


def atan(x: Tensor) -> Tensor:
    return Atan.apply(x)


def ramp(x: Tensor, lo: float, hi: float) -> Tensor:
    return Ramp.apply(x, lo=lo, hi=hi)


def sum(x: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    return Sum.apply(x, axis=axis, keepdims=keepdims)


def mean(x: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:
    if axis is None:
        count = x.size
    else:
        axes = (axis,) if isinstance(axis, int) else axis
        count = int(np.prod([x.shape[a] for a in axes]))
    return scale(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    return Reshape.apply(x, shape=tuple(shape))


def transpose(x: Tensor, axes: Sequence[int]) -> Tensor:
    return Transpose.apply(x, axes=tuple(axes))


def expand(x: Tensor, shape: Sequence[int]) -> Tensor:
    return Expand.apply(x, shape=tuple(shape))


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise ShapeError("concat: 빈 텐서 목록")
    return Concat.apply(*tensors, axis=axis)


def getitem(x: Tensor, idx: Any) -> Tensor:
    return GetItem.apply(x, idx=idx)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    return MatMul.apply(a, b)


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """
    마지막 축에 대한 affine 변환 (... × Din → ... × Dout)

    Args:
        x: 입력 텐서
        weight: Dout × Din 가중치
        bias: Dout 편향 (없으면 생략)

    Returns:
        ... × Dout 텐서
    """
    if weight.ndim != 2 or x.shape[-1:] != weight.shape[1:]:
        raise ShapeError(
            f"linear: 입력 {x.shape}의 마지막 축이 가중치 {weight.shape}의 Din과 다릅니다",
            details={"input": list(x.shape), "weight": list(weight.shape)},
        )
    if bias is not None and bias.shape != (weight.shape[0],):
        raise ShapeError(f"linear: bias {bias.shape}는 ({weight.shape[0]},)이어야 합니다")
    lead = x.shape[:-1]
    rows = int(np.prod(lead)) if lead else 1
    flat = reshape(x, (rows, weight.shape[1]))
    out = matmul(flat, transpose(weight, (1, 0)))
    if bias is not None:
        out = add(out, expand(bias, out.shape))
    return reshape(out, lead + (weight.shape[0],))


def conv2d(x: Tensor, kernel: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    return Conv2d.apply(x, kernel, stride=stride, padding=padding)


def pool_spatial(x: Tensor, mode: str = "avg") -> Tensor:
    return PoolSpatial.apply(x, mode=mode)


def pool_channel(x: Tensor, mode: str = "avg") -> Tensor:
    return PoolChannel.apply(x, mode=mode)


def log_softmax(x: Tensor, axis: int = 1) -> Tensor:
    return LogSoftmax.apply(x, axis=axis)


def upsample_nearest(x: Tensor, factor: int = 2) -> Tensor:
    return UpsampleNearest.apply(x, factor=factor)


def tile_units(mixed: Tensor, grid: Sequence[int], unit: Sequence[int]) -> Tensor:
    return TileUnits.apply(mixed, grid=tuple(grid), unit=tuple(unit))


_UNARY: Dict[str, Callable[[Tensor], Tensor]] = {
    "sigmoid": sigmoid,
    "tanh": tanh,
    "relu": relu,
    "exp": exp,
    "log": log,
    "abs": abs,
    "atan": atan,
    "neg": neg,
}

_BINARY: Dict[str, Callable[[Any, Any], Tensor]] = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "div": div,
    "scale": lambda x, c: scale(x, float(c)),
    "maximum": maximum,
    "minimum": minimum,
}


def elementwise(op: str, *args: Any) -> Tensor:
    """
    이름으로 원소별 연산을 호출

    Args:
        op: sigmoid|tanh|relu|exp|log|abs|atan|neg|add|sub|mul|div|scale|maximum|minimum
        *args: 연산 인자

    Returns:
        결과 텐서
    """
    if op in _UNARY:
        if len(args) != 1:
            raise ShapeError(f"elementwise: '{op}'는 인자 1개가 필요합니다")
        return _UNARY[op](as_tensor(args[0]))
    if op in _BINARY:
        if len(args) != 2:
            raise ShapeError(f"elementwise: '{op}'는 인자 2개가 필요합니다")
        return _BINARY[op](*args)
    raise ShapeError(f"elementwise: 알 수 없는 연산 '{op}'")
