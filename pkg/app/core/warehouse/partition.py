"""
Kernel 분할
단일 책임: kernel unit shape 계산 (분할, stage 공통 unit, 혼합 위치 grid)

커널 shape 표기는 (out, in, kh, kw) 입니다.
"""
import logging
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import List, Sequence, Tuple

from ..exceptions import ShapeError

logger = logging.getLogger(__name__)

KernelShape = Tuple[int, int, int, int]


@dataclass(frozen=True)
class KernelUnitShape:
    """kernel unit 하나의 extent"""

    out_channels: int
    in_channels: int
    kh: int
    kw: int

    def __post_init__(self):
        if min(self.as_tuple()) <= 0:
            raise ShapeError(f"kernel unit extent는 양수여야 합니다: {self.as_tuple()}")

    def as_tuple(self) -> KernelShape:
        return (self.out_channels, self.in_channels, self.kh, self.kw)

    @property
    def numel(self) -> int:
        return self.out_channels * self.in_channels * self.kh * self.kw

    @classmethod
    def of(cls, shape: Sequence[int]) -> "KernelUnitShape":
        if len(shape) != 4:
            raise ShapeError(f"커널 shape은 4축이어야 합니다: {tuple(shape)}")
        return cls(*(int(s) for s in shape))


def partition_kernel(kernel_shape: Sequence[int], m: int) -> List[KernelUnitShape]:
    """
    커널을 출력 채널 축으로 m개의 겹치지 않는 unit으로 균등 분할

    Args:
        kernel_shape: (out, in, kh, kw)
        m: unit 개수

    Returns:
        동일한 KernelUnitShape m개

    Raises:
        ShapeError: 출력 채널 수가 m으로 나누어지지 않는 경우
    """
    full = KernelUnitShape.of(kernel_shape)
    if m < 1 or full.out_channels % m != 0:
        raise ShapeError(
            f"partition_kernel: 출력 채널 {full.out_channels}을 m={m}으로 나눌 수 없습니다",
            details={"kernel_shape": list(full.as_tuple()), "m": m},
        )
    unit = KernelUnitShape(full.out_channels // m, full.in_channels, full.kh, full.kw)
    return [unit] * m


def stage_unit_shape(layer_kernel_shapes: Sequence[Sequence[int]]) -> KernelUnitShape:
    """
    stage 안 모든 레이어 커널이 공유할 수 있는 unit shape

    채널 축은 모든 레이어의 입력/출력 채널 수 전체의 gcd.
    공간 축은 모든 레이어가 같은 커널 shape이면 그대로, 아니면 1×1.
    """
    if not layer_kernel_shapes:
        raise ShapeError("stage_unit_shape: 레이어 커널 목록이 비었습니다")
    shapes = [KernelUnitShape.of(s).as_tuple() for s in layer_kernel_shapes]
    channel = reduce(gcd, [s[0] for s in shapes] + [s[1] for s in shapes])
    if all(s == shapes[0] for s in shapes):
        kh, kw = shapes[0][2], shapes[0][3]
    else:
        kh = kw = 1
    return KernelUnitShape(channel, channel, kh, kw)


def mixing_grid(kernel_shape: Sequence[int], unit: KernelUnitShape) -> KernelShape:
    """레이어 커널을 unit으로 덮는 위치 grid (축별 개수)"""
    full = KernelUnitShape.of(kernel_shape).as_tuple()
    grid = []
    for extent, u in zip(full, unit.as_tuple()):
        if extent % u != 0:
            raise ShapeError(
                f"mixing_grid: unit {unit.as_tuple()}이 커널 {full}을 나누지 않습니다"
            )
        grid.append(extent // u)
    return tuple(grid)  # type: ignore[return-value]


def num_mixing(kernel_shape: Sequence[int], unit: KernelUnitShape) -> int:
    g = mixing_grid(kernel_shape, unit)
    return g[0] * g[1] * g[2] * g[3]
