"""
Triple attention 파라미터
단일 책임: 세 branch의 파라미터 블록 정의와 초기화
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from ..autodiff.tensor import Tensor, parameter
from ..exceptions import ShapeError

logger = logging.getLogger(__name__)

SPATIAL_KERNEL = 7
SCAN_ORDERS = ("row_major", "column_major")


def _uniform(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    bound = 1.0 / math.sqrt(fan_in)
    return rng.uniform(-bound, bound, shape)


@dataclass
class ChannelAttentionParams:
    """공유 MLP (C → C/r → C)"""

    r: int
    w1: Tensor
    b1: Tensor
    w2: Tensor
    b2: Tensor

    def __post_init__(self):
        hidden, channels = self.w1.shape
        if channels % self.r != 0 or hidden != channels // self.r:
            raise ShapeError(
                f"channel attention: C={channels}, r={self.r}이면 hidden은 C/r이어야 합니다 (현재 {hidden})"
            )
        if self.w2.shape != (channels, hidden) or self.b1.shape != (hidden,) or self.b2.shape != (channels,):
            raise ShapeError("channel attention: MLP 블록 shape이 서로 맞지 않습니다")

    @property
    def channels(self) -> int:
        return self.w1.shape[1]

    @classmethod
    def init(cls, channels: int, r: int, rng: np.random.Generator) -> "ChannelAttentionParams":
        if r < 1 or channels % r != 0:
            raise ShapeError(f"channel attention: C={channels}가 r={r}로 나누어지지 않습니다")
        hidden = channels // r
        return cls(
            r=r,
            w1=parameter(_uniform(rng, channels, (hidden, channels))),
            b1=parameter(np.zeros(hidden)),
            w2=parameter(_uniform(rng, hidden, (channels, hidden))),
            b2=parameter(np.zeros(channels)),
        )

    def blocks(self) -> Dict[str, Tensor]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}


@dataclass
class SpatialAttentionParams:
    """[channel-avg; channel-max] → 7×7 합성곱 필터"""

    kernel: Tensor

    def __post_init__(self):
        if self.kernel.shape != (1, 2, SPATIAL_KERNEL, SPATIAL_KERNEL):
            raise ShapeError(f"spatial attention 커널은 1×2×7×7이어야 합니다: {self.kernel.shape}")

    @classmethod
    def init(cls, rng: np.random.Generator) -> "SpatialAttentionParams":
        fan_in = 2 * SPATIAL_KERNEL * SPATIAL_KERNEL
        return cls(kernel=parameter(_uniform(rng, fan_in, (1, 2, SPATIAL_KERNEL, SPATIAL_KERNEL))))

    def blocks(self) -> Dict[str, Tensor]:
        return {"kernel": self.kernel}


GATES = ("f", "i", "c", "o")


@dataclass
class RecurrentGateParams:
    """LSTM 게이트 affine 사상 네 개 ([h, x] 2C → C)"""

    w_f: Tensor
    b_f: Tensor
    w_i: Tensor
    b_i: Tensor
    w_c: Tensor
    b_c: Tensor
    w_o: Tensor
    b_o: Tensor

    def __post_init__(self):
        channels = self.b_f.shape[0] if self.b_f.ndim == 1 else -1
        for gate in GATES:
            w, b = getattr(self, f"w_{gate}"), getattr(self, f"b_{gate}")
            if w.shape != (channels, 2 * channels) or b.shape != (channels,):
                raise ShapeError(
                    f"recurrent gate '{gate}': W {w.shape}, b {b.shape}는 C×2C, C여야 합니다 (C={channels})"
                )

    @property
    def channels(self) -> int:
        return self.b_f.shape[0]

    @classmethod
    def init(cls, channels: int, rng: np.random.Generator) -> "RecurrentGateParams":
        blocks = {}
        for gate in GATES:
            blocks[f"w_{gate}"] = parameter(_uniform(rng, 2 * channels, (channels, 2 * channels)))
            blocks[f"b_{gate}"] = parameter(np.zeros(channels))
        return cls(**blocks)

    @classmethod
    def constant(cls, channels: int, weight: float = 0.0, biases: Dict[str, float] = None) -> "RecurrentGateParams":
        """모든 가중치를 weight로, 게이트별 bias를 상수로 채운 파라미터 (포화 실험용)"""
        biases = biases or {}
        blocks = {}
        for gate in GATES:
            blocks[f"w_{gate}"] = parameter(np.full((channels, 2 * channels), float(weight)))
            blocks[f"b_{gate}"] = parameter(np.full(channels, float(biases.get(gate, 0.0))))
        return cls(**blocks)

    def blocks(self) -> Dict[str, Tensor]:
        return {f"{kind}_{gate}": getattr(self, f"{kind}_{gate}") for gate in GATES for kind in ("w", "b")}


@dataclass
class TripleAttentionParams:
    """세 branch 파라미터 묶음"""

    channel: ChannelAttentionParams
    spatial: SpatialAttentionParams
    recurrent: RecurrentGateParams
    scan: str = "row_major"

    def __post_init__(self):
        if self.scan not in SCAN_ORDERS:
            raise ValueError(f"scan은 {SCAN_ORDERS} 중 하나여야 합니다: {self.scan}")
        if self.channel.channels != self.recurrent.channels:
            raise ShapeError(
                f"triple attention: channel branch C={self.channel.channels}, "
                f"recurrent branch C={self.recurrent.channels} 불일치"
            )

    @classmethod
    def init(cls, channels: int, r: int, rng: np.random.Generator, scan: str = "row_major") -> "TripleAttentionParams":
        return cls(
            channel=ChannelAttentionParams.init(channels, r, rng),
            spatial=SpatialAttentionParams.init(rng),
            recurrent=RecurrentGateParams.init(channels, rng),
            scan=scan,
        )

    def blocks(self) -> Dict[str, Tensor]:
        named: Dict[str, Tensor] = {}
        for prefix, group in (("channel", self.channel), ("spatial", self.spatial), ("recurrent", self.recurrent)):
            for name, tensor in group.blocks().items():
                named[f"{prefix}.{name}"] = tensor
        return named

    def parameters(self) -> List[Tensor]:
        return list(self.blocks().values())
