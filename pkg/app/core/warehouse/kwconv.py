"""
KernelWarehouse 동적 합성곱
단일 책임: stage 단위 warehouse 구성, 커널 조립, KWConv forward, 파라미터 수 계산, checkpoint
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..autodiff import functional as F
from ..autodiff.serialization import load_tensor, save_tensor
from ..autodiff.tensor import Tensor, as_tensor, parameter
from ..exceptions import DataFormatError, ShapeError
from ..utils.io import read_json, write_json
from .naf import NafConfig, init_masks, naf, temperature
from .partition import KernelShape, KernelUnitShape, mixing_grid, num_mixing, partition_kernel, stage_unit_shape

logger = logging.getLogger(__name__)

SCORER_INIT_STD = 0.01


@dataclass(frozen=True)
class LayerSpec:
    """warehouse를 사용하는 합성곱 레이어 하나"""

    layer_id: str
    kernel_shape: KernelShape
    stride: int = 1
    padding: int = 0

    @property
    def in_channels(self) -> int:
        return self.kernel_shape[1]

    @property
    def static_params(self) -> int:
        return int(np.prod(self.kernel_shape))


@dataclass
class ScorerParams:
    """전역 평균 풀링 → 선형 사상 점수기 (출력은 혼합 위치 × n 점수 행렬)"""

    weight: Tensor
    bias: Tensor

    @property
    def num_params(self) -> int:
        return self.weight.size + self.bias.size


@dataclass
class Warehouse:
    """
    stage 단위 kernel unit 저장소

    units는 모두 unit_shape을 공유하는 학습 가능 텐서 n개입니다.
    """

    stage_id: str
    unit_shape: KernelUnitShape
    units: List[Tensor]
    layers: Dict[str, LayerSpec] = field(default_factory=dict)

    def __post_init__(self):
        for i, unit in enumerate(self.units):
            if unit.shape != self.unit_shape.as_tuple():
                raise ShapeError(
                    f"warehouse {self.stage_id}: unit {i} shape {unit.shape} ≠ {self.unit_shape.as_tuple()}"
                )

    @property
    def n(self) -> int:
        return len(self.units)

    def grid(self, layer_id: str) -> KernelShape:
        return mixing_grid(self.layer(layer_id).kernel_shape, self.unit_shape)

    def layer(self, layer_id: str) -> LayerSpec:
        if layer_id not in self.layers:
            raise KeyError(f"warehouse {self.stage_id}에 레이어 '{layer_id}'가 없습니다")
        return self.layers[layer_id]

    def bank(self) -> Tensor:
        """units를 n × unit 원소 수 행렬로 쌓음 (미분 가능)"""
        numel = self.unit_shape.numel
        return F.concat([F.reshape(u, (1, numel)) for u in self.units], axis=0)

    def parameters(self) -> List[Tensor]:
        return list(self.units)


def stage_mixing(layers: Sequence[LayerSpec], unit: KernelUnitShape) -> int:
    """stage에서 가장 큰 레이어의 혼합 위치 수"""
    return max(num_mixing(spec.kernel_shape, unit) for spec in layers)


def warehouse_size(layers: Sequence[LayerSpec], unit: KernelUnitShape, budget_b: float) -> int:
    """
    budget b에 따른 unit 수 n = ⌈b·최대 혼합 위치⌉

    레이어 수가 아니라 가장 큰 레이어로 정해지므로 같은 모양의 레이어를 더 붙여도 n은 그대로입니다.
    """
    largest = stage_mixing(layers, unit)
    n = int(math.ceil(budget_b * largest))
    if budget_b >= 1:
        n = max(n, largest)
    return max(n, 1)


def refined_unit(layers: Sequence[LayerSpec], m: int) -> KernelUnitShape:
    """stage 공통 unit을 출력 채널 축으로 m 등분한 unit"""
    base = stage_unit_shape([spec.kernel_shape for spec in layers])
    return partition_kernel(base.as_tuple(), m)[0]


def build_stage(
    stage_id: str,
    layers: Sequence[LayerSpec],
    cfg: NafConfig,
    rng: np.random.Generator,
    n: Optional[int] = None,
) -> Warehouse:
    """
    stage warehouse 생성 및 cfg에 레이어별 마스크/점수기 등록

    마스크는 레이어 순서대로 전용 unit을 이어서 배정하고 n을 넘으면 처음으로 돌아갑니다.
    한 레이어 안에서는 혼합 위치마다 서로 다른 unit입니다.
    점수기 bias는 β에 작은 잡음을 더해 초기화합니다.

    Args:
        stage_id: stage 이름
        layers: warehouse를 공유할 레이어들
        cfg: NAF 설정 (masks, scorers가 채워짐)
        rng: 초기화용 난수 생성기
        n: unit 수 (None이면 budget으로 계산)

    Returns:
        Warehouse
    """
    if not layers:
        raise ShapeError(f"stage {stage_id}: 레이어가 없습니다")
    unit = refined_unit(layers, cfg.m)
    n = n if n is not None else warehouse_size(layers, unit, cfg.budget_b)

    fan_in = unit.in_channels * unit.kh * unit.kw
    units = [parameter(rng.normal(0.0, math.sqrt(2.0 / fan_in), unit.as_tuple())) for _ in range(n)]
    warehouse = Warehouse(stage_id=stage_id, unit_shape=unit, units=units, layers={s.layer_id: s for s in layers})

    offset = 0
    for spec in layers:
        positions = num_mixing(spec.kernel_shape, unit)
        beta = init_masks(positions, n, cfg.budget_b, offset=offset)
        offset = (offset + int(beta.sum())) % n
        cfg.masks[spec.layer_id] = beta
        weight = rng.normal(0.0, SCORER_INIT_STD, (positions * n, spec.in_channels))
        bias = beta.reshape(-1) + rng.normal(0.0, SCORER_INIT_STD, positions * n)
        cfg.scorers[spec.layer_id] = ScorerParams(weight=parameter(weight), bias=parameter(bias))

    logger.info(
        f"✅ warehouse '{stage_id}' 생성: 레이어 {len(layers)}개, unit {unit.as_tuple()}, n={n}"
    )
    return warehouse


def assemble_kernels(
    warehouse: Warehouse,
    alpha: Union[Tensor, np.ndarray],
    layer_id: str,
    bank: Optional[Tensor] = None,
) -> Tensor:
    """
    attention 행렬로 unit을 선형 결합하여 레이어 전체 커널 생성

    Args:
        warehouse: unit 저장소
        alpha: 혼합 위치 × n attention
        layer_id: 대상 레이어
        bank: 미리 쌓아 둔 unit 행렬 (같은 forward 안에서 재사용)

    Returns:
        (out, in, kh, kw) 커널 텐서
    """
    alpha = as_tensor(alpha)
    grid = warehouse.grid(layer_id)
    positions = grid[0] * grid[1] * grid[2] * grid[3]
    if alpha.shape != (positions, warehouse.n):
        raise ShapeError(
            f"assemble_kernels: attention {alpha.shape}는 ({positions}, {warehouse.n})이어야 합니다",
            details={"layer_id": layer_id},
        )
    bank = bank if bank is not None else warehouse.bank()
    mixed = F.matmul(alpha, bank)
    return F.tile_units(mixed, grid, warehouse.unit_shape.as_tuple())


def layer_scores(x: Tensor, scorer: ScorerParams, positions: int, n: int) -> Tensor:
    """입력 평균 풀링 → 선형 사상 → N × 혼합 위치 × n 점수"""
    batch, channels = x.shape[0], x.shape[1]
    pooled = F.reshape(F.pool_spatial(x, "avg"), (batch, channels))
    z = F.linear(pooled, scorer.weight, scorer.bias)
    return F.reshape(z, (batch, positions, n))


def kwconv_forward(
    x: Tensor,
    layer_id: str,
    warehouse: Warehouse,
    cfg: NafConfig,
    epoch: int,
) -> Tensor:
    """
    KWConv: 샘플별 점수 → NAF → 커널 조립 → 합성곱 (bias 없음)

    Args:
        x: N × C × H × W 입력
        layer_id: warehouse에 등록된 레이어
        warehouse: stage warehouse
        cfg: NAF 설정
        epoch: 온도 계산용 epoch

    Returns:
        N × out × H' × W'
    """
    spec = warehouse.layer(layer_id)
    if layer_id not in cfg.scorers or layer_id not in cfg.masks:
        raise KeyError(f"NafConfig에 레이어 '{layer_id}'의 점수기/마스크가 없습니다")
    if x.ndim != 4 or x.shape[1] != spec.in_channels:
        raise ShapeError(
            f"kwconv: 입력 {x.shape}의 채널이 레이어 커널 {spec.kernel_shape}와 맞지 않습니다"
        )
    beta = cfg.masks[layer_id]
    positions = beta.shape[0]
    tau = temperature(epoch, cfg)
    bank = warehouse.bank()

    if tau >= 1.0:
        # 모든 샘플이 β로 같은 커널을 씀
        kernel = assemble_kernels(warehouse, beta, layer_id, bank=bank)
        return F.conv2d(x, kernel, stride=spec.stride, padding=spec.padding)

    z = layer_scores(x, cfg.scorers[layer_id], positions, warehouse.n)
    outputs = []
    for s in range(x.shape[0]):
        alpha = naf(z[s], tau, beta)
        kernel = assemble_kernels(warehouse, alpha, layer_id, bank=bank)
        outputs.append(F.conv2d(x[s : s + 1], kernel, stride=spec.stride, padding=spec.padding))
    return outputs[0] if len(outputs) == 1 else F.concat(outputs, axis=0)


# ----------------------------------------------------------------------
# 파라미터 수
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ParamCount:
    warehouse: int
    scorers: int
    static_per_layer: Dict[str, int]

    @property
    def total(self) -> int:
        return self.warehouse + self.scorers

    @property
    def static_total(self) -> int:
        return sum(self.static_per_layer.values())


def param_count(layers: Sequence[LayerSpec], n: int, m: int = 1) -> ParamCount:
    """
    stage 구성의 학습 파라미터 수 (n·|unit| + 점수기)

    Args:
        layers: stage 레이어
        n: unit 수
        m: 공통 unit의 출력 채널 분할 수

    Returns:
        ParamCount (레이어별 정적 합성곱 파라미터 수 포함)
    """
    unit = refined_unit(layers, m)
    scorers = 0
    for spec in layers:
        outputs = num_mixing(spec.kernel_shape, unit) * n
        scorers += outputs * spec.in_channels + outputs
    return ParamCount(
        warehouse=n * unit.numel,
        scorers=scorers,
        static_per_layer={spec.layer_id: spec.static_params for spec in layers},
    )


def stage_parameters(warehouse: Warehouse, cfg: NafConfig) -> List[Tensor]:
    params = warehouse.parameters()
    for layer_id in warehouse.layers:
        scorer = cfg.scorers[layer_id]
        params.extend([scorer.weight, scorer.bias])
    return params


# ----------------------------------------------------------------------
# checkpoint
# ----------------------------------------------------------------------
def _bitmask_rows(beta: np.ndarray) -> List[str]:
    return ["".join("1" if v else "0" for v in row) for row in beta.astype(bool)]


def save_warehouse(directory: Union[str, Path], warehouse: Warehouse, cfg: NafConfig) -> Path:
    """units.ckt + 점수기 텐서 + warehouse.json sidecar 저장"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_tensor(directory / "units.ckt", warehouse.bank().data)
    layers = []
    for layer_id, spec in warehouse.layers.items():
        scorer = cfg.scorers[layer_id]
        save_tensor(directory / f"scorer_{layer_id}_weight.ckt", scorer.weight)
        save_tensor(directory / f"scorer_{layer_id}_bias.ckt", scorer.bias)
        layers.append(
            {
                "layer_id": layer_id,
                "kernel_shape": list(spec.kernel_shape),
                "stride": spec.stride,
                "padding": spec.padding,
                "beta": _bitmask_rows(cfg.masks[layer_id]),
            }
        )
    sidecar = {
        "stage_id": warehouse.stage_id,
        "n": warehouse.n,
        "unit_shape": list(warehouse.unit_shape.as_tuple()),
        "b": cfg.budget_b,
        "m": cfg.m,
        "tau_epochs": cfg.tau_epochs,
        "layers": layers,
    }
    path = write_json(directory / "warehouse.json", sidecar)
    logger.info(f"💾 warehouse '{warehouse.stage_id}' checkpoint 저장: {directory}")
    return path


def load_warehouse(directory: Union[str, Path]) -> Tuple[Warehouse, NafConfig]:
    directory = Path(directory)
    try:
        sidecar = read_json(directory / "warehouse.json")
        unit = KernelUnitShape.of(sidecar["unit_shape"])
        bank = load_tensor(directory / "units.ckt").data
        if bank.shape != (sidecar["n"], unit.numel):
            raise DataFormatError(f"units.ckt shape {bank.shape}이 sidecar와 맞지 않습니다")
        cfg = NafConfig(tau_epochs=sidecar["tau_epochs"], budget_b=sidecar["b"], m=sidecar["m"])
        layers = {}
        for entry in sidecar["layers"]:
            spec = LayerSpec(entry["layer_id"], tuple(entry["kernel_shape"]), entry["stride"], entry["padding"])
            layers[spec.layer_id] = spec
            cfg.masks[spec.layer_id] = np.array([[float(c) for c in row] for row in entry["beta"]])
            cfg.scorers[spec.layer_id] = ScorerParams(
                weight=load_tensor(directory / f"scorer_{spec.layer_id}_weight.ckt", requires_grad=True),
                bias=load_tensor(directory / f"scorer_{spec.layer_id}_bias.ckt", requires_grad=True),
            )
    except (KeyError, ValueError, OSError) as e:
        raise DataFormatError(f"warehouse checkpoint 읽기 실패 ({directory}): {e}") from e

    units = [parameter(row.reshape(unit.as_tuple())) for row in bank]
    warehouse = Warehouse(stage_id=sidecar["stage_id"], unit_shape=unit, units=units, layers=layers)
    logger.info(f"✅ warehouse '{warehouse.stage_id}' checkpoint 로드: n={warehouse.n}")
    return warehouse, cfg
