"""
gradient 검증 스위트
단일 책임: kwconv / ta / losses 미분 연산을 seed 고정 무작위 인스턴스로 유한차분 검사

각 probe는 인스턴스 하나를 만들고 가중합 스칼라 손실의 블록별 최대 상대 오차를 돌려줍니다.
box 인스턴스는 min/max/abs/ramp 꺾임점에서 충분히 떨어진 것만 사용합니다.
"""
import importlib
import logging
import zlib
from typing import Callable, Dict, List, Mapping

import numpy as np
import pandas as pd

from ..core.attention import (
    ChannelAttentionParams,
    RecurrentGateParams,
    SpatialAttentionParams,
    TripleAttentionParams,
    channel_attention,
    lstm_step,
    recurrent_branch,
    spatial_attention,
    triple_attention,
)
from ..core.autodiff import Tensor, check_parameters, finite_diff_check, parameter
from ..core.autodiff import functional as F
from ..core.exceptions import GradientCheckError, VerificationError
from ..core.losses import LossConfig, WceConfig, weighted_cross_entropy
from ..core.warehouse import (
    KernelUnitShape,
    LayerSpec,
    NafConfig,
    ScorerParams,
    Warehouse,
    assemble_kernels,
    init_masks,
    kwconv_forward,
    naf,
)

logger = logging.getLogger(__name__)

# 패키지는 box_losses 함수를 내보내므로 서브모듈은 명시적으로 로드
batched = importlib.import_module("app.core.losses.box_losses")

SCOPES = ("all", "kwconv", "ta", "losses")
DEFAULT_INSTANCES = 100
DEFAULT_EPS = 1e-5
TOLERANCE = 1e-4
BREAKPOINT_MARGIN = 1e-3

Probe = Callable[[np.random.Generator, float], float]


def _weighted(out: Tensor, rng_weights: np.ndarray) -> Tensor:
    return F.sum(F.mul(out, Tensor(rng_weights)))


def _max_error(errors: Mapping[str, float]) -> float:
    return max(errors.values()) if errors else 0.0


def _randomize(blocks: Mapping[str, Tensor], rng: np.random.Generator, std: float = 0.5) -> None:
    for t in blocks.values():
        t.data = rng.normal(0.0, std, t.shape)


# ----------------------------------------------------------------------
# kernel warehouse
# ----------------------------------------------------------------------
PROBE_LAYER = LayerSpec("probe", (4, 2, 3, 3), stride=1, padding=1)


def _probe_warehouse(rng: np.random.Generator) -> tuple:
    """unit 2×2×3×3 두 개, 혼합 위치 2개인 단일 레이어 warehouse"""
    unit = KernelUnitShape.of((2, 2, 3, 3))
    units = [parameter(rng.normal(0.0, 0.5, unit.as_tuple())) for _ in range(2)]
    warehouse = Warehouse(stage_id="probe", unit_shape=unit, units=units, layers={PROBE_LAYER.layer_id: PROBE_LAYER})
    cfg = NafConfig(tau_epochs=2, budget_b=1.0, m=1)
    cfg.masks[PROBE_LAYER.layer_id] = init_masks(2, 2, 1.0)
    cfg.scorers[PROBE_LAYER.layer_id] = ScorerParams(
        weight=parameter(rng.normal(0.0, 0.5, (4, PROBE_LAYER.in_channels))),
        bias=parameter(rng.normal(0.0, 1.0, 4)),
    )
    return warehouse, cfg


def _unit_blocks(warehouse: Warehouse) -> Dict[str, Tensor]:
    return {f"unit{i}": u for i, u in enumerate(warehouse.units)}


def probe_naf(rng: np.random.Generator, eps: float) -> float:
    raw = rng.normal(size=(3, 4))
    z = np.sign(raw) * (0.2 + np.abs(raw))
    beta = init_masks(3, 4, 1.0)
    w = rng.normal(size=(3, 4))
    return finite_diff_check(lambda t: _weighted(naf(t, 0.5, beta), w), Tensor(z), eps)


def probe_assemble_kernels(rng: np.random.Generator, eps: float) -> float:
    warehouse, _ = _probe_warehouse(rng)
    alpha = parameter(rng.normal(size=(2, warehouse.n)))
    w = rng.normal(size=PROBE_LAYER.kernel_shape)
    blocks = {"alpha": alpha, **_unit_blocks(warehouse)}
    return _max_error(
        check_parameters(lambda: _weighted(assemble_kernels(warehouse, alpha, PROBE_LAYER.layer_id), w), blocks, eps)
    )


def probe_kwconv_forward(rng: np.random.Generator, eps: float) -> float:
    warehouse, cfg = _probe_warehouse(rng)
    x = parameter(rng.normal(size=(2, 2, 4, 4)))
    scorer = cfg.scorers[PROBE_LAYER.layer_id]
    w = rng.normal(size=(2, 4, 4, 4))
    blocks = {"x": x, "scorer.weight": scorer.weight, "scorer.bias": scorer.bias, **_unit_blocks(warehouse)}
    # epoch 1 → τ = 0.5 (샘플별 점수 경로)
    fn = lambda: _weighted(kwconv_forward(x, PROBE_LAYER.layer_id, warehouse, cfg, epoch=1), w)  # noqa: E731
    return _max_error(check_parameters(fn, blocks, eps))


# ----------------------------------------------------------------------
# triple attention (C=2, r=2, 3×3)
# ----------------------------------------------------------------------
TA_SHAPE = (2, 2, 3, 3)


def probe_channel_attention(rng: np.random.Generator, eps: float) -> float:
    p = ChannelAttentionParams.init(2, 2, rng)
    _randomize(p.blocks(), rng)
    x = parameter(rng.normal(size=TA_SHAPE))
    w = rng.normal(size=(2, 2, 1, 1))
    return _max_error(check_parameters(lambda: _weighted(channel_attention(x, p), w), {"x": x, **p.blocks()}, eps))


def probe_spatial_attention(rng: np.random.Generator, eps: float) -> float:
    p = SpatialAttentionParams.init(rng)
    x = parameter(rng.normal(size=TA_SHAPE))
    w = rng.normal(size=(2, 1, 3, 3))
    return _max_error(check_parameters(lambda: _weighted(spatial_attention(x, p), w), {"x": x, **p.blocks()}, eps))


def probe_lstm_step(rng: np.random.Generator, eps: float) -> float:
    p = RecurrentGateParams.init(2, rng)
    _randomize(p.blocks(), rng)
    h, c, x = (parameter(rng.normal(size=(2, 2))) for _ in range(3))
    wh, wc = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))

    def loss() -> Tensor:
        h_t, c_t = lstm_step(h, c, x, p)
        return F.add(_weighted(h_t, wh), _weighted(c_t, wc))

    return _max_error(check_parameters(loss, {"h_prev": h, "c_prev": c, "x_t": x, **p.blocks()}, eps))


def probe_recurrent_branch(rng: np.random.Generator, eps: float) -> float:
    p = RecurrentGateParams.init(2, rng)
    _randomize(p.blocks(), rng)
    x = parameter(rng.normal(size=TA_SHAPE))
    w = rng.normal(size=TA_SHAPE)
    scan = "row_major" if rng.random() < 0.5 else "column_major"
    return _max_error(check_parameters(lambda: _weighted(recurrent_branch(x, p, scan), w), {"x": x, **p.blocks()}, eps))


def probe_triple_attention(rng: np.random.Generator, eps: float) -> float:
    p = TripleAttentionParams.init(2, 2, rng)
    _randomize({k: v for k, v in p.blocks().items() if not k.startswith("spatial")}, rng)
    x = parameter(rng.normal(size=TA_SHAPE))
    w = rng.normal(size=TA_SHAPE)
    return _max_error(check_parameters(lambda: _weighted(triple_attention(x, p), w), {"x": x, **p.blocks()}, eps))


# ----------------------------------------------------------------------
# losses
# ----------------------------------------------------------------------
def box_instance(rng: np.random.Generator, k: int = 4, u: float = 0.95, margin: float = BREAKPOINT_MARGIN) -> tuple:
    """
    꺾임점에서 margin 이상 떨어진 (pred, gt) K×4 쌍

    모든 대응 모서리가 서로 다르고, 교집합 폭/높이가 양수이며 IoU가 0과 u에서 떨어진 인스턴스만 받습니다.
    """
    while True:
        xy = rng.uniform(0.0, 8.0, (k, 2))
        wh = rng.uniform(1.0, 4.0, (k, 2))
        gt = np.concatenate([xy, xy + wh], axis=1)
        pred = gt + rng.uniform(-0.8, 0.8, (k, 4))
        if np.any(pred[:, 2:] - pred[:, :2] < 0.3):
            continue
        if np.min(np.abs(pred - gt)) < margin:
            continue
        iw = np.minimum(pred[:, 2], gt[:, 2]) - np.maximum(pred[:, 0], gt[:, 0])
        ih = np.minimum(pred[:, 3], gt[:, 3]) - np.maximum(pred[:, 1], gt[:, 1])
        if np.min(iw) < margin or np.min(ih) < margin:
            continue
        v = batched.box_iou(pred, gt).data
        if np.min(v) < margin or np.max(v) > u - margin:
            continue
        return pred, gt


def _box_probe(kind: str) -> Probe:
    def probe(rng: np.random.Generator, eps: float) -> float:
        pred, gt = box_instance(rng)
        w = rng.uniform(0.5, 1.5, len(gt))
        cfg = LossConfig(kind=kind)
        return finite_diff_check(lambda t: _weighted(batched.box_losses(kind, t, gt, cfg), w), Tensor(pred), eps)

    probe.__name__ = f"probe_{kind}"
    return probe


def probe_penalty_factor(rng: np.random.Generator, eps: float) -> float:
    pred, gt = box_instance(rng)
    w = rng.normal(size=len(gt))
    return finite_diff_check(lambda t: _weighted(batched.penalty_factor(t, gt), w), Tensor(pred), eps)


def probe_quality(rng: np.random.Generator, eps: float) -> float:
    p = rng.uniform(0.0, 3.0, 6)
    w = rng.normal(size=6)
    return finite_diff_check(lambda t: _weighted(batched.quality(t), w), Tensor(p), eps)


def probe_nonmonotonic_attention(rng: np.random.Generator, eps: float) -> float:
    x = rng.uniform(-2.0, 2.0, 6)
    w = rng.normal(size=6)
    return finite_diff_check(lambda t: _weighted(batched.nonmonotonic_attention(t), w), Tensor(x), eps)


def probe_weighted_cross_entropy(rng: np.random.Generator, eps: float) -> float:
    logits = rng.normal(size=(2, 2, 3, 3))
    target = rng.integers(0, 2, (2, 3, 3))
    cfg = WceConfig()
    return finite_diff_check(lambda t: weighted_cross_entropy(t, target, cfg), Tensor(logits), eps)


SUITES: Dict[str, Dict[str, Probe]] = {
    "kwconv": {
        "naf": probe_naf,
        "assemble_kernels": probe_assemble_kernels,
        "kwconv_forward": probe_kwconv_forward,
    },
    "ta": {
        "channel_attention": probe_channel_attention,
        "spatial_attention": probe_spatial_attention,
        "lstm_step": probe_lstm_step,
        "recurrent_branch": probe_recurrent_branch,
        "triple_attention": probe_triple_attention,
    },
    "losses": {
        **{f"{kind}_loss": _box_probe(kind) for kind in ("iou", "ciou", "focaler", "piou", "piouv2", "fpiou")},
        "penalty_factor": probe_penalty_factor,
        "quality": probe_quality,
        "nonmonotonic_attention": probe_nonmonotonic_attention,
        "weighted_cross_entropy": probe_weighted_cross_entropy,
    },
}


def _op_rng(seed: int, op: str) -> np.random.Generator:
    # scope와 무관하게 같은 op는 같은 난수열
    return np.random.default_rng([seed, zlib.crc32(op.encode("utf-8"))])


def run_gradcheck(
    scope: str = "all",
    seed: int = 42,
    instances: int = DEFAULT_INSTANCES,
    eps: float = DEFAULT_EPS,
    tol: float = TOLERANCE,
) -> pd.DataFrame:
    """
    스위트 실행

    Args:
        scope: all | kwconv | ta | losses
        seed: 인스턴스 생성 seed
        instances: op당 무작위 인스턴스 수
        eps: 중앙 차분 간격
        tol: 통과 기준 (최대 상대 오차 < tol)

    Returns:
        op별 행 (scope, op, instances, max_rel_error, worst_instance, passed)

    Raises:
        ValueError: 알 수 없는 scope 또는 instances < 1
    """
    if scope not in SCOPES:
        raise ValueError(f"알 수 없는 gradcheck scope: {scope} (가능: {', '.join(SCOPES)})")
    if instances < 1:
        raise ValueError(f"instances는 1 이상이어야 합니다: {instances}")

    scopes = list(SUITES) if scope == "all" else [scope]
    rows: List[Dict[str, object]] = []
    for name in scopes:
        for op, probe in SUITES[name].items():
            rng = _op_rng(seed, op)
            worst, worst_at = 0.0, 0
            for i in range(instances):
                try:
                    err = probe(rng, eps)
                except GradientCheckError as e:
                    logger.warning(f"⚠️ {op} 인스턴스 {i}: 비유한 probe (좌표 {e.index})")
                    err = float("inf")
                if err > worst or i == 0:
                    worst, worst_at = err, i
            passed = bool(worst < tol)
            rows.append(
                {"scope": name, "op": op, "instances": instances, "max_rel_error": worst,
                 "worst_instance": worst_at, "passed": passed}
            )
            mark = "✅" if passed else "❌"
            logger.info(f"{mark} gradcheck {name}/{op}: 최대 상대 오차 {worst:.3e}")
    return pd.DataFrame(rows)


def verify(table: pd.DataFrame) -> None:
    """실패한 op가 있으면 이름을 담아 VerificationError"""
    failed = table.loc[~table["passed"], "op"].tolist()
    if failed:
        raise VerificationError(
            f"gradcheck 실패: {', '.join(failed)}",
            details={"failed": failed, "max_rel_error": table.set_index("op").loc[failed, "max_rel_error"].tolist()},
        )
