"""
소형 균열 검출/분할 모델
단일 책임: KWConv 선택형 backbone + TA 선택형 neck + 객체성/box/mask head, 학습 목표 구성, 검출 디코딩

64×64 입력 기준 shape:
    stem 32×32(8) → stage1 16×16(16) → stage2 16×16(16) → stage3 8×8(32)
    neck: 8×8 → 16×16 upsample, stage2와 concat, (선택) triple attention
    head: 16×16 격자 (stride 4) 객체성/box, 64×64 mask
"""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.attention import TripleAttentionParams, save_attention, triple_attention
from ..core.autodiff import functional as F
from ..core.autodiff.serialization import save_tensor
from ..core.autodiff.tensor import Tensor, parameter
from ..core.exceptions import ShapeError
from ..core.losses.box import Box
from ..core.losses.box_losses import box_loss
from ..core.losses.params import LossConfig, WceConfig
from ..core.losses.wce import weighted_cross_entropy
from ..core.utils.io import write_json
from ..core.warehouse import LayerSpec, NafConfig, Warehouse, build_stage, kwconv_forward, save_warehouse
from ..data.sample import CrackSample
from ..metrics.matching import Detection

logger = logging.getLogger(__name__)

STRIDE = 4
BOX_LOG_CLAMP = 4.0

STEM = LayerSpec("stem", (8, 1, 4, 4), stride=2, padding=1)
STAGES: Dict[str, Tuple[LayerSpec, ...]] = {
    "stage1": (LayerSpec("stage1_conv", (16, 8, 4, 4), stride=2, padding=1),),
    "stage2": (
        LayerSpec("stage2_conv1", (16, 16, 3, 3), stride=1, padding=1),
        LayerSpec("stage2_conv2", (16, 16, 3, 3), stride=1, padding=1),
    ),
    "stage3": (LayerSpec("stage3_conv", (32, 16, 4, 4), stride=2, padding=1),),
}
# 1×1 합성곱 (out, in)
HEADS: Dict[str, Tuple[int, int]] = {
    "neck_reduce": (16, 32),
    "neck_fuse": (16, 32),
    "head_obj": (2, 16),
    "head_box": (4, 16),
    "head_mask": (2, 24),
}


class ModelConfig(BaseModel):
    """모델 구성 스위치와 손실 가중치"""

    model_config = ConfigDict(frozen=True)

    kwconv: bool = Field(True, description="backbone stage 합성곱을 KWConv로 교체")
    ta: bool = Field(True, description="neck upsample 뒤 triple attention 추가")
    tau_epochs: int = Field(10, ge=0, description="NAF 온도 감쇠 epoch 수")
    budget_b: float = Field(2.0, gt=0.0, description="warehouse budget b")
    m: int = Field(4, ge=1, description="kernel unit 분할 수")
    ta_reduction: int = Field(4, ge=1, description="channel attention 축소 비율 r")
    scan: str = Field("row_major", description="recurrent branch 스캔 순서")
    obj_weights: Tuple[float, float] = Field((1.0, 5.0), description="객체성 WCE 클래스 가중치")
    mask_weights: Tuple[float, float] = Field((1.0, 5.0), description="mask WCE 클래스 가중치")
    box_weight: float = Field(1.0, ge=0.0, description="box 손실 가중치")
    mask_weight: float = Field(1.0, ge=0.0, description="mask 손실 가중치")


@dataclass
class DetectorOutput:
    obj_logits: Tensor
    boxes: Tensor
    mask_logits: Tensor


@dataclass
class LossTerms:
    total: Tensor
    obj: float
    box: float
    mask: float
    positives: int


def _he(rng: np.random.Generator, shape: Sequence[int]) -> np.ndarray:
    fan_in = int(np.prod(shape[1:]))
    return rng.normal(0.0, math.sqrt(2.0 / fan_in), shape)


def _add_bias(x: Tensor, bias: Tensor) -> Tensor:
    return F.add(x, F.expand(F.reshape(bias, (1, bias.shape[0], 1, 1)), x.shape))


class TinyDetector:
    """
    단일 스케일 anchor-free 검출기 + 분할 head

    gt box 중심이 들어 있는 격자 셀이 양성이며, box는 셀 중심에서
    네 변까지의 거리 exp(·)·stride 로 표현합니다.
    """

    def __init__(self, cfg: Optional[ModelConfig] = None, seed: int = 42):
        self.cfg = cfg or ModelConfig()
        rng = np.random.default_rng(seed)
        self.params: Dict[str, Tensor] = {"stem.weight": parameter(_he(rng, STEM.kernel_shape))}
        self.layers: Dict[str, LayerSpec] = {STEM.layer_id: STEM}
        self.naf_cfg = NafConfig(tau_epochs=self.cfg.tau_epochs, budget_b=self.cfg.budget_b, m=self.cfg.m)
        self.warehouses: Dict[str, Warehouse] = {}
        self._owner: Dict[str, Warehouse] = {}

        for stage_id, specs in STAGES.items():
            for spec in specs:
                self.layers[spec.layer_id] = spec
            if self.cfg.kwconv:
                warehouse = build_stage(stage_id, specs, self.naf_cfg, rng)
                self.warehouses[stage_id] = warehouse
                for spec in specs:
                    self._owner[spec.layer_id] = warehouse
            else:
                for spec in specs:
                    self.params[f"{spec.layer_id}.weight"] = parameter(_he(rng, spec.kernel_shape))

        for name, (out_c, in_c) in HEADS.items():
            self.params[f"{name}.weight"] = parameter(_he(rng, (out_c, in_c, 1, 1)))
            self.params[f"{name}.bias"] = parameter(np.zeros(out_c))
        # 초기 box: 셀 중심에서 각 변까지 2·stride
        self.params["head_box.bias"].data[:] = math.log(2.0)

        self.attention: Optional[TripleAttentionParams] = None
        if self.cfg.ta:
            self.attention = TripleAttentionParams.init(HEADS["neck_fuse"][0], self.cfg.ta_reduction, rng, self.cfg.scan)

    # ------------------------------------------------------------------
    # 파라미터
    # ------------------------------------------------------------------
    def named_parameters(self) -> Dict[str, Tensor]:
        named = dict(self.params)
        for stage_id, warehouse in self.warehouses.items():
            for i, unit in enumerate(warehouse.units):
                named[f"{stage_id}.unit{i}"] = unit
            for layer_id in warehouse.layers:
                scorer = self.naf_cfg.scorers[layer_id]
                named[f"{layer_id}.scorer.weight"] = scorer.weight
                named[f"{layer_id}.scorer.bias"] = scorer.bias
        if self.attention is not None:
            for name, tensor in self.attention.blocks().items():
                named[f"ta.{name}"] = tensor
        return named

    def parameters(self) -> List[Tensor]:
        return list(self.named_parameters().values())

    @property
    def num_params(self) -> int:
        return sum(p.size for p in self.parameters())

    # ------------------------------------------------------------------
    # forward
    # ------------------------------------------------------------------
    def _conv(self, x: Tensor, layer_id: str, epoch: int) -> Tensor:
        if layer_id in self._owner:
            return kwconv_forward(x, layer_id, self._owner[layer_id], self.naf_cfg, epoch)
        spec = self.layers[layer_id]
        return F.conv2d(x, self.params[f"{layer_id}.weight"], stride=spec.stride, padding=spec.padding)

    def _pointwise(self, x: Tensor, name: str) -> Tensor:
        return _add_bias(F.conv2d(x, self.params[f"{name}.weight"]), self.params[f"{name}.bias"])

    def _decode_boxes(self, raw: Tensor) -> Tensor:
        n, _, h, w = raw.shape
        dist = F.scale(F.exp(F.minimum(raw, BOX_LOG_CLAMP)), float(STRIDE))
        cy, cx = np.meshgrid((np.arange(h) + 0.5) * STRIDE, (np.arange(w) + 0.5) * STRIDE, indexing="ij")
        cx_t = Tensor(np.broadcast_to(cx, (n, 1, h, w)).copy())
        cy_t = Tensor(np.broadcast_to(cy, (n, 1, h, w)).copy())
        return F.concat(
            [
                F.sub(cx_t, dist[:, 0:1]),
                F.sub(cy_t, dist[:, 1:2]),
                F.add(cx_t, dist[:, 2:3]),
                F.add(cy_t, dist[:, 3:4]),
            ],
            axis=1,
        )

    def forward(self, images: Union[Tensor, np.ndarray], epoch: int = 0) -> DetectorOutput:
        """
        Args:
            images: N × 1 × S × S (S는 8의 배수)
            epoch: NAF 온도 계산용

        Returns:
            DetectorOutput (객체성 N×2×S/4×S/4, box corner N×4×S/4×S/4, mask N×2×S×S)
        """
        x = images if isinstance(images, Tensor) else Tensor(np.asarray(images, dtype=np.float64))
        if x.ndim != 4 or x.shape[1] != 1 or x.shape[2] % 8 or x.shape[3] % 8:
            raise ShapeError(f"TinyDetector: 입력은 N×1×S×S (S는 8의 배수)여야 합니다 ({x.shape})")

        s0 = F.relu(self._conv(x, "stem", epoch))
        s1 = F.relu(self._conv(s0, "stage1_conv", epoch))
        s2 = F.relu(self._conv(s1, "stage2_conv1", epoch))
        s2 = F.relu(self._conv(s2, "stage2_conv2", epoch))
        s3 = F.relu(self._conv(s2, "stage3_conv", epoch))

        n1 = F.relu(self._pointwise(s3, "neck_reduce"))
        neck = F.relu(self._pointwise(F.concat([F.upsample_nearest(n1, 2), s2], axis=1), "neck_fuse"))
        if self.attention is not None:
            neck = triple_attention(neck, self.attention)

        obj = self._pointwise(neck, "head_obj")
        boxes = self._decode_boxes(self._pointwise(neck, "head_box"))
        mask = self._pointwise(F.concat([F.upsample_nearest(neck, 2), s0], axis=1), "head_mask")
        return DetectorOutput(obj_logits=obj, boxes=boxes, mask_logits=F.upsample_nearest(mask, 2))

    # ------------------------------------------------------------------
    # 학습 목표
    # ------------------------------------------------------------------
    def loss(
        self,
        output: DetectorOutput,
        samples: Sequence[CrackSample],
        loss_cfg: LossConfig,
    ) -> LossTerms:
        """객체성 WCE + 양성 셀 box 손실 + mask WCE"""
        n, _, gh, gw = output.obj_logits.shape
        obj_target = np.zeros((n, gh, gw), dtype=np.int64)
        cells: List[Tuple[int, int, int]] = []
        gt_boxes: List[Tuple[float, float, float, float]] = []
        for b, sample in enumerate(samples):
            for box in sample.boxes:
                cx, cy = box.center
                i = min(int(cy // STRIDE), gh - 1)
                j = min(int(cx // STRIDE), gw - 1)
                if obj_target[b, i, j]:
                    continue
                obj_target[b, i, j] = 1
                cells.append((b, i, j))
                gt_boxes.append(box.as_tuple())

        obj_loss = weighted_cross_entropy(output.obj_logits, obj_target, WceConfig(weights=self.cfg.obj_weights))
        mask_target = np.stack([s.mask.astype(np.int64) for s in samples])
        mask_loss = weighted_cross_entropy(output.mask_logits, mask_target, WceConfig(weights=self.cfg.mask_weights))
        total = F.add(obj_loss, F.scale(mask_loss, self.cfg.mask_weight))

        box_value = 0.0
        if cells:
            idx = tuple(np.array(axis, dtype=np.int64) for axis in zip(*cells))
            per_cell = F.transpose(output.boxes, (0, 2, 3, 1))
            pred = F.getitem(per_cell, idx)
            b_loss = box_loss(loss_cfg.kind, pred, np.array(gt_boxes), loss_cfg)
            box_value = b_loss.item()
            total = F.add(total, F.scale(b_loss, self.cfg.box_weight))
        return LossTerms(
            total=total, obj=obj_loss.item(), box=box_value, mask=mask_loss.item(), positives=len(cells)
        )

    # ------------------------------------------------------------------
    # 추론
    # ------------------------------------------------------------------
    def predict(
        self,
        samples: Sequence[CrackSample],
        epoch: int = 0,
        top_k: int = 20,
        score_floor: float = 1e-3,
        batch: int = 16,
    ) -> Tuple[List[Detection], List[np.ndarray]]:
        """
        검출 목록과 예측 mask

        Returns:
            (점수 상위 top_k 셀의 Detection 목록, 샘플별 bool mask)
        """
        detections: List[Detection] = []
        masks: List[np.ndarray] = []
        for start in range(0, len(samples), batch):
            chunk = samples[start : start + batch]
            images = np.stack([s.image for s in chunk])[:, None]
            out = self.forward(images, epoch)
            probs = np.exp(F.log_softmax(out.obj_logits, axis=1).data[:, 1])
            boxes = out.boxes.data
            pred_mask = out.mask_logits.data[:, 1] > out.mask_logits.data[:, 0]
            size = images.shape[-1]
            for b, sample in enumerate(chunk):
                flat = probs[b].reshape(-1)
                order = np.argsort(-flat, kind="stable")[:top_k]
                for cell in order:
                    score = float(flat[cell])
                    if score < score_floor:
                        break
                    i, j = divmod(int(cell), probs.shape[2])
                    x1, y1, x2, y2 = np.clip(boxes[b, :, i, j], 0.0, float(size))
                    if x2 - x1 <= 0 or y2 - y1 <= 0:
                        continue
                    detections.append(
                        Detection(box=Box(x1=x1, y1=y1, x2=x2, y2=y2), score=min(score, 1.0), image_id=sample.sample_id)
                    )
                masks.append(pred_mask[b])
        return detections, masks

    # ------------------------------------------------------------------
    # checkpoint
    # ------------------------------------------------------------------
    def save(self, directory: Union[str, Path]) -> Path:
        """정적 파라미터 CKT1 + stage별 warehouse + attention checkpoint"""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name, tensor in self.params.items():
            save_tensor(directory / f"{name}.ckt", tensor)
        for stage_id, warehouse in self.warehouses.items():
            save_warehouse(directory / stage_id, warehouse, self.naf_cfg)
        if self.attention is not None:
            save_attention(directory / "attention", self.attention)
        return write_json(
            directory / "model.json",
            {"config": self.cfg.model_dump(), "params": sorted(self.params), "num_params": self.num_params},
        )
