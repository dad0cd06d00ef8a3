"""
구성 요소 제거 실험
단일 책임: (kwconv, ta, fpiou) 8개 조합을 같은 데이터/seed로 학습하고 표로 정리
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from ...data.pipeline import CrackDataset
from ...metrics.report import EvalReport
from ...schemas.config import ExperimentConfig
from ..trainer import train_toy
from .base import BaseExperiment, ExperimentResult
from .cells import run_cells

logger = logging.getLogger(__name__)

Flags = Tuple[bool, bool, bool]

# 표 행 순서: 기준선, 단일 구성, 두 구성 조합, 전체
ABLATION_FLAGS: Tuple[Flags, ...] = (
    (False, False, False),
    (True, False, False),
    (False, True, False),
    (False, False, True),
    (True, True, False),
    (True, False, True),
    (False, True, True),
    (True, True, True),
)
METRIC_COLUMNS = ("precision", "recall", "map50", "map50_95")


def configure(cfg: ExperimentConfig, flags: Flags) -> ExperimentConfig:
    """플래그 조합 → 설정 (fpiou가 꺼지면 CIoU)"""
    kwconv, ta, fpiou = flags
    return cfg.model_copy(
        update={
            "model": cfg.model.model_copy(update={"kwconv": kwconv, "ta": ta}),
            "loss": cfg.loss.model_copy(update={"kind": "fpiou" if fpiou else "ciou"}),
        }
    )


def _ablation_cell(flags: Flags, dataset: CrackDataset, cfg: ExperimentConfig) -> Tuple[EvalReport, int]:
    cell_cfg = configure(cfg, flags)
    result = train_toy(dataset, cell_cfg.model, cell_cfg.sgd, cell_cfg.loss, cell_cfg.train, cell_cfg.augment)
    return result.final, result.model.num_params


def ablation_run(
    dataset: CrackDataset,
    cfg: ExperimentConfig,
    flags: Sequence[Flags] = ABLATION_FLAGS,
    max_workers: int = 1,
) -> Tuple[pd.DataFrame, List[EvalReport]]:
    """
    Returns:
        (행마다 row, kwconv, ta, fpiou, params와 P/R/mAP50/mAP50:95 열을 가진 표, 행별 EvalReport)
    """
    outputs = run_cells(_ablation_cell, [(f, dataset, cfg) for f in flags], max_workers)
    rows: List[Dict[str, object]] = []
    for i, (f, (report, params)) in enumerate(zip(flags, outputs), start=1):
        kwconv, ta, fpiou = f
        row = {"row": i, "kwconv": kwconv, "ta": ta, "fpiou": fpiou, "params": params}
        row.update({c: getattr(report, c) for c in METRIC_COLUMNS})
        rows.append(row)
        logger.info(f"✅ ablation {i}/{len(flags)} kwconv={kwconv} ta={ta} fpiou={fpiou}: mAP50={report.map50:.3f}")
    return pd.DataFrame(rows), [report for report, _ in outputs]


class AblationExperiment(BaseExperiment):
    kind = "ablate"

    def run(self, dataset: Optional[CrackDataset] = None) -> ExperimentResult:
        if dataset is None:
            raise ValueError("ablate 실험에는 데이터셋이 필요합니다")
        table, reports = ablation_run(dataset, self.cfg, max_workers=self.max_workers)
        best = table.loc[table["map50"].idxmax()]
        return ExperimentResult(
            kind=self.kind,
            tables={"ablation.csv": table},
            documents={"report.json": {"rows": [r.model_dump(mode="json") for r in reports]}},
            summary=f"ablate {len(table)}행, 최고 mAP50={best['map50']:.3f} (행 {int(best['row'])})",
        )
