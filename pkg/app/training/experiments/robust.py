"""
강건성 실험
단일 책임: 학습 세트 비율 스윕, 증강 유무 비교 (평가 세트는 고정)
"""
import logging
from typing import List, Optional, Tuple

import pandas as pd

from ...data.pipeline import CrackDataset
from ...metrics.report import EvalReport
from ...schemas.config import ExperimentConfig
from ..trainer import train_toy
from .base import BaseExperiment, ExperimentResult
from .cells import run_cells

logger = logging.getLogger(__name__)

SUBSAMPLE_COLUMNS = ("precision", "recall", "pixel_iou", "dice")
AUGMENT_COLUMNS = ("precision", "recall", "pixel_iou", "dice", "mdr", "fdr")


def _robust_cell(dataset: CrackDataset, cfg: ExperimentConfig, fraction: float, augment: bool) -> Tuple[EvalReport, int]:
    train_cfg = cfg.train.model_copy(update={"fraction": fraction, "augment": augment})
    result = train_toy(dataset, cfg.model, cfg.sgd, cfg.loss, train_cfg, cfg.augment)
    return result.final, result.train_size


def robustness_run(
    kind: str,
    dataset: CrackDataset,
    cfg: ExperimentConfig,
    max_workers: int = 1,
) -> Tuple[pd.DataFrame, List[EvalReport]]:
    """
    Args:
        kind: subsample (비율 오름차순 행) | augment (No, Yes 두 행)

    Returns:
        (표, 행별 EvalReport)
    """
    if kind == "subsample":
        fractions = sorted(cfg.robust.fractions)
        cells = [(dataset, cfg, f, cfg.train.augment) for f in fractions]
    elif kind == "augment":
        cells = [(dataset, cfg, cfg.train.fraction, flag) for flag in (False, True)]
    else:
        raise ValueError(f"알 수 없는 robust 종류: {kind} (가능: subsample, augment)")

    outputs = run_cells(_robust_cell, cells, max_workers)
    rows = []
    for (_, _, fraction, augment), (report, train_size) in zip(cells, outputs):
        if kind == "subsample":
            row = {"fraction": fraction, "train_size": train_size}
            columns = SUBSAMPLE_COLUMNS
        else:
            row = {"augment": "Yes" if augment else "No"}
            columns = AUGMENT_COLUMNS
        row.update({c: getattr(report, c) for c in columns})
        rows.append(row)
    logger.info(f"✅ robust({kind}) 완료: {len(rows)}행")
    return pd.DataFrame(rows), [report for report, _ in outputs]


class RobustExperiment(BaseExperiment):
    kind = "robust"

    def run(self, dataset: Optional[CrackDataset] = None) -> ExperimentResult:
        if dataset is None:
            raise ValueError("robust 실험에는 데이터셋이 필요합니다")
        kind = self.cfg.robust.kind
        table, reports = robustness_run(kind, dataset, self.cfg, self.max_workers)
        return ExperimentResult(
            kind=self.kind,
            tables={f"robust_{kind}.csv": table},
            documents={"report.json": {"kind": kind, "rows": [r.model_dump(mode="json") for r in reports]}},
            summary=f"robust({kind}) {len(table)}행",
        )
