"""
수렴 경주 실험
"""
import logging
import math
from typing import Optional

import pandas as pd

from ...data.pipeline import CrackDataset
from ...schemas.config import ExperimentConfig
from ..race import ConvergenceTrace, box_regression_race
from .base import BaseExperiment, ExperimentResult
from .cells import run_cells

logger = logging.getLogger(__name__)

# 비교 대상으로 함께 기록하는 수렴 가속 배수
REFERENCE_SPEEDUP = 1.3


def _race_lane(kind: str, cfg: ExperimentConfig) -> ConvergenceTrace:
    return box_regression_race([kind], cfg.race.n_pairs, cfg.race.steps, cfg.race, cfg.sgd, cfg.loss)[kind]


def speedup(traces, baseline: str = "ciou", candidate: str = "fpiou") -> Optional[float]:
    """baseline / candidate 의 median steps_to 비 (둘 다 유한할 때)"""
    if baseline not in traces or candidate not in traces:
        return None
    base, cand = traces[baseline].median_steps_to, traces[candidate].median_steps_to
    if not (math.isfinite(base) and math.isfinite(cand)) or cand == 0:
        return None
    return base / cand


class RaceExperiment(BaseExperiment):
    kind = "race"
    needs_data = False

    def run(self, dataset: Optional[CrackDataset] = None) -> ExperimentResult:
        kinds = list(self.cfg.race.losses)
        lanes = run_cells(_race_lane, [(kind, self.cfg) for kind in kinds], self.max_workers)
        traces = dict(zip(kinds, lanes))

        table = pd.DataFrame([trace.summary() for trace in traces.values()])
        ratio = speedup(traces)
        report = {
            "losses": [trace.summary() for trace in traces.values()],
            "speedup_ciou_over_fpiou": ratio,
            "reference_speedup": REFERENCE_SPEEDUP,
            "n_pairs": self.cfg.race.n_pairs,
            "steps": self.cfg.race.steps,
            "target_iou": self.cfg.race.target_iou,
        }
        parts = [f"{k}: median={t.summary()['median_steps_to']}" for k, t in traces.items()]
        summary = "race " + ", ".join(parts) + (f", ratio={ratio:.3f}" if ratio is not None else "")
        return ExperimentResult(
            kind=self.kind,
            tables={"race.csv": table, "trace.csv": pd.concat([t.to_frame() for t in traces.values()], ignore_index=True)},
            documents={"report.json": report},
            summary=summary,
        )
