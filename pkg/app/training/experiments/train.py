"""
단일 학습 실험
"""
import logging
from typing import Optional

from ...data.pipeline import CrackDataset
from ...metrics.detection import confidence_curves, pr_curve
from ...metrics.matching import match_detections, nms
from ...metrics.predictions import predictions_frame
from ..trainer import train_toy
from .base import BaseExperiment, ExperimentResult

logger = logging.getLogger(__name__)


class TrainExperiment(BaseExperiment):
    kind = "train"

    def run(self, dataset: Optional[CrackDataset] = None) -> ExperimentResult:
        if dataset is None:
            raise ValueError("train 실험에는 데이터셋이 필요합니다")
        cfg = self.cfg
        result = train_toy(dataset, cfg.model, cfg.sgd, cfg.loss, cfg.train, cfg.augment)

        held_out = dataset.subset(cfg.train.eval_split)
        dets, _ = result.model.predict(held_out, epoch=cfg.sgd.epochs - 1, top_k=cfg.train.top_k)
        match = match_detections(nms(dets, cfg.eval.nms_iou), {s.sample_id: s.boxes for s in held_out}, 0.5)

        if self.output_dir:
            result.model.save(self.output_dir / "model")

        final = result.final
        return ExperimentResult(
            kind=self.kind,
            tables={
                "epochs.csv": result.epochs,
                "trace.csv": result.steps,
                "pr_curve.csv": pr_curve(match.tp, match.total_gt, match.scores),
                "confidence.csv": confidence_curves(match),
                "predictions.csv": predictions_frame(dets),
            },
            documents={"report.json": final.model_dump(mode="json")},
            summary=(
                f"train P={final.precision:.3f} R={final.recall:.3f} "
                f"mAP50={final.map50:.3f} mAP50:95={final.map50_95:.3f}"
            ),
        )
