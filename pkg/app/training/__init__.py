"""
학습 하네스: SGD, 소형 검출기, 수렴 경주, 학습 루프

실험 등록/실행은 `app.training.experiments`에 있습니다.
"""
from .model import DetectorOutput, LossTerms, ModelConfig, TinyDetector
from .optim import SgdConfig, SgdState, clip_grad_norm, sgd_step
from .race import ConvergenceTrace, RaceConfig, box_regression_race, make_pairs
from .trainer import TrainConfig, TrainResult, ema, evaluate_model, train_toy

__all__ = [
    "ConvergenceTrace",
    "DetectorOutput",
    "LossTerms",
    "ModelConfig",
    "RaceConfig",
    "SgdConfig",
    "SgdState",
    "TinyDetector",
    "TrainConfig",
    "TrainResult",
    "box_regression_race",
    "clip_grad_norm",
    "ema",
    "evaluate_model",
    "make_pairs",
    "sgd_step",
    "train_toy",
]
