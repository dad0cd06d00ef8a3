"""
Experiment Package
수렴 경주, 학습, ablation, 강건성 실험
"""
from .ablation import ABLATION_FLAGS, AblationExperiment, ablation_run
from .base import BaseExperiment, ExperimentResult
from .cells import run_cells
from .factory import ExperimentFactory
from .race import RaceExperiment
from .robust import RobustExperiment, robustness_run
from .train import TrainExperiment

__all__ = [
    "ABLATION_FLAGS",
    "AblationExperiment",
    "BaseExperiment",
    "ExperimentFactory",
    "ExperimentResult",
    "RaceExperiment",
    "RobustExperiment",
    "TrainExperiment",
    "ablation_run",
    "robustness_run",
    "run_cells",
]
