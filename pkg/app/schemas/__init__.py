"""
설정 / 실행 기록 스키마
"""
from .config import DataConfig, EvalConfig, ExperimentConfig, RobustConfig
from .report import ErrorReport, RunManifest

__all__ = [
    "DataConfig",
    "ErrorReport",
    "EvalConfig",
    "ExperimentConfig",
    "RobustConfig",
    "RunManifest",
]
