"""
실험 팩토리
실험 종류 이름에 따라 적절한 실험 인스턴스 생성
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Type

from ...schemas.config import ExperimentConfig
from .ablation import AblationExperiment
from .base import BaseExperiment
from .race import RaceExperiment
from .robust import RobustExperiment
from .train import TrainExperiment

logger = logging.getLogger(__name__)


class ExperimentFactory:
    """
    실험 팩토리 클래스
    """

    _experiments: Dict[str, Type[BaseExperiment]] = {
        "race": RaceExperiment,
        "train": TrainExperiment,
        "ablate": AblationExperiment,
        "robust": RobustExperiment,
    }

    @classmethod
    def create_experiment(
        cls,
        kind: str,
        cfg: ExperimentConfig,
        output_dir: Optional[Path] = None,
        max_workers: int = 1,
    ) -> BaseExperiment:
        """
        실험 인스턴스 생성

        Args:
            kind: 실험 종류 ("race", "train", "ablate", "robust")
            cfg: 실험 설정
            output_dir: 출력 디렉토리
            max_workers: 독립 셀 병렬 프로세스 수

        Returns:
            실험 인스턴스

        Raises:
            ValueError: 지원하지 않는 실험 종류인 경우
        """
        experiment_class = cls._experiments.get(kind.lower())
        if not experiment_class:
            available = ", ".join(cls._experiments.keys())
            raise ValueError(f"지원하지 않는 실험 종류: {kind}. 사용 가능한 종류: {available}")

        logger.info(f"🏭 실험 생성: {kind}")
        return experiment_class(cfg, output_dir=output_dir, max_workers=max_workers)

    @classmethod
    def register_experiment(cls, kind: str, experiment_class: Type[BaseExperiment]) -> None:
        cls._experiments[kind.lower()] = experiment_class
        logger.info(f"📝 실험 등록: {kind}")

    @classmethod
    def get_available_kinds(cls) -> List[str]:
        return list(cls._experiments.keys())
