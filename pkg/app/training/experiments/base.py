"""
Base Experiment Abstract Class
모든 실험 종류의 기본 인터페이스와 결과 저장
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from ...core.utils.io import write_csv, write_json
from ...data.pipeline import CrackDataset
from ...schemas.config import ExperimentConfig

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    """
    실험 산출물

    tables와 documents의 키는 출력 디렉토리 안의 파일 이름입니다.
    """

    kind: str
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    documents: Dict[str, Any] = field(default_factory=dict)
    summary: str = ""


class BaseExperiment(ABC):
    """
    실험 기본 추상 클래스
    모든 실험은 이 클래스를 상속받아 구현
    """

    kind: str = "experiment"
    needs_data: bool = True

    def __init__(self, cfg: ExperimentConfig, output_dir: Optional[Path] = None, max_workers: int = 1):
        """
        Args:
            cfg: 실험 설정
            output_dir: 결과 저장 디렉토리
            max_workers: 독립 셀 병렬 프로세스 수
        """
        self.cfg = cfg
        self.max_workers = max_workers
        self.output_dir = Path(output_dir) if output_dir else None
        if self.output_dir:
            self.output_dir.mkdir(parents=True, exist_ok=True)

    @abstractmethod
    def run(self, dataset: Optional[CrackDataset] = None) -> ExperimentResult:
        """
        실험 실행 (추상 메서드)

        Returns:
            ExperimentResult
        """

    def save_results(self, result: ExperimentResult) -> List[Path]:
        """
        실험 결과를 파일로 저장

        Args:
            result: 저장할 결과

        Returns:
            저장된 파일 경로 목록
        """
        if not self.output_dir:
            raise ValueError("output_dir가 설정되지 않았습니다.")

        paths = []
        for filename, frame in result.tables.items():
            paths.append(write_csv(self.output_dir / filename, frame))
        for filename, document in result.documents.items():
            paths.append(write_json(self.output_dir / filename, document))
        logger.info(f"💾 {self.kind} 결과 저장: {self.output_dir} (파일 {len(paths)}개)")
        return paths
