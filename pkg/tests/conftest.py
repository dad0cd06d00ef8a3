"""
공용 pytest fixture
"""
import logging
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.data.pipeline import build_dataset  # noqa: E402
from app.data.storage import save_dataset  # noqa: E402


@pytest.fixture
def rng() -> np.random.Generator:
    """seed 고정 난수 생성기"""
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_dataset():
    """32×32 합성 균열 12장 (분할 포함)"""
    return build_dataset(12, size=32, seed=7)


@pytest.fixture
def dataset_dir(tmp_path, small_dataset) -> Path:
    """small_dataset을 저장한 디렉토리"""
    directory = tmp_path / "dataset"
    save_dataset(directory, small_dataset)
    return directory


@pytest.fixture
def run_dir(tmp_path) -> Path:
    directory = tmp_path / "run"
    directory.mkdir()
    return directory


@pytest.fixture(autouse=True)
def _quiet_matplotlib():
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    yield
