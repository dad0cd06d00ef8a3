"""Output Utility"""
import json
import logging
from pathlib import Path
from typing import Any, Union

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


def write_json(path: Union[str, Path], data: Any) -> Path:
    """정렬된 키, 들여쓰기 2, 마지막 줄바꿈 포함 JSON 저장"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"💾 저장: {path}")
    return path


def write_csv(path: Union[str, Path], frame: pd.DataFrame) -> Path:
    """쉼표 구분, 헤더 포함, LF 줄바꿈, 고정 실수 형식 CSV 저장"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, sep=",", float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"💾 저장: {path} ({len(frame)}행)")
    return path


def read_json(path: Union[str, Path]) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
