"""
예측 CSV 입출력
단일 책임: image_id, x1, y1, x2, y2, score 행 ↔ Detection 목록
"""
import logging
from pathlib import Path
from typing import Collection, List, Optional, Sequence, Union

import pandas as pd
from pydantic import ValidationError

from ..core.exceptions import DataFormatError
from ..core.losses.box import Box
from .matching import Detection

logger = logging.getLogger(__name__)

PREDICTION_COLUMNS = ["image_id", "x1", "y1", "x2", "y2", "score"]


def read_predictions(path: Union[str, Path], known_ids: Optional[Collection[int]] = None) -> List[Detection]:
    """
    예측 CSV 읽기 (헤더 필수, 헤더만 있으면 빈 목록)

    Args:
        path: CSV 경로
        known_ids: 허용 image_id 집합 (None이면 검사 생략)

    Raises:
        DataFormatError: 헤더 불일치 또는 잘못된 행 (행 번호는 헤더가 1)
    """
    path = Path(path)
    if not path.is_file():
        raise DataFormatError(f"예측 파일을 찾을 수 없습니다: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise DataFormatError(f"예측 파일이 비어 있습니다 (헤더 필요): {path}") from e
    except pd.errors.ParserError as e:
        raise DataFormatError(f"예측 CSV를 해석할 수 없습니다: {e}") from e
    if [c.strip() for c in frame.columns] != PREDICTION_COLUMNS:
        raise DataFormatError(f"헤더가 {PREDICTION_COLUMNS}와 다릅니다: {list(frame.columns)}", row=1)

    dets: List[Detection] = []
    for row_no, row in enumerate(frame.itertuples(index=False), start=2):
        try:
            image_id = int(row.image_id)
            coords = [float(getattr(row, c)) for c in ("x1", "y1", "x2", "y2")]
            det = Detection(box=Box.of(coords), score=float(row.score), image_id=image_id)
        except (ValueError, ValidationError) as e:
            raise DataFormatError(f"잘못된 예측 행: {e}", row=row_no) from e
        if known_ids is not None and image_id not in known_ids:
            raise DataFormatError(f"데이터셋에 없는 image_id {image_id}", row=row_no)
        dets.append(det)
    logger.info(f"✅ 예측 {len(dets)}개 로드: {path}")
    return dets


def predictions_frame(dets: Sequence[Detection]) -> pd.DataFrame:
    """Detection 목록 → 예측 CSV 표 (read_predictions의 역)"""
    rows = [[d.image_id, *d.box.as_tuple(), d.score] for d in dets]
    return pd.DataFrame(rows, columns=PREDICTION_COLUMNS)
