"""
데이터셋 디렉토리 입출력
단일 책임: manifest.json + 샘플별 CKT1 텐서 + boxes.csv 저장/로드, 8비트 PGM 가져오기
"""
import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from PIL import Image, UnidentifiedImageError

from ..core.autodiff.serialization import load_tensor, save_tensor
from ..core.exceptions import DataFormatError
from ..core.losses.box import Box
from ..core.utils.io import read_json, write_csv, write_json
from .pipeline import CrackDataset
from .sample import CrackSample

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
BOXES = "boxes.csv"
BOX_COLUMNS = ["sample_id", "x1", "y1", "x2", "y2"]


def _sample_name(sample_id: int) -> str:
    return f"{sample_id:06d}.ckt"


def save_dataset(directory: Union[str, Path], dataset: CrackDataset) -> Path:
    """
    데이터셋을 디렉토리로 저장

    Returns:
        manifest 경로
    """
    directory = Path(directory)
    try:
        (directory / "images").mkdir(parents=True, exist_ok=True)
        (directory / "masks").mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"데이터셋 디렉토리를 만들 수 없습니다: {directory} ({e})") from e

    rows = []
    for sample in dataset.samples:
        name = _sample_name(sample.sample_id)
        save_tensor(directory / "images" / name, sample.image)
        save_tensor(directory / "masks" / name, sample.mask.astype(np.float64))
        rows.extend([sample.sample_id, *b.as_tuple()] for b in sample.boxes)
    frame = pd.DataFrame(rows, columns=BOX_COLUMNS).astype({"sample_id": np.int64})
    write_csv(directory / BOXES, frame)

    manifest = {
        "seed": dataset.seed,
        "size": dataset.size,
        "count": len(dataset.samples),
        "samples": [{"sample_id": s.sample_id, "seed": s.seed} for s in dataset.samples],
        "splits": dataset.splits,
        "split_sizes": {name: len(ids) for name, ids in dataset.splits.items()},
    }
    if dataset.dedup is not None:
        manifest["dropped"] = {str(k): v for k, v in sorted(dataset.dedup.dropped.items())}
    path = write_json(directory / MANIFEST, manifest)
    logger.info(f"💾 데이터셋 저장 완료: {directory} (샘플 {len(dataset.samples)}개)")
    return path


def load_dataset(directory: Union[str, Path]) -> CrackDataset:
    directory = Path(directory)
    if not (directory / MANIFEST).exists():
        raise DataFormatError(f"{directory}에 {MANIFEST}가 없습니다")
    manifest = read_json(directory / MANIFEST)
    boxes = pd.read_csv(directory / BOXES)
    if list(boxes.columns) != BOX_COLUMNS:
        raise DataFormatError(f"{BOXES} 헤더가 {BOX_COLUMNS}와 다릅니다: {list(boxes.columns)}")

    by_id = {sid: [] for sid in (int(e["sample_id"]) for e in manifest["samples"])}
    for row_no, row in enumerate(boxes.itertuples(index=False), start=2):
        if int(row.sample_id) not in by_id:
            raise DataFormatError(f"알 수 없는 sample_id {row.sample_id}", row=row_no)
        try:
            by_id[int(row.sample_id)].append(Box.of((row.x1, row.y1, row.x2, row.y2)))
        except ValueError as e:
            raise DataFormatError(f"잘못된 box: {e}", row=row_no) from e

    samples = []
    for entry in manifest["samples"]:
        sid = int(entry["sample_id"])
        name = _sample_name(sid)
        samples.append(
            CrackSample(
                image=load_tensor(directory / "images" / name).data,
                mask=load_tensor(directory / "masks" / name).data > 0.5,
                boxes=by_id[sid],
                seed=int(entry["seed"]),
                sample_id=sid,
            )
        )
    splits = {name: [int(i) for i in ids] for name, ids in manifest["splits"].items()}
    logger.info(f"✅ 데이터셋 로드: {directory} (샘플 {len(samples)}개)")
    return CrackDataset(samples=samples, splits=splits, size=int(manifest["size"]), seed=int(manifest["seed"]))


def read_pgm(path: Union[str, Path]) -> np.ndarray:
    """
    8비트 PGM을 [0, 1] 실수 이미지로 읽기

    Raises:
        DataFormatError: PGM이 아니거나 8비트 흑백이 아닌 경우
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.format != "PPM" or img.mode != "L":
                raise DataFormatError(f"8비트 PGM만 지원합니다: {path} (format={img.format}, mode={img.mode})")
            return np.asarray(img, dtype=np.float64) / 255.0
    except (UnidentifiedImageError, OSError) as e:
        raise DataFormatError(f"PGM 읽기 실패: {path} ({e})") from e
