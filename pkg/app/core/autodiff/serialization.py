"""
텐서 바이너리 직렬화 (CKT1)
단일 책임: 텐서 ↔ 평면 바이너리 변환

형식: magic b"CKT1", u8 rank, little-endian u64 extent × rank, little-endian f64 data
"""
import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..exceptions import DataFormatError
from .tensor import MAX_RANK, Tensor

logger = logging.getLogger(__name__)

MAGIC = b"CKT1"


def tensor_to_bytes(tensor: Union[Tensor, np.ndarray]) -> bytes:
    data = tensor.data if isinstance(tensor, Tensor) else np.asarray(tensor, dtype=np.float64)
    header = MAGIC + struct.pack("<B", data.ndim) + struct.pack(f"<{data.ndim}Q", *data.shape)
    return header + np.ascontiguousarray(data, dtype="<f8").tobytes()


def tensor_from_bytes(raw: bytes, requires_grad: bool = False) -> Tensor:
    """
    CKT1 바이트열을 텐서로 복원

    Raises:
        DataFormatError: magic, rank, extent, 길이가 맞지 않는 경우
    """
    if raw[:4] != MAGIC:
        raise DataFormatError(f"CKT1 magic이 아닙니다: {raw[:4]!r}")
    if len(raw) < 5:
        raise DataFormatError("CKT1 헤더가 잘렸습니다")
    rank = raw[4]
    if rank > MAX_RANK:
        raise DataFormatError(f"CKT1 rank {rank}는 최대 {MAX_RANK}를 넘습니다")
    header_len = 5 + 8 * rank
    if len(raw) < header_len:
        raise DataFormatError("CKT1 extent 헤더가 잘렸습니다")
    shape = struct.unpack(f"<{rank}Q", raw[5:header_len])
    if any(extent == 0 for extent in shape):
        raise DataFormatError(f"CKT1 extent는 1 이상이어야 합니다: {shape}")
    count = int(np.prod(shape)) if rank else 1
    if len(raw) != header_len + 8 * count:
        raise DataFormatError(
            f"CKT1 데이터 길이 불일치: 기대 {8 * count}바이트, 실제 {len(raw) - header_len}바이트"
        )
    data = np.frombuffer(raw, dtype="<f8", offset=header_len).astype(np.float64).reshape(shape)
    return Tensor(data, requires_grad=requires_grad)


def save_tensor(path: Union[str, Path], tensor: Union[Tensor, np.ndarray]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(tensor_to_bytes(tensor))
    logger.debug(f"💾 텐서 저장: {path}")
    return path


def load_tensor(path: Union[str, Path], requires_grad: bool = False) -> Tensor:
    return tensor_from_bytes(Path(path).read_bytes(), requires_grad=requires_grad)
