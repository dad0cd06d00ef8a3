"""
Perceptual Hash (DCT)
단일 책임: 64비트 이미지 지문 계산, 해밍 거리, 탐욕적 중복 제거
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Union

import numpy as np
from PIL import Image
from scipy.fft import dctn

from .sample import CrackSample

logger = logging.getLogger(__name__)

HASH_SIZE = 8
RESAMPLE_SIZE = 32
DEFAULT_THRESHOLD = 5

try:
    LANCZOS = Image.Resampling.LANCZOS
except AttributeError:
    LANCZOS = Image.LANCZOS


def _as_gray(image: Union[np.ndarray, CrackSample]) -> np.ndarray:
    if isinstance(image, CrackSample):
        image = image.image
    arr = np.asarray(image)
    if arr.dtype == np.uint8:
        return arr.astype(np.float32) / 255.0
    return arr.astype(np.float32)


def phash64(image: Union[np.ndarray, CrackSample]) -> int:
    """
    이미지 perceptual hash 계산

    32×32로 리샘플 → 2-D DCT → 좌상단 8×8 블록 → DC를 제외한 중앙값보다 큰 계수를 1로.
    64비트는 row-major로 채워집니다 (첫 계수가 최상위 비트).

    Args:
        image: 2-D 흑백 배열 ([0,1] 실수 또는 uint8) 또는 CrackSample

    Returns:
        u64 정수
    """
    gray = _as_gray(image)
    if gray.ndim != 2:
        raise ValueError(f"phash64: 2차원 흑백 이미지가 필요합니다 (shape={gray.shape})")
    resized = Image.fromarray(gray).resize((RESAMPLE_SIZE, RESAMPLE_SIZE), LANCZOS)
    coeffs = dctn(np.asarray(resized, dtype=np.float64), type=2, norm="ortho")
    block = coeffs[:HASH_SIZE, :HASH_SIZE]
    median = np.median(block.reshape(-1)[1:])
    bits = (block > median).reshape(-1)
    value = 0
    for bit in bits:
        value = (value << 1) | int(bit)
    return value


def hamming(a: int, b: int) -> int:
    return bin((a ^ b) & 0xFFFFFFFFFFFFFFFF).count("1")


@dataclass
class DedupResult:
    kept: List[int] = field(default_factory=list)
    # 버린 인덱스 → 원인이 된 (먼저 남겨진) 인덱스
    dropped: Dict[int, int] = field(default_factory=dict)


def dedup_hashes(hashes: Sequence[int], threshold: int = DEFAULT_THRESHOLD) -> DedupResult:
    """
    입력 순서대로 훑으며 앞서 남긴 hash와 거리 ≤ threshold 이면 버림

    비교 대상은 남겨진 샘플뿐이므로 A~B, B~C, A≁C 이면 C는 A하고만 비교됩니다.
    """
    if not 0 <= threshold <= 64:
        raise ValueError(f"threshold는 [0, 64] 범위여야 합니다: {threshold}")
    result = DedupResult()
    for idx, h in enumerate(hashes):
        match = next((k for k in result.kept if hamming(hashes[k], h) <= threshold), None)
        if match is None:
            result.kept.append(idx)
        else:
            result.dropped[idx] = match
    return result


def dedup(samples: Sequence[Union[np.ndarray, CrackSample]], threshold: int = DEFAULT_THRESHOLD) -> List[int]:
    """남길 샘플 인덱스 (입력 순서)"""
    result = dedup_hashes([phash64(s) for s in samples], threshold)
    if result.dropped:
        logger.info(f"🔄 중복 제거: {len(samples)}개 중 {len(result.dropped)}개 제외 (threshold={threshold})")
    return result.kept
