"""
절차적 균열 이미지 생성기
단일 책임: seed → (이미지, mask, box) 샘플 생성
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image, ImageDraw
from scipy import ndimage

from .sample import CrackSample, Difficulty, boxes_from_mask

logger = logging.getLogger(__name__)

MIN_SIZE = 16
BACKGROUND_LEVEL = 0.62
HEADING_JITTER = 0.35
SEGMENT_POINTS = 6


def _background(rng: np.random.Generator, size: int, amplitude: float) -> np.ndarray:
    coarse = ndimage.gaussian_filter(rng.normal(0.0, 1.0, (size, size)), sigma=3.0)
    coarse /= max(np.abs(coarse).max(), 1e-12)
    fine = rng.normal(0.0, 0.5, (size, size))
    return BACKGROUND_LEVEL + amplitude * (coarse + 0.3 * fine)


def _random_walk(rng: np.random.Generator, size: int, length: int) -> List[Tuple[float, float]]:
    margin = 0.15 * size
    x, y = rng.uniform(margin, size - margin, 2)
    heading = rng.uniform(0.0, 2.0 * math.pi)
    points = [(float(x), float(y))]
    for _ in range(length):
        heading += rng.normal(0.0, HEADING_JITTER)
        x = float(np.clip(x + math.cos(heading), 0.0, size - 1.0))
        y = float(np.clip(y + math.sin(heading), 0.0, size - 1.0))
        points.append((x, y))
    return points


def _draw_crack(
    draw: ImageDraw.ImageDraw,
    rng: np.random.Generator,
    points: Sequence[Tuple[float, float]],
    thickness: Tuple[int, int],
) -> None:
    """구간마다 두께를 바꿔 가며 polyline 그리기"""
    lo, hi = thickness
    for start in range(0, len(points) - 1, SEGMENT_POINTS):
        segment = list(points[start : start + SEGMENT_POINTS + 1])
        width = int(rng.integers(lo, hi + 1))
        draw.line(segment, fill=255, width=width)
        if width == 1:
            # PIL은 폭 1 선의 끝점을 빠뜨릴 수 있어 점도 찍음
            draw.point(segment, fill=255)


def generate(seed: int, size: int = 64, difficulty: Optional[Difficulty] = None) -> CrackSample:
    """
    seed로 결정되는 균열 샘플 생성

    Args:
        seed: 난수 seed (u64)
        size: 정사각 이미지 한 변 (≥ 16)
        difficulty: 난이도 (None이면 기본값)

    Returns:
        CrackSample (mask와 box는 불변식을 만족)
    """
    if size < MIN_SIZE:
        raise ValueError(f"이미지 크기는 {MIN_SIZE} 이상이어야 합니다: {size}")
    difficulty = difficulty or Difficulty()
    rng = np.random.default_rng(seed)

    background = _background(rng, size, difficulty.texture_amplitude)
    canvas = Image.new("L", (size, size), 0)
    draw = ImageDraw.Draw(canvas)
    n_cracks = int(rng.integers(difficulty.crack_count[0], difficulty.crack_count[1] + 1))
    for _ in range(n_cracks):
        length = int(rng.integers(difficulty.walk_length[0], difficulty.walk_length[1] + 1))
        _draw_crack(draw, rng, _random_walk(rng, size, length), difficulty.thickness)

    mask = np.asarray(canvas) > 0
    shade = ndimage.gaussian_filter(mask.astype(np.float64), sigma=0.5)
    shade = np.maximum(shade, mask.astype(np.float64))
    image = np.clip(background - difficulty.contrast * shade, 0.0, 1.0)

    return CrackSample(image=image, mask=mask, boxes=boxes_from_mask(mask), seed=int(seed))


def derive_seeds(seed: int, count: int) -> List[int]:
    """마스터 seed에서 샘플별 u64 seed 목록 생성"""
    states = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [int(s) for s in states]


def generate_many(
    seed: int,
    count: int,
    size: int = 64,
    difficulty: Optional[Difficulty] = None,
) -> List[CrackSample]:
    samples = []
    for idx, sample_seed in enumerate(derive_seeds(seed, count)):
        sample = generate(sample_seed, size, difficulty)
        sample.sample_id = idx
        samples.append(sample)
    logger.info(f"✅ 합성 균열 샘플 {count}개 생성 (seed={seed}, size={size})")
    return samples
