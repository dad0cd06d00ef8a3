"""
데이터셋 전처리 파이프라인
단일 책임: 중복 제거 → 7:2:1 분할, 학습 세트 부분 추출
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .generator import generate_many
from .phash import DEFAULT_THRESHOLD, DedupResult, dedup_hashes, phash64
from .sample import CrackSample, Difficulty

logger = logging.getLogger(__name__)

T = TypeVar("T")

SPLIT_NAMES = ("train", "val", "test")
DEFAULT_RATIOS = (7, 2, 1)
SUBSAMPLE_FRACTIONS = (0.3, 0.5, 0.7, 0.9, 1.0)


def largest_remainder(total: int, ratios: Sequence[float]) -> List[int]:
    """비율에 따른 정수 배분 (내림 후 남는 몫은 소수부가 큰 순서, 동률이면 앞쪽)"""
    weight = float(sum(ratios))
    exact = [total * r / weight for r in ratios]
    counts = [int(np.floor(e)) for e in exact]
    order = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[: total - sum(counts)]:
        counts[i] += 1
    return counts


def split(
    dataset: Sequence[T],
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = 42,
) -> Tuple[List[T], List[T], List[T]]:
    """
    seed 셔플 후 연속 구간 분할

    Returns:
        (train, val, test) 서로소이며 합집합은 입력 전체
    """
    if len(dataset) == 0:
        raise ValueError("split: 빈 데이터셋은 분할할 수 없습니다")
    order = np.random.default_rng(seed).permutation(len(dataset))
    counts = largest_remainder(len(dataset), ratios)
    parts, start = [], 0
    for count in counts:
        parts.append([dataset[int(i)] for i in order[start : start + count]])
        start += count
    return parts[0], parts[1], parts[2]


def subsample(train: Sequence[T], fraction: float, seed: int = 42) -> List[T]:
    """
    복원 없는 균등 추출, 크기 round(fraction·n)

    같은 seed의 순열 앞부분을 쓰므로 작은 비율 집합은 큰 비율 집합에 포함됩니다.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction은 (0, 1] 범위여야 합니다: {fraction}")
    n = len(train)
    size = int(np.floor(fraction * n + 0.5))
    order = np.random.default_rng(seed).permutation(n)
    return [train[int(i)] for i in order[:size]]


@dataclass
class CrackDataset:
    """샘플 목록과 분할 배정 (sample_id 기준)"""

    samples: List[CrackSample]
    splits: Dict[str, List[int]] = field(default_factory=dict)
    size: int = 64
    seed: int = 42
    dedup: Optional[DedupResult] = None

    def by_id(self) -> Dict[int, CrackSample]:
        return {s.sample_id: s for s in self.samples}

    def subset(self, name: str) -> List[CrackSample]:
        if name not in self.splits:
            raise KeyError(f"분할 '{name}'이 없습니다 (가능: {list(self.splits)})")
        lookup = self.by_id()
        return [lookup[i] for i in self.splits[name]]

    @property
    def train(self) -> List[CrackSample]:
        return self.subset("train")

    @property
    def val(self) -> List[CrackSample]:
        return self.subset("val")

    @property
    def test(self) -> List[CrackSample]:
        return self.subset("test")


def build_dataset(
    count: int,
    size: int = 64,
    seed: int = 42,
    difficulty: Optional[Difficulty] = None,
    threshold: int = DEFAULT_THRESHOLD,
    ratios: Sequence[float] = DEFAULT_RATIOS,
) -> CrackDataset:
    """
    생성 → pHash 중복 제거 → 분할

    Args:
        count: 생성할 샘플 수 (≥ 1)
        size: 이미지 크기
        seed: 마스터 seed
        difficulty: 난이도
        threshold: 해밍 거리 임계값
        ratios: train:val:test 비율

    Returns:
        CrackDataset
    """
    if count < 1:
        raise ValueError(f"count는 1 이상이어야 합니다: {count}")
    samples = generate_many(seed, count, size, difficulty)
    result = dedup_hashes([phash64(s) for s in samples], threshold)
    kept = [samples[i] for i in result.kept]
    train, val, test = split([s.sample_id for s in kept], ratios, seed)
    logger.info(
        f"✅ 데이터셋 구성: 생성 {count}, 중복 제외 {len(result.dropped)}, "
        f"분할 {len(train)}/{len(val)}/{len(test)}"
    )
    return CrackDataset(
        samples=kept,
        splits={"train": train, "val": val, "test": test},
        size=size,
        seed=seed,
        dedup=result,
    )
