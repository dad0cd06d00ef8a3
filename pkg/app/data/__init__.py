"""
합성 균열 데이터: 생성, 증강, pHash 중복 제거, 분할, 저장
"""
from .augment import AugmentConfig, AugmentDraw, apply_augment, augment, draw_augment
from .generator import derive_seeds, generate, generate_many
from .phash import DedupResult, dedup, dedup_hashes, hamming, phash64
from .pipeline import SUBSAMPLE_FRACTIONS, CrackDataset, build_dataset, largest_remainder, split, subsample
from .sample import CrackSample, Difficulty, boxes_from_mask, check_sample
from .storage import load_dataset, read_pgm, save_dataset

__all__ = [
    "AugmentConfig",
    "AugmentDraw",
    "CrackDataset",
    "CrackSample",
    "DedupResult",
    "Difficulty",
    "SUBSAMPLE_FRACTIONS",
    "apply_augment",
    "augment",
    "boxes_from_mask",
    "build_dataset",
    "check_sample",
    "dedup",
    "dedup_hashes",
    "derive_seeds",
    "draw_augment",
    "generate",
    "generate_many",
    "hamming",
    "largest_remainder",
    "load_dataset",
    "phash64",
    "read_pgm",
    "save_dataset",
    "split",
    "subsample",
]
