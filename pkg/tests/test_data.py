"""
합성 균열 데이터 파이프라인 테스트
"""
import numpy as np
import pytest
from PIL import Image

from app.core.exceptions import DataFormatError
from app.data import (
    AugmentConfig,
    AugmentDraw,
    CrackSample,
    apply_augment,
    augment,
    boxes_from_mask,
    build_dataset,
    check_sample,
    dedup_hashes,
    derive_seeds,
    generate,
    generate_many,
    hamming,
    largest_remainder,
    load_dataset,
    phash64,
    read_pgm,
    split,
    subsample,
)
from app.core.losses import Box


class TestGenerator:
    def test_same_seed_same_sample(self):
        a, b = generate(5, 32), generate(5, 32)
        np.testing.assert_array_equal(a.image, b.image)
        np.testing.assert_array_equal(a.mask, b.mask)
        assert a.boxes == b.boxes

    def test_samples_satisfy_box_invariant(self):
        for sample in generate_many(11, 20, size=32):
            assert check_sample(sample) == []
            assert sample.image.min() >= 0.0 and sample.image.max() <= 1.0

    def test_sample_ids_follow_index(self):
        samples = generate_many(3, 4, size=16)
        assert [s.sample_id for s in samples] == [0, 1, 2, 3]
        assert [s.seed for s in samples] == derive_seeds(3, 4)

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            generate(1, 8)


class TestBoxesFromMask:
    def test_overlapping_components_merge(self):
        mask = np.zeros((10, 10), dtype=bool)
        mask[2, 0:6] = True
        mask[2:7, 0] = True
        mask[5, 3] = True
        mask[0, 8] = True
        boxes = boxes_from_mask(mask)
        # (y1, x1) 순서
        assert [b.as_tuple() for b in boxes] == [(8.0, 0.0, 9.0, 1.0), (0.0, 2.0, 6.0, 7.0)]

    def test_diagonal_pixels_are_connected(self):
        mask = np.eye(4, dtype=bool)
        assert [b.as_tuple() for b in boxes_from_mask(mask)] == [(0.0, 0.0, 4.0, 4.0)]

    def test_empty_mask(self):
        assert boxes_from_mask(np.zeros((5, 5), dtype=bool)) == []

    def test_violations_reported(self):
        mask = np.zeros((6, 6), dtype=bool)
        mask[1, 1] = True
        sample = CrackSample(image=np.zeros((6, 6)), mask=mask, boxes=[Box.of((3, 3, 5, 5))])
        violations = check_sample(sample)
        assert len(violations) == 2


class TestSplitting:
    def test_largest_remainder(self):
        assert largest_remainder(10, (7, 2, 1)) == [7, 2, 1]
        assert largest_remainder(11, (7, 2, 1)) == [8, 2, 1]
        assert largest_remainder(2, (1, 1, 1)) == [1, 1, 0]

    def test_split_disjoint_and_covering(self):
        items = list(range(37))
        train, val, test = split(items, seed=3)
        assert (len(train), len(val), len(test)) == tuple(largest_remainder(37, (7, 2, 1)))
        assert sorted(train + val + test) == items

    def test_split_empty(self):
        with pytest.raises(ValueError):
            split([])

    def test_subsample_nested(self):
        items = list(range(100))
        small, large = subsample(items, 0.3, seed=9), subsample(items, 0.5, seed=9)
        assert len(small) == 30
        assert set(small) <= set(large)
        assert sorted(subsample(items, 1.0)) == items

    @pytest.mark.parametrize("fraction", [0.0, -0.2, 1.5])
    def test_subsample_fraction_range(self, fraction):
        with pytest.raises(ValueError):
            subsample([1, 2, 3], fraction)


class TestAugment:
    def test_identity_returns_copy(self):
        sample = generate(2, 32)
        out = apply_augment(sample, AugmentDraw())
        assert out is not sample
        np.testing.assert_array_equal(out.image, sample.image)
        assert out.boxes == sample.boxes

    def test_horizontal_flip(self):
        sample = generate(2, 32)
        out = apply_augment(sample, AugmentDraw(hflip=True))
        np.testing.assert_array_equal(out.mask, sample.mask[:, ::-1])
        assert check_sample(out) == []

    def test_random_augment_keeps_invariant(self, rng):
        cfg = AugmentConfig()
        for seed in range(10):
            out = augment(generate(seed, 32), cfg, rng)
            assert check_sample(out) == []
            assert out.image.min() >= 0.0 and out.image.max() <= 1.0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AugmentConfig(scale=(1.2, 0.8))


class TestDedup:
    def test_identical_images_hash_equal(self):
        sample = generate(4, 32)
        assert hamming(phash64(sample), phash64(sample.image.copy())) == 0

    def test_greedy_against_kept_only(self):
        # 0 ~ 0b111 (거리 3), 0b111 ~ 0b111111 (거리 3), 0 ≁ 0b111111 (거리 6)
        result = dedup_hashes([0, 0b111, 0b111111, 0b1], threshold=3)
        assert result.kept == [0, 2]
        assert result.dropped == {1: 0, 3: 0}

    def test_threshold_range(self):
        with pytest.raises(ValueError):
            dedup_hashes([1, 2], threshold=65)

    def test_exact_duplicates_removed_by_pipeline(self):
        dataset = build_dataset(6, size=32, seed=1, threshold=0)
        assert len(dataset.samples) + len(dataset.dedup.dropped) == 6


class TestDataset:
    def test_splits_cover_kept_samples(self, small_dataset):
        ids = sorted(s.sample_id for s in small_dataset.samples)
        assigned = small_dataset.splits["train"] + small_dataset.splits["val"] + small_dataset.splits["test"]
        assert sorted(assigned) == ids
        assert len(small_dataset.train) == len(small_dataset.splits["train"])

    def test_unknown_split(self, small_dataset):
        with pytest.raises(KeyError):
            small_dataset.subset("holdout")

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            build_dataset(0)


class TestStorage:
    def test_round_trip(self, dataset_dir, small_dataset):
        loaded = load_dataset(dataset_dir)
        assert loaded.splits == small_dataset.splits
        assert loaded.size == small_dataset.size
        original = small_dataset.by_id()
        for sample in loaded.samples:
            ref = original[sample.sample_id]
            np.testing.assert_array_equal(sample.image, ref.image)
            np.testing.assert_array_equal(sample.mask, ref.mask)
            assert sample.boxes == ref.boxes
            assert sample.seed == ref.seed

    def test_bad_header(self, dataset_dir):
        (dataset_dir / "boxes.csv").write_text("id,x1,y1,x2,y2\n")
        with pytest.raises(DataFormatError):
            load_dataset(dataset_dir)

    def test_unknown_sample_id_reports_row(self, dataset_dir):
        (dataset_dir / "boxes.csv").write_text("sample_id,x1,y1,x2,y2\n999,0,0,1,1\n")
        with pytest.raises(DataFormatError) as info:
            load_dataset(dataset_dir)
        assert info.value.row == 2

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DataFormatError):
            load_dataset(tmp_path)

    def test_read_pgm(self, tmp_path):
        pixels = np.array([[0, 128], [255, 64]], dtype=np.uint8)
        Image.fromarray(pixels).save(tmp_path / "crack.pgm")
        np.testing.assert_allclose(read_pgm(tmp_path / "crack.pgm"), pixels / 255.0)

    def test_read_pgm_rejects_other_formats(self, tmp_path):
        Image.fromarray(np.zeros((2, 2), dtype=np.uint8)).save(tmp_path / "crack.png")
        with pytest.raises(DataFormatError):
            read_pgm(tmp_path / "crack.png")
