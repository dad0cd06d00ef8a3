"""
KernelWarehouse 테스트
"""
import numpy as np
import pytest

from app.core.autodiff import Tensor, check_parameters
from app.core.autodiff import functional as F
from app.core.exceptions import NumericalError, ShapeError
from app.core.warehouse import (
    KernelUnitShape,
    LayerSpec,
    NafConfig,
    assemble_kernels,
    build_stage,
    init_masks,
    kwconv_forward,
    load_warehouse,
    mixing_grid,
    naf,
    param_count,
    partition_kernel,
    save_warehouse,
    stage_parameters,
    stage_unit_shape,
    temperature,
)

LAYER = LayerSpec("conv", (4, 2, 3, 3), stride=1, padding=1)


class TestPartition:
    def test_mixed_stage_collapses_to_pointwise_unit(self):
        unit = stage_unit_shape([(128, 64, 3, 3), (256, 128, 3, 3)])
        assert unit.as_tuple() == (64, 64, 1, 1)

    def test_uniform_stage_keeps_spatial_extent(self):
        unit = stage_unit_shape([(32, 32, 3, 3), (32, 32, 3, 3)])
        assert unit.as_tuple() == (32, 32, 3, 3)

    def test_partition_sixteenth(self):
        kernel = (128, 64, 3, 3)
        units = partition_kernel(kernel, 16)
        assert len(units) == 16
        assert units[0].numel * 16 == int(np.prod(kernel))

    def test_partition_indivisible(self):
        with pytest.raises(ShapeError):
            partition_kernel((6, 2, 3, 3), 4)

    def test_mixing_grid(self):
        unit = KernelUnitShape.of((64, 64, 1, 1))
        assert mixing_grid((256, 128, 3, 3), unit) == (4, 2, 3, 3)


class TestNaf:
    def test_rows_normalized_at_zero_temperature(self, rng):
        for _ in range(1000):
            z = rng.normal(size=(4, 6))
            alpha = naf(z, 0.0, np.zeros((4, 6))).data
            np.testing.assert_allclose(np.abs(alpha).sum(axis=1), 1.0, atol=1e-12)

    def test_negative_scores_keep_sign(self):
        z = np.array([[-1.0, 3.0]])
        alpha = naf(z, 0.0, np.zeros((1, 2))).data
        np.testing.assert_allclose(alpha, [[-0.25, 0.75]])

    def test_blend_with_mask(self):
        z = np.array([[1.0, 1.0]])
        beta = np.array([[1.0, 0.0]])
        np.testing.assert_allclose(naf(z, 0.5, beta).data, [[0.75, 0.25]])

    def test_full_temperature_returns_mask(self, rng):
        beta = init_masks(3, 4, 1.0)
        np.testing.assert_array_equal(naf(rng.normal(size=(3, 4)), 1.0, beta).data, beta)

    def test_zero_row_rejected(self):
        z = np.array([[1.0, 2.0], [0.0, 0.0]])
        with pytest.raises(NumericalError) as info:
            naf(z, 0.2, np.zeros((2, 2)))
        assert info.value.details["row"] == 1

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            naf(np.ones((2, 3)), 0.0, np.zeros((3, 2)))

    def test_temperature_schedule(self):
        cfg = NafConfig(tau_epochs=10)
        assert temperature(0, cfg) == 1.0
        assert temperature(5, cfg) == pytest.approx(0.5)
        assert temperature(10, cfg) == 0.0
        assert temperature(25, cfg) == 0.0
        assert temperature(3, NafConfig(tau_epochs=0)) == 0.0


class TestMasks:
    def test_dedicated_unit_per_row(self):
        beta = init_masks(3, 5, 1.0, offset=2)
        np.testing.assert_array_equal(beta.sum(axis=1), [1, 1, 1])
        np.testing.assert_array_equal(np.argmax(beta, axis=1), [2, 3, 4])

    def test_fractional_budget_covers_floor(self):
        beta = init_masks(5, 4, 0.5)
        assert int(beta.sum()) == 2
        assert beta[2:].sum() == 0

    def test_budget_exceeded(self):
        with pytest.raises(ShapeError):
            init_masks(4, 3, 1.0)

    def test_offset_wraps_around(self):
        beta = init_masks(3, 4, 1.0, offset=3)
        np.testing.assert_array_equal(np.argmax(beta, axis=1), [3, 0, 1])

    def test_masks_exclusive_within_layer(self, rng):
        layers = [LayerSpec("a", (4, 4, 3, 3), 1, 1), LayerSpec("b", (4, 4, 3, 3), 1, 1)]
        cfg = NafConfig(budget_b=2.0, m=2)
        warehouse = build_stage("s", layers, cfg, rng)
        assert warehouse.n == 4
        for layer_id in ("a", "b"):
            beta = cfg.masks[layer_id]
            np.testing.assert_array_equal(beta.sum(axis=1), [1, 1])
            assert beta.sum(axis=0).max() == 1.0
        # 두 번째 레이어는 첫 레이어 다음 unit부터
        assert (cfg.masks["a"] + cfg.masks["b"]).max() == 1.0


class TestSharing:
    SHAPE = (8, 8, 3, 3)

    def _warehouse_params(self, rng, n_layers, budget_b=1.0, m=1):
        layers = [LayerSpec(f"l{i}", self.SHAPE, 1, 1) for i in range(n_layers)]
        warehouse = build_stage("s", layers, NafConfig(budget_b=budget_b, m=m), rng)
        return warehouse.n, sum(u.size for u in warehouse.parameters())

    @pytest.mark.parametrize("budget_b,m", [(1.0, 1), (1.0, 2), (2.0, 4), (0.5, 4)])
    def test_more_layers_same_warehouse(self, rng, budget_b, m):
        one = self._warehouse_params(rng, 1, budget_b, m)
        assert self._warehouse_params(rng, 2, budget_b, m) == one
        assert self._warehouse_params(rng, 4, budget_b, m) == one

    def test_grows_linearly_in_n(self):
        unit = 8 * 8 * 3 * 3
        layers = [LayerSpec("a", self.SHAPE), LayerSpec("b", self.SHAPE)]
        counts = [param_count(layers, n=n).warehouse for n in (1, 2, 5)]
        assert counts == [unit, 2 * unit, 5 * unit]
        assert param_count([LayerSpec("a", self.SHAPE)], n=5).warehouse == counts[-1]


def _stage(rng, tau_epochs=5):
    cfg = NafConfig(tau_epochs=tau_epochs, budget_b=1.0, m=1)
    warehouse = build_stage("probe", [LAYER], cfg, rng)
    return warehouse, cfg


class TestKwConv:
    def test_one_hot_attention_equals_static_conv(self, rng):
        warehouse, cfg = _stage(rng)
        assert warehouse.unit_shape.as_tuple() == (2, 2, 3, 3)
        owner = np.argmax(cfg.masks["conv"], axis=1)
        static = Tensor(np.concatenate([warehouse.units[j].data for j in owner], axis=0))
        for _ in range(50):
            x = Tensor(rng.normal(size=(2, 2, 5, 5)))
            expected = F.conv2d(x, static, stride=1, padding=1).data
            np.testing.assert_array_equal(kwconv_forward(x, "conv", warehouse, cfg, epoch=0).data, expected)

    def test_per_sample_kernels_after_annealing(self, rng):
        warehouse, cfg = _stage(rng, tau_epochs=2)
        x = Tensor(rng.normal(size=(2, 2, 4, 4)))
        out = kwconv_forward(x, "conv", warehouse, cfg, epoch=5)
        assert out.shape == (2, 4, 4, 4)

        scorer = cfg.scorers["conv"]
        pooled = x.data.mean(axis=(2, 3))
        z = (pooled @ scorer.weight.data.T + scorer.bias.data).reshape(2, 2, warehouse.n)
        for s in range(2):
            kernel = assemble_kernels(warehouse, naf(z[s], 0.0, cfg.masks["conv"]), "conv")
            single = F.conv2d(Tensor(x.data[s : s + 1]), kernel, stride=1, padding=1).data
            np.testing.assert_allclose(out.data[s : s + 1], single, atol=1e-12)

    def test_gradients_reach_units_and_scorers(self, rng):
        warehouse, cfg = _stage(rng, tau_epochs=2)
        x = Tensor(rng.normal(size=(1, 2, 4, 4)))
        params = {f"p{i}": p for i, p in enumerate(stage_parameters(warehouse, cfg))}
        w = rng.normal(size=(1, 4, 4, 4))
        errors = check_parameters(
            lambda: F.sum(F.mul(kwconv_forward(x, "conv", warehouse, cfg, epoch=1), Tensor(w))), params
        )
        assert max(errors.values()) < 1e-5

    def test_channel_mismatch(self, rng):
        warehouse, cfg = _stage(rng)
        with pytest.raises(ShapeError):
            kwconv_forward(Tensor(rng.normal(size=(1, 3, 4, 4))), "conv", warehouse, cfg, epoch=0)

    def test_unknown_layer(self, rng):
        warehouse, cfg = _stage(rng)
        with pytest.raises(KeyError):
            kwconv_forward(Tensor(rng.normal(size=(1, 2, 4, 4))), "missing", warehouse, cfg, epoch=0)

    def test_attention_shape_checked(self, rng):
        warehouse, _ = _stage(rng)
        with pytest.raises(ShapeError):
            assemble_kernels(warehouse, np.ones((3, warehouse.n)), "conv")


class TestParamsAndCheckpoint:
    def test_param_count(self):
        count = param_count([LAYER], n=2, m=1)
        assert count.warehouse == 2 * 2 * 2 * 3 * 3
        # 혼합 위치 2 × n 2 개 출력, 입력 채널 2
        assert count.scorers == 4 * 2 + 4
        assert count.static_total == 4 * 2 * 3 * 3

    def test_two_layer_stage_with_108_units(self):
        layers = [LayerSpec("a", (128, 64, 3, 3), 1, 1), LayerSpec("b", (256, 128, 3, 3), 1, 1)]
        count = param_count(layers, n=108, m=1)
        assert count.warehouse == 108 * 64 * 64
        # 혼합 위치 18개 / 72개, 입력 채널 64 / 128
        assert count.scorers == 18 * 108 * (64 + 1) + 72 * 108 * (128 + 1)
        assert count.static_total == 128 * 64 * 9 + 256 * 128 * 9

    def test_round_trip(self, tmp_path, rng):
        warehouse, cfg = _stage(rng)
        save_warehouse(tmp_path / "wh", warehouse, cfg)
        loaded, loaded_cfg = load_warehouse(tmp_path / "wh")
        assert loaded.n == warehouse.n
        assert loaded.unit_shape == warehouse.unit_shape
        np.testing.assert_array_equal(loaded.bank().data, warehouse.bank().data)
        np.testing.assert_array_equal(loaded_cfg.masks["conv"], cfg.masks["conv"])
        x = Tensor(rng.normal(size=(1, 2, 4, 4)))
        np.testing.assert_array_equal(
            kwconv_forward(x, "conv", loaded, loaded_cfg, epoch=3).data,
            kwconv_forward(x, "conv", warehouse, cfg, epoch=3).data,
        )
