"""
Triple attention 테스트
"""
import numpy as np
import pytest

from app.core.attention import (
    ChannelAttentionParams,
    RecurrentGateParams,
    SpatialAttentionParams,
    TripleAttentionParams,
    channel_attention,
    load_attention,
    lstm_step,
    recurrent_branch,
    save_attention,
    spatial_attention,
    triple_attention,
)
from app.core.autodiff import Tensor, check_parameters, parameter
from app.core.autodiff import functional as F
from app.core.exceptions import ShapeError


def unrolled_scan(x: np.ndarray, p: RecurrentGateParams) -> np.ndarray:
    """lstm_step을 픽셀마다 직접 호출하는 row-major 기준 구현"""
    n, c, h, w = x.shape
    hidden = Tensor(np.zeros((n, c)))
    cell = Tensor(np.zeros((n, c)))
    out = np.zeros_like(x)
    for i in range(h):
        for j in range(w):
            hidden, cell = lstm_step(hidden, cell, Tensor(x[:, :, i, j]), p)
            out[:, :, i, j] = hidden.data
    return out


class TestChannelAttention:
    def test_weights_in_unit_interval(self, rng):
        p = ChannelAttentionParams.init(8, 4, rng)
        m = channel_attention(Tensor(rng.normal(size=(2, 8, 5, 5))), p)
        assert m.shape == (2, 8, 1, 1)
        assert np.all((m.data > 0) & (m.data < 1))

    def test_reduction_must_divide(self, rng):
        with pytest.raises(ShapeError):
            ChannelAttentionParams.init(6, 4, rng)

    def test_channel_mismatch(self, rng):
        p = ChannelAttentionParams.init(4, 2, rng)
        with pytest.raises(ShapeError):
            channel_attention(Tensor(rng.normal(size=(1, 8, 3, 3))), p)

    def test_permutation_equivariance(self, rng):
        base = ChannelAttentionParams.init(8, 2, rng)
        p = ChannelAttentionParams(
            r=2, w1=base.w1, b1=Tensor(rng.normal(size=4)), w2=base.w2, b2=Tensor(rng.normal(size=8))
        )
        perm = rng.permutation(8)
        permuted = ChannelAttentionParams(
            r=2,
            w1=Tensor(p.w1.data[:, perm]),
            b1=Tensor(p.b1.data),
            w2=Tensor(p.w2.data[perm]),
            b2=Tensor(p.b2.data[perm]),
        )
        x = rng.normal(size=(2, 8, 4, 5))
        m = channel_attention(Tensor(x), p).data
        m_perm = channel_attention(Tensor(x[:, perm]), permuted).data
        np.testing.assert_allclose(m_perm, m[:, perm], atol=1e-12)


class TestSpatialAttention:
    def test_map_shape(self, rng):
        m = spatial_attention(Tensor(rng.normal(size=(2, 3, 6, 5))), SpatialAttentionParams.init(rng))
        assert m.shape == (2, 1, 6, 5)

    def test_kernel_shape_enforced(self):
        with pytest.raises(ShapeError):
            SpatialAttentionParams(kernel=parameter(np.zeros((1, 2, 3, 3))))


class TestRecurrent:
    def test_scan_matches_unrolled_steps(self, rng):
        p = RecurrentGateParams.init(3, rng)
        x = rng.normal(size=(2, 3, 3, 4))
        np.testing.assert_allclose(recurrent_branch(Tensor(x), p).data, unrolled_scan(x, p), atol=1e-12)

    def test_column_major_is_transposed_row_major(self, rng):
        p = RecurrentGateParams.init(2, rng)
        x = rng.normal(size=(1, 2, 3, 4))
        col = recurrent_branch(Tensor(x), p, "column_major").data
        row_t = recurrent_branch(Tensor(x.transpose(0, 1, 3, 2).copy()), p, "row_major").data
        np.testing.assert_allclose(col, row_t.transpose(0, 1, 3, 2), atol=1e-12)

    def test_candidate_and_cell_state_distinct(self):
        # f=0, i=1, c̃=tanh(b_c), o=1 → c_t = c̃, h_t = tanh(c̃)
        p = RecurrentGateParams.constant(2, weight=0.0, biases={"f": -50.0, "i": 50.0, "c": 0.5, "o": 50.0})
        h, c = lstm_step(Tensor(np.zeros(2)), Tensor(np.full(2, 3.0)), Tensor(np.ones(2)), p)
        np.testing.assert_allclose(c.data, np.tanh(0.5), atol=1e-12)
        np.testing.assert_allclose(h.data, np.tanh(np.tanh(0.5)), atol=1e-12)

    def test_saturated_gates_hold_cell_state(self, rng):
        # f → 1, i → 0 이면 입력과 무관하게 c_t ≈ c_0
        p = RecurrentGateParams.constant(3, weight=0.0, biases={"f": 30.0, "i": -30.0, "c": 0.7, "o": 0.0})
        c0 = rng.normal(size=3)
        h, c = Tensor(np.zeros(3)), Tensor(c0)
        for _ in range(200):
            h, c = lstm_step(h, c, Tensor(rng.normal(size=3)), p)
        np.testing.assert_allclose(c.data, c0, rtol=0, atol=1e-9)

    def test_scan_gradients(self, rng):
        p = RecurrentGateParams.init(2, rng)
        x = parameter(rng.normal(size=(1, 2, 2, 3)))
        w = rng.normal(size=(1, 2, 2, 3))
        params = {"x": x, **p.blocks()}
        errors = check_parameters(lambda: F.sum(F.mul(recurrent_branch(x, p), Tensor(w))), params)
        assert max(errors.values()) < 1e-6

    def test_width_mismatch(self, rng):
        p = RecurrentGateParams.init(3, rng)
        with pytest.raises(ShapeError):
            lstm_step(Tensor(np.zeros(2)), Tensor(np.zeros(2)), Tensor(np.zeros(2)), p)

    def test_unknown_scan(self, rng):
        p = RecurrentGateParams.init(2, rng)
        with pytest.raises(ValueError):
            recurrent_branch(Tensor(rng.normal(size=(1, 2, 2, 2))), p, "diagonal")


class TestTripleAttention:
    def test_fusion_is_mean_of_branches(self, rng):
        params = TripleAttentionParams.init(4, 2, rng)
        x = Tensor(rng.normal(size=(2, 4, 3, 3)))
        m_c = channel_attention(x, params.channel).data
        m_s = spatial_attention(x, params.spatial).data
        rec = recurrent_branch(x, params.recurrent).data
        expected = (x.data * m_c + x.data * m_s + rec) / 3.0
        np.testing.assert_allclose(triple_attention(x, params).data, expected, atol=1e-12)

    def test_block_names(self, rng):
        names = set(TripleAttentionParams.init(4, 2, rng).blocks())
        assert {"channel.w1", "spatial.kernel", "recurrent.w_f", "recurrent.b_o"} <= names
        assert len(names) == 4 + 1 + 8

    def test_all_blocks_receive_gradient(self, rng):
        params = TripleAttentionParams.init(2, 2, rng)
        x = Tensor(rng.normal(size=(1, 2, 3, 3)))
        F.sum(triple_attention(x, params)).backward()
        for name, block in params.blocks().items():
            assert block.grad is not None, name
            assert block.grad.shape == block.shape

    def test_checkpoint_round_trip(self, tmp_path, rng):
        params = TripleAttentionParams.init(4, 2, rng, scan="column_major")
        save_attention(tmp_path / "ta", params)
        loaded = load_attention(tmp_path / "ta")
        assert loaded.scan == "column_major"
        x = Tensor(rng.normal(size=(1, 4, 3, 3)))
        np.testing.assert_array_equal(triple_attention(x, loaded).data, triple_attention(x, params).data)
