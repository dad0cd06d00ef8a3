"""
자동미분 엔진 테스트
"""
import struct

import numpy as np
import pytest

from app.core.autodiff import (
    Tensor,
    check_parameters,
    finite_diff_check,
    load_tensor,
    parameter,
    save_tensor,
    tensor_from_bytes,
    tensor_to_bytes,
)
from app.core.autodiff import functional as F
from app.core.exceptions import DataFormatError, GradientCheckError, NumericalError, ShapeError


def loop_conv2d(x: np.ndarray, k: np.ndarray, stride: int, padding: int) -> np.ndarray:
    """반복문 기반 cross-correlation 기준 구현"""
    n, c, h, w = x.shape
    o, _, kh, kw = k.shape
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    ho = (h + 2 * padding - kh) // stride + 1
    wo = (w + 2 * padding - kw) // stride + 1
    out = np.zeros((n, o, ho, wo))
    for b in range(n):
        for q in range(o):
            for i in range(ho):
                for j in range(wo):
                    patch = xp[b, :, i * stride : i * stride + kh, j * stride : j * stride + kw]
                    out[b, q, i, j] = np.sum(patch * k[q])
    return out


class TestTensor:
    def test_rank_limit(self):
        with pytest.raises(ShapeError):
            Tensor(np.zeros((1, 1, 1, 1, 1)))

    def test_zero_extent_rejected(self):
        with pytest.raises(ShapeError):
            Tensor(np.zeros((2, 0)))

    def test_scalar_broadcast_only(self):
        a = Tensor(np.ones((2, 3)))
        assert F.add(a, Tensor(2.0)).shape == (2, 3)
        with pytest.raises(ShapeError):
            F.add(a, Tensor(np.ones(3)))

    def test_non_finite_output_raises(self):
        with pytest.raises(NumericalError):
            F.log(Tensor(np.array([0.0, 1.0])))
        with pytest.raises(NumericalError):
            F.div(Tensor(np.ones(2)), Tensor(np.zeros(2)))

    def test_backward_requires_scalar(self):
        x = parameter(np.ones(3))
        with pytest.raises(ShapeError):
            F.scale(x, 2.0).backward()

    def test_fan_out_accumulates(self):
        x = parameter(np.array([1.5, -2.0]))
        y = F.sum(F.add(F.mul(x, x), F.scale(x, 3.0)))
        y.backward()
        np.testing.assert_allclose(x.grad, 2 * x.data + 3.0)

    def test_computation_record_topological(self):
        x = parameter(np.array([0.3, 0.7]))
        record = F.sum(F.sigmoid(F.scale(x, 2.0))).backward()
        assert [e.kind for e in record.entries] == ["scale", "sigmoid", "sum"]
        for entry in record.entries:
            assert all(i < entry.output_id for i in entry.input_ids)
        assert record.root_id == len(record.nodes) - 1


class TestPrimitives:
    @pytest.mark.parametrize("stride,padding", [(1, 0), (1, 1), (2, 1)])
    def test_conv2d_matches_loop(self, rng, stride, padding):
        x = rng.normal(size=(2, 3, 7, 7))
        k = rng.normal(size=(4, 3, 3, 3))
        out = F.conv2d(Tensor(x), Tensor(k), stride=stride, padding=padding).data
        np.testing.assert_allclose(out, loop_conv2d(x, k, stride, padding), atol=1e-12)

    def test_conv2d_is_linear_in_input(self, rng):
        k = Tensor(rng.normal(size=(4, 3, 3, 3)))
        x, y = rng.normal(size=(2, 2, 3, 6, 6))
        a, b = rng.normal(size=2)
        lhs = F.conv2d(Tensor(a * x + b * y), k, padding=1).data
        rhs = a * F.conv2d(Tensor(x), k, padding=1).data + b * F.conv2d(Tensor(y), k, padding=1).data
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)

    def test_conv2d_non_integral_extent(self, rng):
        with pytest.raises(ShapeError):
            F.conv2d(Tensor(rng.normal(size=(1, 1, 6, 6))), Tensor(rng.normal(size=(1, 1, 3, 3))), stride=2)

    def test_conv2d_channel_mismatch(self, rng):
        with pytest.raises(ShapeError):
            F.conv2d(Tensor(rng.normal(size=(1, 2, 5, 5))), Tensor(rng.normal(size=(1, 3, 3, 3))))

    def test_pool_shapes_and_values(self, rng):
        x = rng.normal(size=(2, 3, 4, 5))
        avg = F.pool_spatial(Tensor(x), "avg")
        mx = F.pool_spatial(Tensor(x), "max")
        assert avg.shape == (2, 3, 1, 1)
        np.testing.assert_allclose(avg.data[..., 0, 0], x.mean(axis=(2, 3)))
        np.testing.assert_allclose(mx.data[..., 0, 0], x.max(axis=(2, 3)))
        ch = F.pool_channel(Tensor(x), "max")
        assert ch.shape == (2, 1, 4, 5)
        np.testing.assert_allclose(ch.data[:, 0], x.max(axis=1))

    def test_ramp_gradient_window(self):
        x = parameter(np.array([-0.5, 0.0, 0.25, 1.0, 1.5]))
        F.sum(F.ramp(x, 0.0, 1.0)).backward()
        # lo < x ≤ hi 에서만 1/(hi−lo)
        np.testing.assert_array_equal(x.grad, [0.0, 0.0, 1.0, 1.0, 0.0])

    def test_tile_units_layout(self):
        units = np.arange(2 * 4, dtype=np.float64).reshape(2, 4)
        full = F.tile_units(Tensor(units), (2, 1, 1, 1), (1, 1, 2, 2)).data
        assert full.shape == (2, 1, 2, 2)
        np.testing.assert_array_equal(full[0, 0], [[0, 1], [2, 3]])
        np.testing.assert_array_equal(full[1, 0], [[4, 5], [6, 7]])

    def test_elementwise_dispatch(self):
        x = Tensor(np.array([0.0, 1.0]))
        np.testing.assert_allclose(F.elementwise("tanh", x).data, np.tanh([0.0, 1.0]))
        np.testing.assert_allclose(F.elementwise("scale", x, 3).data, [0.0, 3.0])
        with pytest.raises(ShapeError):
            F.elementwise("softplus", x)

    def test_expand_requires_explicit_shape(self, rng):
        b = parameter(rng.normal(size=(1, 3, 1, 1)))
        out = F.expand(b, (2, 3, 4, 4))
        F.sum(out).backward()
        np.testing.assert_allclose(b.grad, np.full((1, 3, 1, 1), 32.0))
        with pytest.raises(ShapeError):
            F.expand(b, (2, 2, 4, 4))


class TestGradcheck:
    @pytest.mark.parametrize(
        "fn",
        [
            lambda x: F.sum(F.sigmoid(x)),
            lambda x: F.sum(F.mul(F.tanh(x), F.exp(F.scale(x, 0.3)))),
            lambda x: F.sum(F.atan(F.square(x))),
            lambda x: F.sum(F.log_softmax(x, axis=1)[:, 0]),
            lambda x: F.sum(F.upsample_nearest(x, 2)),
        ],
    )
    def test_smooth_ops(self, rng, fn):
        x = Tensor(rng.normal(size=(1, 2, 3, 3)))
        assert finite_diff_check(fn, x) < 1e-6

    def test_conv_parameters(self, rng):
        x = parameter(rng.normal(size=(2, 2, 5, 5)))
        k = parameter(rng.normal(size=(3, 2, 3, 3)))
        w = rng.normal(size=(2, 3, 3, 3))
        errors = check_parameters(
            lambda: F.sum(F.mul(F.conv2d(x, k, stride=2, padding=1), Tensor(w))), {"x": x, "k": k}
        )
        assert set(errors) == {"x", "k"}
        assert max(errors.values()) < 1e-6

    def test_parameters_restored(self, rng):
        x = parameter(rng.normal(size=4))
        before = x.data.copy()
        check_parameters(lambda: F.sum(F.square(x)), {"x": x})
        np.testing.assert_array_equal(x.data, before)

    def test_non_finite_probe_reports_index(self):
        x = parameter(np.array([1.0, 1e-6]))
        with pytest.raises(GradientCheckError) as info:
            check_parameters(lambda: F.sum(F.log(x)), {"x": x}, eps=1e-5)
        assert info.value.index == 1

    def test_eps_must_be_positive(self):
        x = parameter(np.ones(2))
        with pytest.raises(ValueError):
            check_parameters(lambda: F.sum(x), {"x": x}, eps=0.0)


class TestSerialization:
    def test_bytes_layout(self):
        raw = tensor_to_bytes(Tensor(np.array([[1.0, 2.0, 3.0]])))
        assert raw[:4] == b"CKT1"
        assert raw[4] == 2
        assert len(raw) == 5 + 2 * 8 + 3 * 8

    def test_file_round_trip(self, tmp_path, rng):
        data = rng.normal(size=(2, 3, 4))
        path = save_tensor(tmp_path / "t.ckt", data)
        np.testing.assert_array_equal(load_tensor(path).data, data)

    def test_bad_magic(self):
        with pytest.raises(DataFormatError):
            tensor_from_bytes(b"XXXX\x00" + b"\x00" * 8)

    def test_truncated_payload(self):
        raw = tensor_to_bytes(Tensor(np.ones(3)))
        with pytest.raises(DataFormatError):
            tensor_from_bytes(raw[:-1])

    def test_zero_extent_header(self):
        raw = b"CKT1" + bytes([2]) + struct.pack("<2Q", 3, 0)
        with pytest.raises(DataFormatError):
            tensor_from_bytes(raw)
