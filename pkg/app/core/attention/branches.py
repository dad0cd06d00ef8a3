"""
Triple attention branch 연산
단일 책임: channel/spatial attention, LSTM 스텝과 공간 스캔, 세 branch 융합
"""
import logging
from typing import Tuple

import numpy as np
from scipy.special import expit

from ..autodiff import functional as F
from ..autodiff.tensor import Function, Tensor
from ..exceptions import ShapeError
from .params import (
    GATES,
    SPATIAL_KERNEL,
    ChannelAttentionParams,
    RecurrentGateParams,
    SpatialAttentionParams,
    TripleAttentionParams,
)

logger = logging.getLogger(__name__)


def _shared_mlp(v: Tensor, p: ChannelAttentionParams) -> Tensor:
    return F.linear(F.relu(F.linear(v, p.w1, p.b1)), p.w2, p.b2)


def channel_attention(x: Tensor, p: ChannelAttentionParams) -> Tensor:
    """
    M_c = σ(MLP(AvgPool(F)) + MLP(MaxPool(F)))

    Args:
        x: N × C × H × W
        p: 공유 MLP 파라미터

    Returns:
        N × C × 1 × 1 가중치 (0, 1)
    """
    if x.ndim != 4:
        raise ShapeError(f"channel attention: N×C×H×W 입력이 필요합니다 ({x.shape})")
    n, c = x.shape[0], x.shape[1]
    if c % p.r != 0 or c != p.channels:
        raise ShapeError(f"channel attention: 입력 C={c}, 파라미터 C={p.channels}, r={p.r} 불일치")
    avg = F.reshape(F.pool_spatial(x, "avg"), (n, c))
    mx = F.reshape(F.pool_spatial(x, "max"), (n, c))
    scores = F.add(_shared_mlp(avg, p), _shared_mlp(mx, p))
    return F.reshape(F.sigmoid(scores), (n, c, 1, 1))


def spatial_attention(x: Tensor, p: SpatialAttentionParams) -> Tensor:
    """M_s = σ(f7×7([AvgPool_c(F); MaxPool_c(F)])), padding 3 / stride 1"""
    pooled = F.concat([F.pool_channel(x, "avg"), F.pool_channel(x, "max")], axis=1)
    return F.sigmoid(F.conv2d(pooled, p.kernel, stride=1, padding=SPATIAL_KERNEL // 2))


def lstm_step(
    h_prev: Tensor,
    c_prev: Tensor,
    x_t: Tensor,
    p: RecurrentGateParams,
) -> Tuple[Tensor, Tensor]:
    """
    LSTM 한 스텝 (후보 상태 c̃와 셀 상태 c_t는 별개)

    벡터(C) 또는 배치(N × C) 입력을 받습니다.
    """
    c = p.channels
    for name, t in (("h_prev", h_prev), ("c_prev", c_prev), ("x_t", x_t)):
        if t.shape[-1] != c:
            raise ShapeError(f"lstm_step: {name} 폭 {t.shape[-1]} ≠ C={c}")
    if not (h_prev.shape == c_prev.shape == x_t.shape):
        raise ShapeError(f"lstm_step: 상태/입력 shape 불일치 {h_prev.shape}, {c_prev.shape}, {x_t.shape}")
    z = F.concat([h_prev, x_t], axis=-1)
    f_t = F.sigmoid(F.linear(z, p.w_f, p.b_f))
    i_t = F.sigmoid(F.linear(z, p.w_i, p.b_i))
    c_hat = F.tanh(F.linear(z, p.w_c, p.b_c))
    c_t = F.add(F.mul(f_t, c_prev), F.mul(i_t, c_hat))
    o_t = F.sigmoid(F.linear(z, p.w_o, p.b_o))
    h_t = F.mul(o_t, F.tanh(c_t))
    return h_t, c_t


def _to_sequence(x: np.ndarray, scan: str) -> np.ndarray:
    n, c, h, w = x.shape
    if scan == "row_major":
        return x.transpose(0, 2, 3, 1).reshape(n, h * w, c)
    return x.transpose(0, 3, 2, 1).reshape(n, w * h, c)


def _from_sequence(seq: np.ndarray, shape: Tuple[int, int, int, int], scan: str) -> np.ndarray:
    n, c, h, w = shape
    if scan == "row_major":
        return seq.reshape(n, h, w, c).transpose(0, 3, 1, 2)
    return seq.reshape(n, w, h, c).transpose(0, 3, 2, 1)


class LstmScan(Function):
    """
    픽셀 시퀀스 전체에 대한 LSTM (시간 역전파 포함)

    입력 순서: F, W_f, b_f, W_i, b_i, W_c, b_c, W_o, b_o
    """

    kind = "lstm_scan"

    def forward(self, x, wf, bf, wi, bi, wc, bc, wo, bo, scan: str = "row_major"):
        seq = _to_sequence(x, scan)
        n, steps, c = seq.shape
        weights = (wf, wi, wc, wo)
        biases = (bf, bi, bc, bo)

        h = np.zeros((n, c))
        cell = np.zeros((n, c))
        outputs = np.empty((n, steps, c))
        cache = []
        for t in range(steps):
            z = np.concatenate([h, seq[:, t, :]], axis=1)
            f_t = expit(z @ weights[0].T + biases[0])
            i_t = expit(z @ weights[1].T + biases[1])
            g_t = np.tanh(z @ weights[2].T + biases[2])
            o_t = expit(z @ weights[3].T + biases[3])
            c_prev = cell
            cell = f_t * c_prev + i_t * g_t
            tanh_c = np.tanh(cell)
            h = o_t * tanh_c
            outputs[:, t, :] = h
            cache.append((z, f_t, i_t, g_t, o_t, c_prev, tanh_c))

        self.saved.update(cache=cache, weights=weights, shape=x.shape, scan=scan)
        return np.ascontiguousarray(_from_sequence(outputs, x.shape, scan))

    def backward(self, grad):
        cache, weights = self.saved["cache"], self.saved["weights"]
        shape, scan = self.saved["shape"], self.saved["scan"]
        d_out = _to_sequence(grad, scan)
        n, steps, c = d_out.shape

        dw = [np.zeros_like(w) for w in weights]
        db = [np.zeros(c) for _ in weights]
        dx_seq = np.zeros((n, steps, c))
        dh_next = np.zeros((n, c))
        dc_next = np.zeros((n, c))

        for t in reversed(range(steps)):
            z, f_t, i_t, g_t, o_t, c_prev, tanh_c = cache[t]
            dh = d_out[:, t, :] + dh_next
            do = dh * tanh_c
            dc = dh * o_t * (1.0 - tanh_c * tanh_c) + dc_next
            pre = (
                dc * c_prev * f_t * (1.0 - f_t),
                dc * g_t * i_t * (1.0 - i_t),
                dc * i_t * (1.0 - g_t * g_t),
                do * o_t * (1.0 - o_t),
            )
            dz = np.zeros_like(z)
            for k, dp in enumerate(pre):
                dw[k] += dp.T @ z
                db[k] += dp.sum(axis=0)
                dz += dp @ weights[k]
            dc_next = dc * f_t
            dh_next = dz[:, :c]
            dx_seq[:, t, :] = dz[:, c:]

        dx = np.ascontiguousarray(_from_sequence(dx_seq, shape, scan))
        return (dx, dw[0], db[0], dw[1], db[1], dw[2], db[2], dw[3], db[3])


def recurrent_branch(x: Tensor, p: RecurrentGateParams, scan: str = "row_major") -> Tensor:
    """
    픽셀을 스캔 순서대로 LSTM에 통과시킨 hidden 시퀀스 (초기 h, c는 0)

    Args:
        x: N × C × H × W
        p: 게이트 파라미터 (C = 입력 채널 수)
        scan: row_major | column_major

    Returns:
        N × C × H × W
    """
    if x.ndim != 4 or x.shape[1] != p.channels:
        raise ShapeError(f"recurrent branch: 입력 {x.shape}의 C가 게이트 폭 {p.channels}와 다릅니다")
    if scan not in ("row_major", "column_major"):
        raise ValueError(f"알 수 없는 scan 순서: {scan}")
    blocks = [getattr(p, f"{kind}_{gate}") for gate in GATES for kind in ("w", "b")]
    return LstmScan.apply(x, *blocks, scan=scan)


def triple_attention(x: Tensor, params: TripleAttentionParams) -> Tensor:
    """
    (F⊙M_c + F⊙M_s + recurrent(F)) / 3

    Returns:
        입력과 같은 shape
    """
    shape = x.shape
    m_c = F.expand(channel_attention(x, params.channel), shape)
    m_s = F.expand(spatial_attention(x, params.spatial), shape)
    branch3 = recurrent_branch(x, params.recurrent, params.scan)
    fused = F.add(F.add(F.mul(x, m_c), F.mul(x, m_s)), branch3)
    return F.scale(fused, 1.0 / 3.0)
