"""
Triple attention 모듈 (channel / spatial / recurrent)
"""
from .branches import channel_attention, lstm_step, recurrent_branch, spatial_attention, triple_attention
from .checkpoint import load_attention, save_attention
from .params import (
    ChannelAttentionParams,
    RecurrentGateParams,
    SpatialAttentionParams,
    TripleAttentionParams,
)

__all__ = [
    "ChannelAttentionParams",
    "RecurrentGateParams",
    "SpatialAttentionParams",
    "TripleAttentionParams",
    "channel_attention",
    "load_attention",
    "lstm_step",
    "recurrent_branch",
    "save_attention",
    "spatial_attention",
    "triple_attention",
]
