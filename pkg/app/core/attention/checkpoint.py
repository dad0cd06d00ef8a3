"""
Triple attention 파라미터 checkpoint
단일 책임: 블록별 CKT1 텐서 + JSON manifest 저장/로드
"""
import logging
from pathlib import Path
from typing import Union

from ..autodiff.serialization import load_tensor, save_tensor
from ..exceptions import DataFormatError
from ..utils.io import read_json, write_json
from .params import (
    GATES,
    ChannelAttentionParams,
    RecurrentGateParams,
    SpatialAttentionParams,
    TripleAttentionParams,
)

logger = logging.getLogger(__name__)

MANIFEST = "attention.json"


def save_attention(directory: Union[str, Path], params: TripleAttentionParams) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    blocks = {}
    for name, tensor in params.blocks().items():
        filename = f"{name}.ckt"
        save_tensor(directory / filename, tensor)
        blocks[name] = {"file": filename, "shape": list(tensor.shape)}
    manifest = {"r": params.channel.r, "scan": params.scan, "blocks": blocks}
    path = write_json(directory / MANIFEST, manifest)
    logger.info(f"💾 attention checkpoint 저장: {directory} (블록 {len(blocks)}개)")
    return path


def load_attention(directory: Union[str, Path]) -> TripleAttentionParams:
    directory = Path(directory)
    try:
        manifest = read_json(directory / MANIFEST)
        blocks = {
            name: load_tensor(directory / entry["file"], requires_grad=True)
            for name, entry in manifest["blocks"].items()
        }
        channel = ChannelAttentionParams(
            r=manifest["r"],
            w1=blocks["channel.w1"],
            b1=blocks["channel.b1"],
            w2=blocks["channel.w2"],
            b2=blocks["channel.b2"],
        )
        spatial = SpatialAttentionParams(kernel=blocks["spatial.kernel"])
        recurrent = RecurrentGateParams(
            **{f"{kind}_{gate}": blocks[f"recurrent.{kind}_{gate}"] for gate in GATES for kind in ("w", "b")}
        )
    except (KeyError, ValueError, OSError) as e:
        raise DataFormatError(f"attention checkpoint 읽기 실패 ({directory}): {e}") from e
    return TripleAttentionParams(channel=channel, spatial=spatial, recurrent=recurrent, scan=manifest["scan"])
