"""
KernelWarehouse 동적 합성곱
"""
from .kwconv import (
    LayerSpec,
    ParamCount,
    ScorerParams,
    Warehouse,
    assemble_kernels,
    build_stage,
    kwconv_forward,
    load_warehouse,
    param_count,
    save_warehouse,
    stage_parameters,
)
from .naf import NafConfig, init_masks, naf, temperature
from .partition import KernelUnitShape, mixing_grid, num_mixing, partition_kernel, stage_unit_shape

__all__ = [
    "KernelUnitShape",
    "LayerSpec",
    "NafConfig",
    "ParamCount",
    "ScorerParams",
    "Warehouse",
    "assemble_kernels",
    "build_stage",
    "init_masks",
    "kwconv_forward",
    "load_warehouse",
    "mixing_grid",
    "naf",
    "num_mixing",
    "param_count",
    "partition_kernel",
    "save_warehouse",
    "stage_parameters",
    "stage_unit_shape",
    "temperature",
]
