"""
최소 dense 텐서 + reverse-mode 자동미분
"""
from . import functional
from .gradcheck import check_parameters, finite_diff_check
from .serialization import load_tensor, save_tensor, tensor_from_bytes, tensor_to_bytes
from .tensor import ComputationRecord, Function, RecordEntry, Tensor, as_tensor, parameter, zero_grad

__all__ = [
    "ComputationRecord",
    "Function",
    "RecordEntry",
    "Tensor",
    "as_tensor",
    "parameter",
    "zero_grad",
    "functional",
    "finite_diff_check",
    "check_parameters",
    "save_tensor",
    "load_tensor",
    "tensor_to_bytes",
    "tensor_from_bytes",
]
