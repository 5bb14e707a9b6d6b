"""
Dense n-dimensional arrays with reverse-mode automatic differentiation.
"""

from . import ops
from .conv import (
    conv2d,
    conv_output_extent,
    conv_transpose2d,
    conv_transpose_output_extent,
)
from .gradcheck import grad_check
from .ops import (
    broadcast_shape,
    clamp,
    concat,
    elementwise,
    leaky_relu,
    log_softmax,
    matmul,
    mean,
    relu,
    reshape,
    sigmoid,
)
from .serialization import load_array, save_array
from .tensor import (
    DTYPES,
    Function,
    Tensor,
    as_tensor,
    default_dtype,
    get_default_dtype,
    is_grad_enabled,
    no_grad,
)

__all__ = [
    "DTYPES",
    "Function",
    "Tensor",
    "as_tensor",
    "broadcast_shape",
    "clamp",
    "concat",
    "conv2d",
    "conv_output_extent",
    "conv_transpose2d",
    "conv_transpose_output_extent",
    "default_dtype",
    "elementwise",
    "get_default_dtype",
    "grad_check",
    "is_grad_enabled",
    "leaky_relu",
    "load_array",
    "log_softmax",
    "matmul",
    "mean",
    "no_grad",
    "ops",
    "relu",
    "reshape",
    "save_array",
    "sigmoid",
]
