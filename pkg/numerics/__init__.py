"""
EBAdapt Lab - numerics

Deterministic tensor math with reverse-mode automatic differentiation,
enough to build, train and gradient-check the transformer.
"""

from . import kernels, ops
from .exceptions import (
    DegenerateAttentionError,
    EmptyTargetError,
    GradientError,
    IndexRangeError,
    NonFiniteError,
    NumericsError,
    OutOfVocabularyError,
    ShapeError,
)
from .gradcheck import check_gradient, numerical_gradient, relative_error
from .ops import (
    add,
    add_n,
    attention_weights,
    concat_cols,
    concat_rows,
    cross_entropy_rows,
    embedding_lookup,
    gelu,
    l2_normalize_rows,
    layer_norm,
    masked_attention,
    matmul,
    mean_rows,
    mse,
    mul,
    rms_norm,
    rope_rotate,
    scale,
    silu,
    slice_cols,
    softmax_cross_entropy,
    sub,
    take_rows,
    transpose,
)
from .optim import Adam, adam_step, global_grad_norm
from .tensor import (
    Graph,
    Tensor,
    build_graph,
    default_dtype,
    is_grad_enabled,
    no_grad,
    precision,
    set_default_dtype,
)

__all__ = [
    # Core
    "Tensor",
    "Graph",
    "build_graph",
    "no_grad",
    "is_grad_enabled",
    "precision",
    "default_dtype",
    "set_default_dtype",
    "kernels",
    "ops",

    # Ops
    "add", "sub", "mul", "scale", "add_n", "matmul", "transpose",
    "take_rows", "embedding_lookup", "concat_rows", "concat_cols", "slice_cols",
    "mean_rows", "rms_norm", "layer_norm", "l2_normalize_rows", "gelu", "silu",
    "rope_rotate", "attention_weights", "masked_attention",
    "softmax_cross_entropy", "cross_entropy_rows", "mse",

    # Optimization and checks
    "Adam",
    "adam_step",
    "global_grad_norm",
    "numerical_gradient",
    "relative_error",
    "check_gradient",

    # Exceptions
    "NumericsError",
    "ShapeError",
    "IndexRangeError",
    "EmptyTargetError",
    "OutOfVocabularyError",
    "DegenerateAttentionError",
    "GradientError",
    "NonFiniteError",
]

__version__ = "1.0.0"
