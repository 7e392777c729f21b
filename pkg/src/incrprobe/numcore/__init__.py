"""Numeric substrate: float64 matrices, reverse-mode gradients, AMSGrad."""

from .optim import AdamAmsgrad, OptimizerError
from .rng import Rng, xavier_uniform
from .tensor import (
    LOG_CLAMP,
    GraphError,
    Parameter,
    ShapeError,
    Tensor,
    add,
    as_tensor,
    backward,
    concat_cols,
    cross_entropy,
    cross_entropy_rows,
    dot_attention,
    l2_norm,
    log,
    lstm_cell,
    lstm_step_values,
    masked_softmax,
    matmul,
    mean_all,
    mul,
    no_grad,
    row_sum,
    scale,
    sigmoid,
    slice_cols,
    softmax,
    sum_all,
    take_rows,
    tanh,
)

__all__ = [
    "LOG_CLAMP",
    "AdamAmsgrad",
    "GraphError",
    "OptimizerError",
    "Parameter",
    "Rng",
    "ShapeError",
    "Tensor",
    "add",
    "as_tensor",
    "backward",
    "concat_cols",
    "cross_entropy",
    "cross_entropy_rows",
    "dot_attention",
    "l2_norm",
    "log",
    "lstm_cell",
    "lstm_step_values",
    "masked_softmax",
    "matmul",
    "mean_all",
    "mul",
    "no_grad",
    "row_sum",
    "scale",
    "sigmoid",
    "slice_cols",
    "softmax",
    "sum_all",
    "take_rows",
    "tanh",
    "xavier_uniform",
]
