from .gradcheck import check_gradients
from .ops import (add, attention, concat, cross_entropy, dropout, gather_rows,
                  gelu, layer_norm, log_softmax, matmul, mean_, mul, neg,
                  reshape, scale, softmax, square, sub, sum_, take_last,
                  transpose, transpose_last)
from .tensor import Tape, Tensor, as_tensor, backward

__all__ = [
    "Tape", "Tensor", "as_tensor", "backward", "check_gradients",
    "add", "attention", "concat", "cross_entropy", "dropout", "gather_rows",
    "gelu", "layer_norm", "log_softmax", "matmul", "mean_", "mul", "neg",
    "reshape", "scale", "softmax", "square", "sub", "sum_", "take_last",
    "transpose", "transpose_last",
]
