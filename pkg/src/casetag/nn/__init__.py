from casetag.nn.tensor import (
    DTYPE,
    Tensor,
    as_tensor,
    concat,
    cross_entropy,
    log_softmax,
    logsumexp,
    no_grad,
    softmax,
    stack,
    tensor,
    zeros,
)
from casetag.nn.layers import BiLSTM, CharCNN, Embedding, Linear, LSTMCell, dropout, glorot, prefixed
from casetag.nn.optim import Adam, clip_global_norm
from casetag.nn.gradcheck import GradCheckReport, gradient_check
from casetag.nn.serialize import Container, restore_params, store_params

__all__ = [
    "DTYPE", "Tensor", "as_tensor", "concat", "cross_entropy", "log_softmax",
    "logsumexp", "no_grad", "softmax", "stack", "tensor", "zeros",
    "BiLSTM", "CharCNN", "Embedding", "Linear", "LSTMCell", "dropout", "glorot", "prefixed",
    "Adam", "clip_global_norm", "GradCheckReport", "gradient_check",
    "Container", "restore_params", "store_params",
]
