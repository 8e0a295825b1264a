"""From-scratch neural network core: tensors, layers, Adam, grad checks."""

from .gradcheck import grad_check
from .layers import (
    Attention,
    BatchNorm,
    BiLstm,
    Conv1dLayer,
    Dense,
    Dropout,
    Embedding,
    Lstm,
    LstmCell,
    xavier_uniform,
)
from .optim import Adam
from .tensor import (
    DEFAULT_DTYPE,
    Parameter,
    Tensor,
    add,
    assert_finite,
    batch_norm_infer,
    batch_norm_train,
    concat,
    conv1d,
    cross_entropy,
    dropout,
    embedding_lookup,
    leaky_relu,
    matmul,
    max_pool_over_time,
    mul,
    narrow,
    relu,
    reshape,
    sigmoid,
    softmax,
    tanh,
    zero_grads,
)

ENGINE_VERSION = "blid-nn/1"
