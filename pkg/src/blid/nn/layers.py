"""Parameterized layers assembled from the tensor ops.

Every layer owns its :class:`Parameter` tensors and exposes them through
``params()`` so optimizers and checkpoints can reach them.  Weight
matrices are initialized with uniform Xavier/Glorot draws from the
generator handed in at construction time, which keeps whole-model
initialization reproducible from a single seed.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .tensor import (
    DEFAULT_DTYPE,
    Parameter,
    Tensor,
    add,
    batch_norm_infer,
    batch_norm_train,
    concat,
    conv1d,
    dropout,
    matmul,
    mul,
    narrow,
    sigmoid,
    softmax,
    tanh,
)

__all__ = [
    "xavier_uniform",
    "Dense",
    "Embedding",
    "LstmCell",
    "Lstm",
    "BiLstm",
    "Attention",
    "Conv1dLayer",
    "BatchNorm",
    "Dropout",
]


def xavier_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int,
                   dtype=DEFAULT_DTYPE) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Dense:
    """Affine map (B, in) -> (B, out)."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator,
                 dtype=DEFAULT_DTYPE, name: str = "dense"):
        self.w = Parameter(xavier_uniform(rng, (in_dim, out_dim), in_dim, out_dim, dtype),
                           name=f"{name}.w")
        self.b = Parameter(np.zeros(out_dim, dtype=dtype), name=f"{name}.b")

    def __call__(self, x: Tensor) -> Tensor:
        return add(matmul(x, self.w), self.b)

    def params(self) -> list[Parameter]:
        return [self.w, self.b]


class Embedding:
    """Index lookup table (V, D)."""

    def __init__(self, vocab_size: int, dim: int, rng: np.random.Generator,
                 dtype=DEFAULT_DTYPE, name: str = "embed"):
        self.table = Parameter(
            xavier_uniform(rng, (vocab_size, dim), vocab_size, dim, dtype),
            name=f"{name}.table",
        )

    def __call__(self, indices: np.ndarray) -> Tensor:
        from .tensor import embedding_lookup
        return embedding_lookup(self.table, indices)

    def params(self) -> list[Parameter]:
        return [self.table]


class LstmCell:
    """Single LSTM step with the standard gate equations.

    Gate pre-activations are packed as [input, forget, cell, output]
    along the last axis.  The forget-gate bias starts at 1.0 so early
    training does not wipe the cell state.
    """

    def __init__(self, input_dim: int, hidden: int, rng: np.random.Generator,
                 dtype=DEFAULT_DTYPE, name: str = "lstm"):
        self.hidden = hidden
        self.w_x = Parameter(
            xavier_uniform(rng, (input_dim, 4 * hidden), input_dim, 4 * hidden, dtype),
            name=f"{name}.w_x",
        )
        self.w_h = Parameter(
            xavier_uniform(rng, (hidden, 4 * hidden), hidden, 4 * hidden, dtype),
            name=f"{name}.w_h",
        )
        bias = np.zeros(4 * hidden, dtype=dtype)
        bias[hidden:2 * hidden] = 1.0  # forget gate
        self.b = Parameter(bias, name=f"{name}.b")

    def step(self, x: Tensor, h: Tensor, c: Tensor) -> tuple[Tensor, Tensor]:
        hs = self.hidden
        z = add(add(matmul(x, self.w_x), matmul(h, self.w_h)), self.b)
        gate_i = sigmoid(narrow(z, 1, 0, hs))
        gate_f = sigmoid(narrow(z, 1, hs, hs))
        gate_g = tanh(narrow(z, 1, 2 * hs, hs))
        gate_o = sigmoid(narrow(z, 1, 3 * hs, hs))
        c_next = add(mul(gate_f, c), mul(gate_i, gate_g))
        h_next = mul(gate_o, tanh(c_next))
        return h_next, c_next

    def params(self) -> list[Parameter]:
        return [self.w_x, self.w_h, self.b]


class Lstm:
    """Unidirectional LSTM over a list of per-step (B, in) tensors."""

    def __init__(self, cell: LstmCell):
        self.cell = cell

    def run(self, steps: list[Tensor]) -> list[Tensor]:
        if not steps:
            raise ShapeError("lstm needs a non-empty sequence")
        batch = steps[0].data.shape[0]
        dtype = steps[0].data.dtype
        h = Tensor.zeros((batch, self.cell.hidden), dtype=dtype)
        c = Tensor.zeros((batch, self.cell.hidden), dtype=dtype)
        outputs = []
        for x in steps:
            h, c = self.cell.step(x, h, c)
            outputs.append(h)
        return outputs

    def params(self) -> list[Parameter]:
        return self.cell.params()


class BiLstm:
    """Two independent LSTMs, one per direction.

    ``run`` returns per-step concatenations aligned on the input
    position: step t carries the forward state after reading x[0..t]
    and the backward state after reading x[t..L-1].
    """

    def __init__(self, fwd: LstmCell, bwd: LstmCell):
        self.fwd = Lstm(fwd)
        self.bwd = Lstm(bwd)

    def run(self, steps: list[Tensor]) -> list[Tensor]:
        h_fwd = self.fwd.run(steps)
        h_bwd = self.bwd.run(steps[::-1])[::-1]
        return [concat([f, b], axis=1) for f, b in zip(h_fwd, h_bwd)]

    def final_state(self, steps: list[Tensor]) -> Tensor:
        h_fwd = self.fwd.run(steps)
        h_bwd = self.bwd.run(steps[::-1])
        return concat([h_fwd[-1], h_bwd[-1]], axis=1)

    def params(self) -> list[Parameter]:
        return self.fwd.params() + self.bwd.params()


class Attention:
    """Additive attention pooling of per-step hidden states.

    Scores each step with v . tanh(W h_t), softmaxes the scores over
    time and returns the weighted sum of the states.
    """

    def __init__(self, dim: int, rng: np.random.Generator,
                 dtype=DEFAULT_DTYPE, name: str = "attn"):
        self.w = Parameter(xavier_uniform(rng, (dim, dim), dim, dim, dtype),
                           name=f"{name}.w")
        self.v = Parameter(xavier_uniform(rng, (dim, 1), dim, 1, dtype),
                           name=f"{name}.v")

    def __call__(self, states: list[Tensor]) -> Tensor:
        if not states:
            raise ShapeError("attention needs a non-empty state sequence")
        scores = [matmul(tanh(matmul(h, self.w)), self.v) for h in states]
        weights = softmax(concat(scores, axis=1), axis=1)  # (B, L)
        context = None
        for t, h in enumerate(states):
            piece = mul(narrow(weights, 1, t, 1), h)
            context = piece if context is None else add(context, piece)
        return context

    def params(self) -> list[Parameter]:
        return [self.w, self.v]


class Conv1dLayer:
    def __init__(self, kernel: int, in_channels: int, filters: int,
                 rng: np.random.Generator, padding: str = "valid",
                 dtype=DEFAULT_DTYPE, name: str = "conv"):
        fan_in = kernel * in_channels
        self.w = Parameter(
            xavier_uniform(rng, (kernel, in_channels, filters), fan_in, filters, dtype),
            name=f"{name}.w",
        )
        self.b = Parameter(np.zeros(filters, dtype=dtype), name=f"{name}.b")
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return conv1d(x, self.w, self.b, padding=self.padding)

    def params(self) -> list[Parameter]:
        return [self.w, self.b]


class BatchNorm:
    """Per-feature batch normalization with running statistics.

    Train mode normalizes with batch statistics and folds them into the
    running estimates; inference mode is a deterministic affine map of
    the running statistics only.
    """

    def __init__(self, features: int, momentum: float = 0.1, eps: float = 1e-5,
                 dtype=DEFAULT_DTYPE, name: str = "bn"):
        self.gamma = Parameter(np.ones(features, dtype=dtype), name=f"{name}.gamma")
        self.beta = Parameter(np.zeros(features, dtype=dtype), name=f"{name}.beta")
        self.running_mean = np.zeros(features, dtype=dtype)
        self.running_var = np.ones(features, dtype=dtype)
        self.momentum = momentum
        self.eps = eps

    def __call__(self, x: Tensor, training: bool) -> Tensor:
        if training:
            out, mean, var = batch_norm_train(x, self.gamma, self.beta, eps=self.eps)
            m = self.momentum
            self.running_mean = ((1 - m) * self.running_mean + m * mean).astype(self.running_mean.dtype)
            self.running_var = ((1 - m) * self.running_var + m * var).astype(self.running_var.dtype)
            return out
        return batch_norm_infer(x, self.gamma, self.beta,
                                self.running_mean, self.running_var, eps=self.eps)

    def params(self) -> list[Parameter]:
        return [self.gamma, self.beta]


class Dropout:
    def __init__(self, p: float):
        self.p = p

    def __call__(self, x: Tensor, rng: np.random.Generator | None, training: bool) -> Tensor:
        return dropout(x, self.p, rng, training)
