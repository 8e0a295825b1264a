"""Dense-tensor reverse-mode differentiation engine.

A :class:`Tensor` wraps a numpy array and remembers how it was computed;
calling :meth:`Tensor.backward` on a scalar loss walks the recorded
graph in reverse topological order and accumulates exact gradients into
every tensor that requires them.  Float32 is the working precision;
float64 is used by the gradient-check suites.

Only the operations the word classifiers need are provided; there is no
broadcasting-general matmul, no views, no in-place graph surgery.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from ..errors import NonFiniteValue, ShapeError

__all__ = [
    "DEFAULT_DTYPE",
    "Tensor",
    "Parameter",
    "add",
    "mul",
    "matmul",
    "concat",
    "narrow",
    "reshape",
    "sigmoid",
    "tanh",
    "relu",
    "leaky_relu",
    "softmax",
    "embedding_lookup",
    "conv1d",
    "max_pool_over_time",
    "dropout",
    "batch_norm_train",
    "batch_norm_infer",
    "cross_entropy",
    "assert_finite",
    "zero_grads",
]

DEFAULT_DTYPE = np.float32


class Tensor:
    """A node in the computation graph."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        if isinstance(data, Tensor):
            raise TypeError("cannot wrap a Tensor in a Tensor")
        arr = np.asarray(data)
        if dtype is not None:
            arr = arr.astype(dtype)
        elif arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(DEFAULT_DTYPE)
        self.data: np.ndarray = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[], None] | None = None

    # -- basic introspection -------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    # -- gradient plumbing ----------------------------------------------

    def _accum(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = g.astype(self.data.dtype, copy=True)
        else:
            self.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """Backpropagate from this scalar through the recorded graph."""
        if self.data.size != 1:
            raise ShapeError(f"backward() needs a scalar, got shape {self.data.shape}")
        # Iterative post-order DFS; LSTM graphs are deeper than the
        # default recursion limit allows.
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None:
                node._backward()

    def item(self) -> float:
        return float(self.data.reshape(()))

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zeros(shape, dtype=DEFAULT_DTYPE, requires_grad: bool = False) -> "Tensor":
        return Tensor(np.zeros(shape, dtype=dtype), requires_grad=requires_grad)


class Parameter(Tensor):
    """A named trainable tensor; gradients accumulate until the
    optimizer steps and zeroes them."""

    __slots__ = ("name",)

    def __init__(self, data, name: str = "", dtype=None):
        super().__init__(data, requires_grad=True, dtype=dtype)
        self.name = name

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.data.shape}, dtype={self.data.dtype})"


def zero_grads(params: Iterable[Tensor]) -> None:
    for p in params:
        p.zero_grad()


def assert_finite(value, what: str = "value") -> None:
    data = value.data if isinstance(value, Tensor) else np.asarray(value)
    if not np.all(np.isfinite(data)):
        raise NonFiniteValue(f"non-finite {what} encountered")


# -- graph construction helpers ----------------------------------------------

def _node(data: np.ndarray, parents: Sequence[Tensor], backward: Callable[[], None]) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a gradient back down to the shape it was broadcast from."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


# -- arithmetic ----------------------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data + b.data
    def _bw():
        if a.requires_grad:
            a._accum(_unbroadcast(out.grad, a.data.shape))
        if b.requires_grad:
            b._accum(_unbroadcast(out.grad, b.data.shape))
    out = _node(out_data, (a, b), _bw)
    return out


def mul(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data * b.data
    def _bw():
        if a.requires_grad:
            a._accum(_unbroadcast(out.grad * b.data, a.data.shape))
        if b.requires_grad:
            b._accum(_unbroadcast(out.grad * a.data, b.data.shape))
    out = _node(out_data, (a, b), _bw)
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {a.data.shape} @ {b.data.shape}")
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul shape mismatch: {a.data.shape} @ {b.data.shape}")
    out_data = a.data @ b.data
    def _bw():
        if a.requires_grad:
            a._accum(out.grad @ b.data.T)
        if b.requires_grad:
            b._accum(a.data.T @ out.grad)
    out = _node(out_data, (a, b), _bw)
    return out


def concat(xs: Sequence[Tensor], axis: int = 1) -> Tensor:
    if not xs:
        raise ShapeError("concat of an empty sequence")
    out_data = np.concatenate([x.data for x in xs], axis=axis)
    sizes = [x.data.shape[axis] for x in xs]
    def _bw():
        offset = 0
        for x, size in zip(xs, sizes):
            if x.requires_grad:
                idx = tuple(
                    slice(offset, offset + size) if d == (axis % out.grad.ndim) else slice(None)
                    for d in range(out.grad.ndim)
                )
                x._accum(out.grad[idx])
            offset += size
    out = _node(out_data, tuple(xs), _bw)
    return out


def narrow(x: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice along one axis (used for gate chunks and time steps)."""
    idx = tuple(
        slice(start, start + length) if d == axis else slice(None)
        for d in range(x.data.ndim)
    )
    out_data = x.data[idx]
    def _bw():
        if x.requires_grad:
            g = np.zeros_like(x.data)
            g[idx] = out.grad
            x._accum(g)
    out = _node(out_data, (x,), _bw)
    return out


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    out_data = x.data.reshape(shape)
    def _bw():
        if x.requires_grad:
            x._accum(out.grad.reshape(x.data.shape))
    out = _node(out_data, (x,), _bw)
    return out


# -- activations -----------------------------------------------------------------

def sigmoid(x: Tensor) -> Tensor:
    d = x.data
    out_data = np.where(d >= 0, 1.0 / (1.0 + np.exp(-np.abs(d))),
                        np.exp(-np.abs(d)) / (1.0 + np.exp(-np.abs(d))))
    out_data = out_data.astype(d.dtype)
    def _bw():
        if x.requires_grad:
            x._accum(out.grad * out_data * (1.0 - out_data))
    out = _node(out_data, (x,), _bw)
    return out


def tanh(x: Tensor) -> Tensor:
    out_data = np.tanh(x.data)
    def _bw():
        if x.requires_grad:
            x._accum(out.grad * (1.0 - out_data * out_data))
    out = _node(out_data, (x,), _bw)
    return out


def relu(x: Tensor) -> Tensor:
    out_data = np.maximum(x.data, 0)
    def _bw():
        if x.requires_grad:
            x._accum(out.grad * (x.data > 0))
    out = _node(out_data, (x,), _bw)
    return out


def leaky_relu(x: Tensor, alpha: float = 0.01) -> Tensor:
    out_data = np.where(x.data >= 0, x.data, alpha * x.data)
    def _bw():
        if x.requires_grad:
            slope = np.where(x.data >= 0, 1.0, alpha).astype(x.data.dtype)
            x._accum(out.grad * slope)
    out = _node(out_data, (x,), _bw)
    return out


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    if x.data.shape[axis] == 0:
        raise ShapeError("softmax over an empty axis")
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out_data = e / e.sum(axis=axis, keepdims=True)
    def _bw():
        if x.requires_grad:
            g = out.grad
            dot = (g * out_data).sum(axis=axis, keepdims=True)
            x._accum(out_data * (g - dot))
    out = _node(out_data, (x,), _bw)
    return out


# -- structured ops ------------------------------------------------------------------

def embedding_lookup(table: Tensor, indices: np.ndarray) -> Tensor:
    """Gather rows of ``table`` (V, D) by an integer index array."""
    indices = np.asarray(indices)
    if indices.dtype.kind not in "iu":
        raise ShapeError("embedding indices must be integers")
    if indices.size and (indices.min() < 0 or indices.max() >= table.data.shape[0]):
        raise ShapeError("embedding index out of range")
    out_data = table.data[indices]
    def _bw():
        if table.requires_grad:
            g = np.zeros_like(table.data)
            np.add.at(g, indices.reshape(-1), out.grad.reshape(-1, table.data.shape[1]))
            table._accum(g)
    out = _node(out_data, (table,), _bw)
    return out


def conv1d(x: Tensor, w: Tensor, b: Tensor | None = None, padding: str = "valid") -> Tensor:
    """1-D convolution over the time axis.

    ``x`` is (batch, steps, in_channels), ``w`` is (kernel, in_channels,
    out_channels).  ``"valid"`` shrinks the output to steps-kernel+1;
    ``"same"`` zero-pads so the output keeps the input length.
    """
    if x.data.ndim != 3 or w.data.ndim != 3:
        raise ShapeError(f"conv1d expects (B,L,C) and (k,C,F), got {x.data.shape}, {w.data.shape}")
    B, L, c_in = x.data.shape
    k, c_in2, c_out = w.data.shape
    if c_in != c_in2:
        raise ShapeError(f"conv1d channel mismatch: input {c_in}, kernel {c_in2}")
    if padding == "valid":
        pad_left = pad_right = 0
    elif padding == "same":
        pad_left = (k - 1) // 2
        pad_right = k - 1 - pad_left
    else:
        raise ShapeError(f"unknown padding {padding!r}")
    if L + pad_left + pad_right < k:
        raise ShapeError(f"conv1d: {L} steps too short for kernel {k}")

    xp = x.data
    if pad_left or pad_right:
        xp = np.pad(x.data, ((0, 0), (pad_left, pad_right), (0, 0)))
    l_out = xp.shape[1] - k + 1
    out_data = np.zeros((B, l_out, c_out), dtype=x.data.dtype)
    for j in range(k):
        out_data += xp[:, j:j + l_out, :] @ w.data[j]
    if b is not None:
        out_data += b.data

    parents = (x, w) if b is None else (x, w, b)
    def _bw():
        g = out.grad
        if x.requires_grad:
            gxp = np.zeros_like(xp)
            for j in range(k):
                gxp[:, j:j + l_out, :] += g @ w.data[j].T
            x._accum(gxp[:, pad_left:pad_left + L, :])
        if w.requires_grad:
            gw = np.empty_like(w.data)
            for j in range(k):
                gw[j] = np.einsum("blc,blf->cf", xp[:, j:j + l_out, :], g)
            w._accum(gw)
        if b is not None and b.requires_grad:
            b._accum(g.sum(axis=(0, 1)))
    out = _node(out_data, parents, _bw)
    return out


def max_pool_over_time(x: Tensor) -> Tensor:
    """Per-channel max over the time axis: (B, L, C) -> (B, C).

    Ties route the gradient to the earliest step, keeping backward
    deterministic.
    """
    if x.data.ndim != 3:
        raise ShapeError(f"max_pool_over_time expects (B,L,C), got {x.data.shape}")
    if x.data.shape[1] < 1:
        raise ShapeError("max_pool_over_time needs at least one step")
    argmax = x.data.argmax(axis=1)  # first max wins
    out_data = np.take_along_axis(x.data, argmax[:, None, :], axis=1)[:, 0, :]
    def _bw():
        if x.requires_grad:
            g = np.zeros_like(x.data)
            np.put_along_axis(g, argmax[:, None, :], out.grad[:, None, :], axis=1)
            x._accum(g)
    out = _node(out_data, (x,), _bw)
    return out


def dropout(x: Tensor, p: float, rng: np.random.Generator | None, training: bool) -> Tensor:
    """Inverted dropout: scales by 1/(1-p) at train time so that
    inference is the identity."""
    if not 0.0 <= p < 1.0:
        raise ShapeError(f"dropout rate must be in [0, 1), got {p}")
    if not training or p == 0.0:
        return x
    if rng is None:
        raise ValueError("dropout in training mode needs a random generator")
    mask = (rng.random(x.data.shape) >= p).astype(x.data.dtype) / (1.0 - p)
    out_data = x.data * mask
    def _bw():
        if x.requires_grad:
            x._accum(out.grad * mask)
    out = _node(out_data, (x,), _bw)
    return out


def batch_norm_train(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5
                     ) -> tuple[Tensor, np.ndarray, np.ndarray]:
    """Per-feature batch normalization of a (B, C) activation matrix.

    Returns the normalized-and-scaled output plus the batch mean and
    (biased) variance so the caller can maintain running statistics.
    """
    if x.data.ndim != 2:
        raise ShapeError(f"batch_norm expects a (B,C) matrix, got {x.data.shape}")
    n = x.data.shape[0]
    mean = x.data.mean(axis=0)
    var = x.data.var(axis=0)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mean) * inv_std
    out_data = gamma.data * xhat + beta.data
    def _bw():
        g = out.grad
        if gamma.requires_grad:
            gamma._accum((g * xhat).sum(axis=0))
        if beta.requires_grad:
            beta._accum(g.sum(axis=0))
        if x.requires_grad:
            dxhat = g * gamma.data
            dx = (inv_std / n) * (
                n * dxhat
                - dxhat.sum(axis=0)
                - xhat * (dxhat * xhat).sum(axis=0)
            )
            x._accum(dx.astype(x.data.dtype))
    out = _node(out_data.astype(x.data.dtype), (x, gamma, beta), _bw)
    return out, mean, var


def batch_norm_infer(x: Tensor, gamma: Tensor, beta: Tensor,
                     running_mean: np.ndarray, running_var: np.ndarray,
                     eps: float = 1e-5) -> Tensor:
    """Inference-mode batch norm: a fixed affine map from running stats."""
    if x.data.ndim != 2:
        raise ShapeError(f"batch_norm expects a (B,C) matrix, got {x.data.shape}")
    inv_std = 1.0 / np.sqrt(running_var + eps)
    xhat = (x.data - running_mean) * inv_std
    out_data = (gamma.data * xhat + beta.data).astype(x.data.dtype)
    def _bw():
        g = out.grad
        if gamma.requires_grad:
            gamma._accum((g * xhat).sum(axis=0))
        if beta.requires_grad:
            beta._accum(g.sum(axis=0))
        if x.requires_grad:
            x._accum((g * gamma.data * inv_std).astype(x.data.dtype))
    out = _node(out_data, (x, gamma, beta), _bw)
    return out


def cross_entropy(probs: Tensor, onehot: np.ndarray) -> Tensor:
    """Mean negative log-likelihood of one-hot targets under ``probs``.

    ``probs`` are probabilities (softmax output), shape (B, C); the
    target array must match.  Probabilities are floored at a tiny
    constant inside the log to keep saturated predictions finite.
    """
    onehot = np.asarray(onehot, dtype=probs.data.dtype)
    if probs.data.ndim != 2 or probs.data.shape != onehot.shape:
        raise ShapeError(
            f"cross_entropy shape mismatch: probs {probs.data.shape}, targets {onehot.shape}"
        )
    if probs.data.shape[1] == 0:
        raise ShapeError("cross_entropy over an empty class axis")
    n = probs.data.shape[0]
    floored = np.maximum(probs.data, 1e-12)
    out_data = np.asarray(-(onehot * np.log(floored)).sum() / n, dtype=probs.data.dtype)
    def _bw():
        if probs.requires_grad:
            probs._accum((out.grad * (-(onehot / floored) / n)).astype(probs.data.dtype))
    out = _node(out_data, (probs,), _bw)
    return out
