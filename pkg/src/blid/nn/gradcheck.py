"""Finite-difference verification of analytic gradients.

The checker compares the backward pass of a scalar loss against central
differences, coordinate by coordinate.  The reported figure is the worst
absolute deviation normalized by the infinity norm of the gradient of
the enclosing tensor, which stays meaningful when individual partials
are near zero (saturated gates, inactive relu units).
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor, zero_grads

__all__ = ["grad_check"]


def _default_eps(dtype) -> float:
    return 1e-5 if dtype == np.float64 else 1e-3


def grad_check(
    loss_fn: Callable[[], Tensor],
    wrt: Sequence[Tensor],
    eps: float | None = None,
    sample: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Return the worst relative gradient error of ``loss_fn``.

    ``loss_fn`` must rebuild the scalar loss from scratch on every call,
    reading the current contents of the tensors in ``wrt`` (the model
    must be deterministic: no live dropout).  ``sample`` limits the
    check to that many randomly chosen coordinates per tensor, which
    keeps whole-model sweeps fast; the default checks every coordinate.

    For float32 tensors the step is scaled per coordinate by
    max(1, |x|) to stay above rounding noise.
    """
    zero_grads(wrt)
    loss = loss_fn()
    loss.backward()
    analytic = [
        np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in wrt
    ]

    worst = 0.0
    for tensor, grad in zip(wrt, analytic):
        step = eps if eps is not None else _default_eps(tensor.data.dtype)
        flat = tensor.data.reshape(-1)
        coords = np.arange(flat.size)
        if sample is not None and sample < flat.size:
            gen = rng if rng is not None else np.random.default_rng(0)
            coords = gen.choice(flat.size, size=sample, replace=False)
        numeric = np.zeros(len(coords), dtype=np.float64)
        for row, idx in enumerate(coords):
            original = flat[idx]
            h = step if tensor.data.dtype == np.float64 else step * max(1.0, abs(float(original)))
            flat[idx] = original + h
            up = loss_fn().item()
            flat[idx] = original - h
            down = loss_fn().item()
            flat[idx] = original
            numeric[row] = (up - down) / (2.0 * h)
        picked = grad.reshape(-1)[coords].astype(np.float64)
        denom = max(
            float(np.max(np.abs(grad))) if grad.size else 0.0,
            float(np.max(np.abs(numeric))) if numeric.size else 0.0,
            1e-12,
        )
        err = float(np.max(np.abs(picked - numeric))) / denom if len(coords) else 0.0
        worst = max(worst, err)
    zero_grads(wrt)
    return worst
