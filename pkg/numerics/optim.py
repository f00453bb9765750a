"""
Adam optimizer.

`adam_step` updates one parameter array in place. `Adam` keeps the moment
buffers for a named set of tensors and applies the step to every tensor
that received a gradient, in sorted name order.
"""

from __future__ import annotations

import logging
import math
from typing import Mapping, Optional

import numpy as np

from . import kernels
from .exceptions import NonFiniteError
from .tensor import Tensor

logger = logging.getLogger(__name__)

DEFAULT_BETAS = (0.9, 0.999)
DEFAULT_EPS = 1e-8


def adam_step(
    param: np.ndarray,
    grad: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    step: int,
    lr: float,
    betas: tuple[float, float] = DEFAULT_BETAS,
    eps: float = DEFAULT_EPS,
) -> None:
    """
    One bias-corrected Adam update, in place on `param`, `m` and `v`.

    Args:
        step: 1-based step counter used for bias correction
    """
    if step < 1:
        raise ValueError(f"adam step counter must start at 1, got {step}")
    b1, b2 = betas
    dt = param.dtype.type
    m *= dt(b1)
    m += dt(1.0 - b1) * grad
    v *= dt(b2)
    v += dt(1.0 - b2) * grad * grad
    m_hat = m / dt(1.0 - b1 ** step)
    v_hat = v / dt(1.0 - b2 ** step)
    param -= dt(lr) * m_hat / (np.sqrt(v_hat) + dt(eps))


def global_grad_norm(grads: Mapping[str, np.ndarray]) -> float:
    """L2 norm over all gradients, accumulated in sorted name order (float64)."""
    total = 0.0
    for name in sorted(grads):
        g = np.asarray(grads[name], dtype=np.float64).reshape(1, -1)
        total += float(kernels.row_sum(g * g)[0])
    return math.sqrt(total)


class Adam:
    """
    Adam over a dict of named parameter tensors.

    Args:
        params: name → Tensor; only tensors with requires_grad are updated
        lr: learning rate
        clip_norm: rescale gradients when their global norm exceeds this
            (None disables clipping)
    """

    def __init__(
        self,
        params: Mapping[str, Tensor],
        lr: float = 1e-3,
        betas: tuple[float, float] = DEFAULT_BETAS,
        eps: float = DEFAULT_EPS,
        clip_norm: Optional[float] = None,
    ):
        if lr <= 0:
            raise ValueError(f"learning rate must be positive, got {lr}")
        self.params = dict(params)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.clip_norm = clip_norm
        self.step_count = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}
        self.last_grad_norm = 0.0

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def step(self) -> float:
        """Apply one update; returns the pre-clipping global gradient norm."""
        grads = {
            name: p.grad
            for name, p in self.params.items()
            if p.requires_grad and p.grad is not None
        }
        for name in sorted(grads):
            if not np.all(np.isfinite(grads[name])):
                raise NonFiniteError(f"non-finite gradient for parameter '{name}'")
        norm = global_grad_norm(grads)
        self.last_grad_norm = norm
        factor = 1.0
        if self.clip_norm is not None and norm > self.clip_norm:
            factor = self.clip_norm / (norm + 1e-12)
            logger.debug(f"Clipping gradients: norm {norm:.4f} -> {self.clip_norm}")
        self.step_count += 1
        for name in sorted(grads):
            p = self.params[name]
            g = grads[name] if factor == 1.0 else grads[name] * p.dtype.type(factor)
            if name not in self._m:
                self._m[name] = np.zeros_like(p.data)
                self._v[name] = np.zeros_like(p.data)
            adam_step(p.data, g, self._m[name], self._v[name], self.step_count, self.lr, self.betas, self.eps)
        return norm
