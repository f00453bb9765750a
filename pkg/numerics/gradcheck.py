"""
Central finite-difference gradient checks.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .tensor import Tensor, no_grad

FD_STEP = 1e-5


def numerical_gradient(
    fn: Callable[[], Tensor],
    param: Tensor,
    h: float = FD_STEP,
    indices: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """
    (f(x+h) − f(x−h)) / 2h for each selected flat index of `param`.

    `fn` must rebuild the scalar output from the current contents of
    `param.data`. Unselected entries of the result are zero.
    """
    flat = param.data.reshape(-1)
    grad = np.zeros(flat.shape, dtype=np.float64)
    chosen = range(flat.size) if indices is None else indices
    for i in chosen:
        orig = flat[i]
        with no_grad():
            flat[i] = orig + h
            up = fn().item()
            flat[i] = orig - h
            down = fn().item()
        flat[i] = orig
        grad[i] = (up - down) / (2.0 * h)
    return grad.reshape(param.shape)


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-12) -> float:
    """‖a − n‖ / max(‖a‖ + ‖n‖, floor)."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    denom = max(np.linalg.norm(a) + np.linalg.norm(n), floor)
    return float(np.linalg.norm(a - n) / denom)


def check_gradient(
    fn: Callable[[], Tensor],
    params: Sequence[Tensor],
    h: float = FD_STEP,
    max_entries: Optional[int] = None,
    seed: int = 0,
) -> float:
    """
    Worst relative error between backprop and finite differences over `params`.

    When `max_entries` is set, that many flat indices per parameter are
    sampled instead of checking every entry.
    """
    for p in params:
        p.zero_grad()
    fn().backward()
    analytic = [np.zeros(p.shape) if p.grad is None else p.grad.astype(np.float64) for p in params]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p, a in zip(params, analytic):
        if max_entries is not None and p.size > max_entries:
            idx = np.sort(rng.choice(p.size, size=max_entries, replace=False))
            numeric = numerical_gradient(fn, p, h, idx)
            a = a.reshape(-1)[idx]
            numeric = numeric.reshape(-1)[idx]
        else:
            numeric = numerical_gradient(fn, p, h)
        worst = max(worst, relative_error(a, numeric))
    return worst
