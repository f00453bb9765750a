"""
Differentiable operations.

Each op computes its forward value with numpy (reductions through the
fixed-order kernels), wraps it with Tensor.from_op and registers a closure
that pushes the upstream gradient to its inputs.

Transcendental functions (exp, log, tanh) are applied one row at a time on
freshly allocated rows, so the value of a row never depends on how many
other rows share the array.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from . import kernels
from .exceptions import (
    DegenerateAttentionError,
    EmptyTargetError,
    IndexRangeError,
    OutOfVocabularyError,
    ShapeError,
)
from .tensor import Tensor, default_dtype

GELU_COEFF = 0.044715
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------
def _as_tensor(x, like: Tensor | None = None) -> Tensor:
    if isinstance(x, Tensor):
        return x
    dtype = like.dtype if like is not None else default_dtype()
    return Tensor(np.asarray(x, dtype=dtype))


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce a broadcast gradient back to `shape` with fixed-order sums."""
    while grad.ndim > len(shape):
        grad = kernels.sum_leading(grad)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            moved = np.moveaxis(grad, axis, 0)
            grad = np.moveaxis(kernels.sum_leading(moved)[np.newaxis, ...], 0, axis)
    return grad.reshape(shape)


def _rowwise(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> np.ndarray:
    if x.ndim < 2:
        return fn(np.array(x))
    flat = x.reshape(x.shape[0], -1)
    out = np.empty_like(flat)
    for i in range(flat.shape[0]):
        out[i] = fn(np.array(flat[i]))
    return out.reshape(x.shape)


def _require_2d(t: Tensor, op: str) -> None:
    if t.ndim != 2:
        raise ShapeError(f"{op} expects a 2-D tensor, got shape {t.shape}")


# ---------------------------------------------------------------------------
# Elementwise arithmetic
# ---------------------------------------------------------------------------
def add(a, b) -> Tensor:
    a = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b = _as_tensor(b, a)
    try:
        data = a.data + b.data
    except ValueError as exc:
        raise ShapeError(f"add: cannot broadcast {a.shape} and {b.shape}") from exc

    def backward(g: np.ndarray) -> None:
        a.accumulate_grad(_unbroadcast(g, a.shape))
        b.accumulate_grad(_unbroadcast(g, b.shape))

    return Tensor.from_op(data, (a, b), backward, "add")


def sub(a, b) -> Tensor:
    a = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b = _as_tensor(b, a)
    try:
        data = a.data - b.data
    except ValueError as exc:
        raise ShapeError(f"sub: cannot broadcast {a.shape} and {b.shape}") from exc

    def backward(g: np.ndarray) -> None:
        a.accumulate_grad(_unbroadcast(g, a.shape))
        b.accumulate_grad(_unbroadcast(-g, b.shape))

    return Tensor.from_op(data, (a, b), backward, "sub")


def mul(a, b) -> Tensor:
    a = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b = _as_tensor(b, a)
    try:
        data = a.data * b.data
    except ValueError as exc:
        raise ShapeError(f"mul: cannot broadcast {a.shape} and {b.shape}") from exc

    def backward(g: np.ndarray) -> None:
        a.accumulate_grad(_unbroadcast(g * b.data, a.shape))
        b.accumulate_grad(_unbroadcast(g * a.data, b.shape))

    return Tensor.from_op(data, (a, b), backward, "mul")


def scale(a: Tensor, factor: float) -> Tensor:
    """Multiply by a constant."""
    c = a.dtype.type(factor)
    data = a.data * c

    def backward(g: np.ndarray) -> None:
        a.accumulate_grad(g * c)

    return Tensor.from_op(data, (a,), backward, "scale")


def add_n(tensors: Sequence[Tensor]) -> Tensor:
    """Sum same-shape tensors left to right."""
    if not tensors:
        raise ShapeError("add_n needs at least one tensor")
    shape = tensors[0].shape
    for t in tensors:
        if t.shape != shape:
            raise ShapeError(f"add_n: shape {t.shape} differs from {shape}")
    data = np.array(tensors[0].data, copy=True)
    for t in tensors[1:]:
        data = data + t.data

    def backward(g: np.ndarray) -> None:
        for t in tensors:
            t.accumulate_grad(g)

    return Tensor.from_op(data, tuple(tensors), backward, "add_n")


def mean(tensors: Sequence[Tensor]) -> Tensor:
    """Arithmetic mean of same-shape tensors (fixed order)."""
    return scale(add_n(tensors), 1.0 / len(tensors))


# ---------------------------------------------------------------------------
# Matrix ops
# ---------------------------------------------------------------------------
def matmul(a: Tensor, b: Tensor) -> Tensor:
    """
    Matrix product C = A·B.

    Backward: dA = dC·Bᵀ, dB = Aᵀ·dC.

    Raises:
        ShapeError: when either operand is not 2-D or the inner dims differ
    """
    a = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b = _as_tensor(b, a)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner dimensions differ: {a.shape} @ {b.shape}")
    data = kernels.matmul(a.data, b.data)

    def backward(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(kernels.matmul(g, b.data.T))
        if b.requires_grad:
            b.accumulate_grad(kernels.matmul(a.data.T, g))

    return Tensor.from_op(data, (a, b), backward, "matmul")


def transpose(a: Tensor) -> Tensor:
    _require_2d(a, "transpose")
    data = np.ascontiguousarray(a.data.T)

    def backward(g: np.ndarray) -> None:
        a.accumulate_grad(g.T)

    return Tensor.from_op(data, (a,), backward, "transpose")


def take_rows(a: Tensor, indices: Sequence[int]) -> Tensor:
    """Gather rows of a 2-D tensor."""
    _require_2d(a, "take_rows")
    idx = np.asarray(indices, dtype=np.int64).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= a.shape[0]):
        raise IndexRangeError(f"row index out of range for {a.shape[0]} rows")
    data = a.data[idx]

    def backward(g: np.ndarray) -> None:
        if a.requires_grad:
            grad = np.zeros_like(a.data)
            np.add.at(grad, idx, g)
            a.accumulate_grad(grad)

    return Tensor.from_op(data, (a,), backward, "take_rows")


def embedding_lookup(table: Tensor, ids: Sequence[int]) -> Tensor:
    """Look up token ids in an embedding table [|V|×d]."""
    idx = np.asarray(ids, dtype=np.int64).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= table.shape[0]):
        bad = int(idx.max()) if idx.max() >= table.shape[0] else int(idx.min())
        raise IndexRangeError(f"token id {bad} outside vocabulary of size {table.shape[0]}")
    out = take_rows(table, idx)
    out.op = "embedding_lookup"
    return out


def concat_rows(tensors: Sequence[Tensor]) -> Tensor:
    if not tensors:
        raise ShapeError("concat_rows needs at least one tensor")
    for t in tensors:
        _require_2d(t, "concat_rows")
    width = tensors[0].shape[1]
    if any(t.shape[1] != width for t in tensors):
        raise ShapeError("concat_rows: column counts differ")
    data = np.concatenate([t.data for t in tensors], axis=0)
    bounds = np.cumsum([0] + [t.shape[0] for t in tensors])

    def backward(g: np.ndarray) -> None:
        for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
            t.accumulate_grad(g[lo:hi])

    return Tensor.from_op(data, tuple(tensors), backward, "concat_rows")


def concat_cols(tensors: Sequence[Tensor]) -> Tensor:
    if not tensors:
        raise ShapeError("concat_cols needs at least one tensor")
    for t in tensors:
        _require_2d(t, "concat_cols")
    height = tensors[0].shape[0]
    if any(t.shape[0] != height for t in tensors):
        raise ShapeError("concat_cols: row counts differ")
    data = np.concatenate([t.data for t in tensors], axis=1)
    bounds = np.cumsum([0] + [t.shape[1] for t in tensors])

    def backward(g: np.ndarray) -> None:
        for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
            t.accumulate_grad(g[:, lo:hi])

    return Tensor.from_op(data, tuple(tensors), backward, "concat_cols")


def slice_cols(a: Tensor, start: int, stop: int) -> Tensor:
    _require_2d(a, "slice_cols")
    if not 0 <= start < stop <= a.shape[1]:
        raise ShapeError(f"column slice [{start}:{stop}] invalid for width {a.shape[1]}")
    data = np.ascontiguousarray(a.data[:, start:stop])

    def backward(g: np.ndarray) -> None:
        grad = np.zeros_like(a.data)
        grad[:, start:stop] = g
        a.accumulate_grad(grad)

    return Tensor.from_op(data, (a,), backward, "slice_cols")


def mean_rows(x: Tensor, valid_len: int | None = None) -> Tensor:
    """Mean of the first `valid_len` rows, returned as a [1×d] tensor."""
    _require_2d(x, "mean_rows")
    n = x.shape[0] if valid_len is None else int(valid_len)
    if not 1 <= n <= x.shape[0]:
        raise ShapeError(f"valid_len {n} outside 1..{x.shape[0]}")
    inv = x.dtype.type(1.0 / n)
    data = (kernels.col_sum(x.data[:n]) * inv).reshape(1, -1)

    def backward(g: np.ndarray) -> None:
        grad = np.zeros_like(x.data)
        grad[:n] = g.reshape(1, -1) * inv
        x.accumulate_grad(grad)

    return Tensor.from_op(data, (x,), backward, "mean_rows")


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------
def rms_norm(x: Tensor, weight: Tensor, eps: float = 1e-6) -> Tensor:
    """y = x / sqrt(mean(x²) + eps) · weight, per row."""
    _require_2d(x, "rms_norm")
    d = x.shape[1]
    if weight.shape != (d,):
        raise ShapeError(f"rms_norm weight shape {weight.shape} != ({d},)")
    xd = x.data
    ms = kernels.row_sum(xd * xd) / xd.dtype.type(d)
    r = (1.0 / np.sqrt(ms + xd.dtype.type(eps))).astype(xd.dtype)
    xhat = xd * r[:, None]
    data = xhat * weight.data

    def backward(g: np.ndarray) -> None:
        if weight.requires_grad:
            weight.accumulate_grad(kernels.col_sum(g * xhat))
        if x.requires_grad:
            gxhat = g * weight.data
            proj = kernels.row_sum(gxhat * xhat) / xd.dtype.type(d)
            x.accumulate_grad(r[:, None] * (gxhat - xhat * proj[:, None]))

    return Tensor.from_op(data, (x, weight), backward, "rms_norm")


def layer_norm(x: Tensor, weight: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Standard layer normalization over the last axis."""
    _require_2d(x, "layer_norm")
    d = x.shape[1]
    if weight.shape != (d,) or bias.shape != (d,):
        raise ShapeError("layer_norm weight/bias must have shape (d,)")
    xd = x.data
    fd = xd.dtype.type(d)
    mu = kernels.row_sum(xd) / fd
    xc = xd - mu[:, None]
    var = kernels.row_sum(xc * xc) / fd
    r = (1.0 / np.sqrt(var + xd.dtype.type(eps))).astype(xd.dtype)
    xhat = xc * r[:, None]
    data = xhat * weight.data + bias.data

    def backward(g: np.ndarray) -> None:
        if weight.requires_grad:
            weight.accumulate_grad(kernels.col_sum(g * xhat))
        if bias.requires_grad:
            bias.accumulate_grad(kernels.col_sum(g))
        if x.requires_grad:
            gxhat = g * weight.data
            s1 = kernels.row_sum(gxhat)
            s2 = kernels.row_sum(gxhat * xhat)
            x.accumulate_grad((r / fd)[:, None] * (fd * gxhat - s1[:, None] - xhat * s2[:, None]))

    return Tensor.from_op(data, (x, weight, bias), backward, "layer_norm")


def l2_normalize_rows(x: Tensor, eps: float = 1e-12) -> Tensor:
    _require_2d(x, "l2_normalize_rows")
    xd = x.data
    norms = np.sqrt(kernels.row_sum(xd * xd)) + xd.dtype.type(eps)
    y = xd / norms[:, None]

    def backward(g: np.ndarray) -> None:
        dot = kernels.row_sum(g * y)
        x.accumulate_grad((g - y * dot[:, None]) / norms[:, None])

    return Tensor.from_op(y, (x,), backward, "l2_normalize_rows")


# ---------------------------------------------------------------------------
# Activations
# ---------------------------------------------------------------------------
def gelu(x: Tensor) -> Tensor:
    """GELU, tanh approximation."""
    xd = x.data
    inner = xd.dtype.type(SQRT_2_OVER_PI) * (xd + xd.dtype.type(GELU_COEFF) * xd * xd * xd)
    t = _rowwise(np.tanh, inner)
    half = xd.dtype.type(0.5)
    data = half * xd * (1 + t)

    def backward(g: np.ndarray) -> None:
        dinner = xd.dtype.type(SQRT_2_OVER_PI) * (1 + xd.dtype.type(3 * GELU_COEFF) * xd * xd)
        local = half * (1 + t) + half * xd * (1 - t * t) * dinner
        x.accumulate_grad(g * local)

    return Tensor.from_op(data, (x,), backward, "gelu")


def _sigmoid(v: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-v))


def silu(x: Tensor) -> Tensor:
    """SiLU / swish: x·σ(x)."""
    xd = x.data
    s = _rowwise(_sigmoid, xd).astype(xd.dtype)
    data = xd * s

    def backward(g: np.ndarray) -> None:
        x.accumulate_grad(g * (s * (1 + xd * (1 - s))))

    return Tensor.from_op(data, (x,), backward, "silu")


# ---------------------------------------------------------------------------
# Rotary position embedding
# ---------------------------------------------------------------------------
@lru_cache(maxsize=32)
def rope_table(n_positions: int, head_dim: int, base: float, dtype_name: str) -> tuple[np.ndarray, np.ndarray]:
    """cos/sin tables [n_positions × head_dim/2], each row computed on its own."""
    if head_dim % 2:
        raise ShapeError(f"rotary embedding needs an even head dim, got {head_dim}")
    inv_freq = 1.0 / (float(base) ** (np.arange(0, head_dim, 2, dtype=np.float64) / head_dim))
    cos = np.empty((n_positions, head_dim // 2), dtype=np.float64)
    sin = np.empty_like(cos)
    for p in range(n_positions):
        angles = np.array(p * inv_freq)
        cos[p] = np.cos(angles)
        sin[p] = np.sin(angles)
    dtype = np.dtype(dtype_name)
    cos, sin = cos.astype(dtype), sin.astype(dtype)
    cos.setflags(write=False)
    sin.setflags(write=False)
    return cos, sin


def rope_rotate(x: Tensor, positions: Sequence[int], base: float = 10000.0, n_positions: int | None = None) -> Tensor:
    """
    Rotate interleaved feature pairs of each row by its own position id.

    Args:
        x: [L × d_h] tensor (d_h even)
        positions: explicit position id per row
        base: rotary frequency base
        n_positions: size of the cos/sin table (defaults to max(positions)+1)
    """
    _require_2d(x, "rope_rotate")
    pos = np.asarray(positions, dtype=np.int64).reshape(-1)
    if pos.shape[0] != x.shape[0]:
        raise ShapeError(f"{pos.shape[0]} position ids for {x.shape[0]} rows")
    if pos.size and pos.min() < 0:
        raise IndexRangeError("position ids must be non-negative")
    size = n_positions if n_positions is not None else (int(pos.max()) + 1 if pos.size else 1)
    if pos.size and pos.max() >= size:
        raise IndexRangeError(f"position id {int(pos.max())} outside table of {size}")
    cos_t, sin_t = rope_table(size, x.shape[1], float(base), x.dtype.name)
    c, s = cos_t[pos], sin_t[pos]
    x1, x2 = x.data[:, 0::2], x.data[:, 1::2]
    data = np.empty_like(x.data)
    data[:, 0::2] = x1 * c - x2 * s
    data[:, 1::2] = x1 * s + x2 * c

    def backward(g: np.ndarray) -> None:
        g1, g2 = g[:, 0::2], g[:, 1::2]
        grad = np.empty_like(g)
        grad[:, 0::2] = g1 * c + g2 * s
        grad[:, 1::2] = g2 * c - g1 * s
        x.accumulate_grad(grad)

    return Tensor.from_op(data, (x,), backward, "rope_rotate")


# ---------------------------------------------------------------------------
# Attention
# ---------------------------------------------------------------------------
def attention_weights(q: np.ndarray, k: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """
    Row-softmax of scaled scores over allowed positions only.

    Disallowed positions get exactly zero weight; the softmax of each row is
    computed on the gathered allowed scores alone.
    """
    mask = np.asarray(mask, dtype=bool)
    L = q.shape[0]
    if mask.shape != (L, k.shape[0]):
        raise ShapeError(f"mask shape {mask.shape} does not match ({L}, {k.shape[0]})")
    empty = np.flatnonzero(~mask.any(axis=1))
    if empty.size:
        raise DegenerateAttentionError(f"attention mask row {int(empty[0])} allows no position")
    scale_ = q.dtype.type(1.0 / math.sqrt(q.shape[1]))
    scores = kernels.matmul(q, np.ascontiguousarray(k.T)) * scale_
    weights = np.zeros_like(scores)
    for i in range(L):
        allowed = np.flatnonzero(mask[i])
        row = np.array(scores[i, allowed])
        e = np.exp(row - row.max())
        weights[i, allowed] = e / kernels.row_sum(e)
    return weights


def masked_attention(q: Tensor, k: Tensor, v: Tensor, mask: np.ndarray) -> Tensor:
    """
    Single-head scaled dot-product attention under a boolean mask.

    mask[i][j] = True means position i may attend to position j.

    Raises:
        DegenerateAttentionError: when a mask row has no True entry
    """
    for t, name in ((q, "q"), (k, "k"), (v, "v")):
        _require_2d(t, f"masked_attention ({name})")
    if q.shape[1] != k.shape[1] or k.shape[0] != v.shape[0]:
        raise ShapeError(f"attention shapes q{q.shape} k{k.shape} v{v.shape} are inconsistent")
    w = attention_weights(q.data, k.data, mask)
    data = kernels.matmul(w, v.data)
    scale_ = q.dtype.type(1.0 / math.sqrt(q.shape[1]))

    def backward(g: np.ndarray) -> None:
        if v.requires_grad:
            v.accumulate_grad(kernels.matmul(np.ascontiguousarray(w.T), g))
        gw = kernels.matmul(g, np.ascontiguousarray(v.data.T))
        gs = w * (gw - kernels.row_sum(w * gw)[:, None])
        if q.requires_grad:
            q.accumulate_grad(kernels.matmul(gs, k.data) * scale_)
        if k.requires_grad:
            k.accumulate_grad(kernels.matmul(np.ascontiguousarray(gs.T), q.data) * scale_)

    return Tensor.from_op(data, (q, k, v), backward, "masked_attention")


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------
def _log_softmax64(row: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(row, dtype=np.float64)
    m = x.max()
    e = np.exp(x - m)
    z = kernels.row_sum(e)
    return x - (m + math.log(z)), e / z


def softmax_cross_entropy(logits: Tensor, target_counts: Mapping[int, int]) -> Tensor:
    """
    Bag-of-tokens cross entropy.

    loss = -(1/Σc) · Σ_t c(t) · log softmax(logits)[t], accumulated in
    ascending token order so the value does not depend on how the target
    multiset was built.

    Raises:
        EmptyTargetError: no target with a positive count
        OutOfVocabularyError: a target id is negative or ≥ |V|
    """
    vocab = logits.size
    if logits.ndim == 2 and logits.shape[0] != 1:
        raise ShapeError(f"softmax_cross_entropy expects one logit row, got {logits.shape}")
    items = sorted((int(t), int(c)) for t, c in target_counts.items() if int(c) > 0)
    if not items:
        raise EmptyTargetError("target multiset is empty")
    bad = [t for t, _ in items if t < 0 or t >= vocab]
    if bad:
        raise OutOfVocabularyError(f"target token {bad[0]} outside vocabulary of size {vocab}")
    total = float(sum(c for _, c in items))
    logp, probs = _log_softmax64(logits.data.reshape(-1))
    acc = 0.0
    for t, c in items:
        acc += c * logp[t]
    data = np.asarray(-acc / total, dtype=logits.dtype)

    def backward(g: np.ndarray) -> None:
        grad = probs.copy()
        for t, c in items:
            grad[t] -= c / total
        logits.accumulate_grad((grad * float(g)).astype(logits.dtype).reshape(logits.shape))

    return Tensor.from_op(data, (logits,), backward, "softmax_cross_entropy")


def cross_entropy_rows(logits: Tensor, targets: Sequence[int]) -> Tensor:
    """Mean over rows of -log softmax(row)[target]."""
    _require_2d(logits, "cross_entropy_rows")
    B, N = logits.shape
    tgt = [int(t) for t in targets]
    if len(tgt) != B:
        raise ShapeError(f"{len(tgt)} targets for {B} rows")
    if any(t < 0 or t >= N for t in tgt):
        raise OutOfVocabularyError(f"target index outside 0..{N - 1}")
    probs = np.empty((B, N), dtype=np.float64)
    acc = 0.0
    for i, t in enumerate(tgt):
        logp, p = _log_softmax64(logits.data[i])
        probs[i] = p
        acc += logp[t]
    data = np.asarray(-acc / B, dtype=logits.dtype)

    def backward(g: np.ndarray) -> None:
        grad = probs.copy()
        grad[np.arange(B), tgt] -= 1.0
        logits.accumulate_grad((grad * (float(g) / B)).astype(logits.dtype))

    return Tensor.from_op(data, (logits,), backward, "cross_entropy_rows")


def mse(a: Tensor, b: Tensor) -> Tensor:
    """Mean squared error between same-shape tensors."""
    if a.shape != b.shape:
        raise ShapeError(f"mse shapes differ: {a.shape} vs {b.shape}")
    diff = (a.data - b.data).astype(np.float64)
    n = diff.size
    data = np.asarray(kernels.row_sum((diff * diff).reshape(1, -1))[0] / n, dtype=a.dtype)

    def backward(g: np.ndarray) -> None:
        grad = (2.0 * float(g) / n) * diff
        a.accumulate_grad(grad.astype(a.dtype))
        b.accumulate_grad((-grad).astype(b.dtype))

    return Tensor.from_op(data, (a, b), backward, "mse")
