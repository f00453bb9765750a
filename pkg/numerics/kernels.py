"""
Fixed-order reduction kernels.

Every reduction in this module accumulates strictly left to right along the
reduced axis. The value of an output element therefore depends only on the
inputs that feed it, never on the size of the surrounding array, and exact
zeros interleaved in a reduction leave the result untouched. The one-pass
joint prompt relies on this to match two separate passes bit for bit.

numba is used when installed; the numpy fallback keeps the same
accumulation order (no fused multiply-add in either path).
"""

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False


if HAS_NUMBA:

    @njit(nogil=True)
    def _matmul_kernel(a, b, out):
        m, k = a.shape
        n = b.shape[1]
        for i in range(m):
            for p in range(k):
                aip = a[i, p]
                for j in range(n):
                    out[i, j] += aip * b[p, j]
        return out

    @njit(nogil=True)
    def _row_sum_kernel(x, out):
        m, n = x.shape
        for i in range(m):
            acc = out[i]
            for j in range(n):
                acc += x[i, j]
            out[i] = acc
        return out

    @njit(nogil=True)
    def _col_sum_kernel(x, out):
        m, n = x.shape
        for i in range(m):
            for j in range(n):
                out[j] += x[i, j]
        return out

else:

    def _matmul_kernel(a, b, out):
        for p in range(a.shape[1]):
            out += a[:, p:p + 1] * b[p:p + 1, :]
        return out

    def _row_sum_kernel(x, out):
        for j in range(x.shape[1]):
            out += x[:, j]
        return out

    def _col_sum_kernel(x, out):
        for i in range(x.shape[0]):
            out += x[i]
        return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Matrix product with sequential accumulation over the inner dimension.

    Args:
        a: array of shape (m, k)
        b: array of shape (k, n)

    Returns:
        array of shape (m, n) in the common dtype of the operands
    """
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    dtype = np.result_type(a.dtype, b.dtype)
    a = np.ascontiguousarray(a, dtype=dtype)
    b = np.ascontiguousarray(b, dtype=dtype)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=dtype)
    return _matmul_kernel(a, b, out)


def row_sum(x: np.ndarray) -> np.ndarray:
    """Sum over the last axis of a 2-D array (or all of a 1-D array), left to right."""
    if x.ndim == 1:
        return row_sum(x.reshape(1, -1))[0]
    x = np.ascontiguousarray(x)
    out = np.zeros(x.shape[0], dtype=x.dtype)
    return _row_sum_kernel(x, out)


def col_sum(x: np.ndarray) -> np.ndarray:
    """Sum over the first axis of a 2-D array, top to bottom."""
    x = np.ascontiguousarray(x)
    out = np.zeros(x.shape[1], dtype=x.dtype)
    return _col_sum_kernel(x, out)


def sum_leading(x: np.ndarray) -> np.ndarray:
    """Collapse axis 0 of an array of any rank with `col_sum`."""
    if x.ndim == 1:
        return row_sum(x)
    flat = x.reshape(x.shape[0], -1)
    return col_sum(flat).reshape(x.shape[1:])
