"""
Top-N sparsification.
"""

import numpy as np

from .exceptions import InvalidCompressionError


def sparsify(vectors: np.ndarray, n_keep: int) -> np.ndarray:
    """
    Keep the n_keep largest-magnitude entries of each vector and zero the rest.

    Works on one vector [d] or a matrix [n × d]; the dimension is unchanged.
    At the cutoff magnitude the lower index wins.

    Raises:
        InvalidCompressionError: n_keep outside 1..d
    """
    v = np.asarray(vectors)
    d = v.shape[-1]
    if not 1 <= n_keep <= d:
        raise InvalidCompressionError(f"n_keep must be in 1..{d}, got {n_keep}")
    rows = v.reshape(-1, d)
    keep = np.argsort(-np.abs(rows), axis=1, kind="stable")[:, :n_keep]
    out = np.zeros_like(rows)
    np.put_along_axis(out, keep, np.take_along_axis(rows, keep, axis=1), axis=1)
    return out.reshape(v.shape)
