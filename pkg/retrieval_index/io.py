"""
Index files.

Layout (little-endian):
    magic b"EBIX" | uint32 version | uint64 N | uint32 d |
    uint64 metadata length | metadata JSON |
    payload | id table

The payload is N×d float32 row-major, or, when the metadata records a
sparse compression keeping n_keep ≤ d/4 entries, N×n_keep
(uint32 index, float32 value) pairs. The id table is one uint32 byte
length plus UTF-8 bytes per document.
"""

import json
import logging
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .config import INDEX_MAGIC, INDEX_VERSION
from .exceptions import IndexFormatError
from .models import DenseIndex, IndexMetadata

logger = logging.getLogger(__name__)

_PAIR = np.dtype([("index", "<u4"), ("value", "<f4")])


def _sparse_keep(metadata: IndexMetadata, dim: int) -> Optional[int]:
    comp = metadata.compression or {}
    if comp.get("method") != "sparse":
        return None
    n_keep = int(comp.get("n_keep", dim))
    return n_keep if 0 < n_keep and 4 * n_keep <= dim else None


def _top_entries(vectors: np.ndarray, n_keep: int) -> np.ndarray:
    # largest magnitudes first, lower index on ties
    order = np.argsort(-np.abs(vectors), axis=1, kind="stable")[:, :n_keep]
    return np.sort(order, axis=1)


def save_index(index: DenseIndex, path: Union[str, Path]) -> Path:
    issues = index.validate()
    if issues:
        raise IndexFormatError(f"Invalid index: {', '.join(issues)}")
    path = Path(path)
    n, d = index.vectors.shape
    meta = json.dumps(index.metadata.to_dict(), sort_keys=True).encode("utf-8")
    vectors = np.ascontiguousarray(index.vectors, dtype="<f4")
    n_keep = _sparse_keep(index.metadata, d)

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(INDEX_MAGIC)
        fh.write(struct.pack("<IQIQ", INDEX_VERSION, n, d, len(meta)))
        fh.write(meta)
        if n_keep is None:
            fh.write(vectors.tobytes())
        else:
            cols = _top_entries(vectors, n_keep)
            pairs = np.empty((n, n_keep), dtype=_PAIR)
            pairs["index"] = cols
            pairs["value"] = np.take_along_axis(vectors, cols, axis=1)
            fh.write(pairs.tobytes())
        for doc_id in index.doc_ids:
            raw = doc_id.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
    logger.info(f"Saved index {path} ({n} × {d}, {'sparse' if n_keep else 'dense'})")
    return path


def load_index(path: Union[str, Path]) -> DenseIndex:
    """
    Raises:
        IndexFormatError: bad magic, version or truncated file
    """
    path = Path(path)
    data = path.read_bytes()
    if data[:4] != INDEX_MAGIC:
        raise IndexFormatError(f"{path}: not an index file (bad magic)")
    head = struct.calcsize("<IQIQ")
    if len(data) < 4 + head:
        raise IndexFormatError(f"{path}: truncated header")
    version, n, d, meta_len = struct.unpack_from("<IQIQ", data, 4)
    if version != INDEX_VERSION:
        raise IndexFormatError(f"{path}: unsupported index version {version}")
    pos = 4 + head
    try:
        metadata = IndexMetadata.from_dict(json.loads(data[pos:pos + meta_len].decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IndexFormatError(f"{path}: corrupt metadata ({exc})") from None
    pos += meta_len

    n_keep = _sparse_keep(metadata, d)
    try:
        if n_keep is None:
            nbytes = n * d * 4
            vectors = np.frombuffer(data, dtype="<f4", count=n * d, offset=pos).reshape(n, d)
        else:
            nbytes = n * n_keep * _PAIR.itemsize
            pairs = np.frombuffer(data, dtype=_PAIR, count=n * n_keep, offset=pos).reshape(n, n_keep)
            vectors = np.zeros((n, d), dtype="<f4")
            np.put_along_axis(vectors, pairs["index"].astype(np.int64), pairs["value"], axis=1)
    except ValueError:
        raise IndexFormatError(f"{path}: payload truncated") from None
    pos += nbytes

    doc_ids = []
    for _ in range(n):
        if pos + 4 > len(data):
            raise IndexFormatError(f"{path}: id table truncated")
        (length,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if pos + length > len(data):
            raise IndexFormatError(f"{path}: id table truncated")
        doc_ids.append(data[pos:pos + length].decode("utf-8"))
        pos += length

    index = DenseIndex(doc_ids=doc_ids, vectors=vectors.astype(np.float32), metadata=metadata)
    issues = index.validate()
    if issues:
        raise IndexFormatError(f"{path}: {', '.join(issues)}")
    return index
