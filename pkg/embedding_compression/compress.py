"""
Applying a compression descriptor to vectors and indexes.

Queries and documents go through the same transform, so inner products
are always computed between compressed vectors.
"""

import dataclasses
import logging

import numpy as np

from numerics import kernels
from retrieval_index.models import DenseIndex

from .exceptions import InvalidCompressionError
from .models import CompressionDescriptor, CompressionMethod
from .sparse import sparsify

logger = logging.getLogger(__name__)


def apply_compression(vectors: np.ndarray, descriptor: CompressionDescriptor) -> np.ndarray:
    """
    Compressed copy of one vector [d] or a matrix [n × d], as float32.

    Raises:
        InvalidCompressionError: the descriptor does not fit the vectors
    """
    v = np.asarray(vectors, dtype=np.float32)
    issues = descriptor.validate(v.shape[-1])
    if issues:
        raise InvalidCompressionError(f"Invalid compression: {', '.join(issues)}")
    method = descriptor.method
    if method is CompressionMethod.NONE:
        return v.copy()
    if method is CompressionMethod.SPARSE:
        return sparsify(v, int(descriptor.n_keep))
    rows = v.reshape(-1, v.shape[-1]).astype(np.float64)
    out = kernels.matmul(rows, descriptor.projection.astype(np.float64)).astype(np.float32)
    return out.reshape(v.shape[:-1] + (out.shape[-1],))


def compress_index(index: DenseIndex, descriptor: CompressionDescriptor) -> DenseIndex:
    """A new index with compressed vectors; the descriptor is recorded in its metadata."""
    if index.metadata.compression:
        raise InvalidCompressionError("index is already compressed")
    vectors = apply_compression(index.vectors, descriptor)
    metadata = dataclasses.replace(index.metadata, dim=int(vectors.shape[1]), compression=descriptor.to_dict())
    logger.info(
        f"Compressed index of {len(index)} docs with {descriptor.method.value} "
        f"(dim {index.dim} → {vectors.shape[1]})"
    )
    return DenseIndex(doc_ids=list(index.doc_ids), vectors=vectors, metadata=metadata)


def index_descriptor(index: DenseIndex) -> CompressionDescriptor:
    """The descriptor an index was compressed with (method none when uncompressed)."""
    return CompressionDescriptor.from_dict(index.metadata.compression)


def compress_query(index: DenseIndex, query: np.ndarray) -> np.ndarray:
    """Bring a full-dimension query into the index's compressed space."""
    descriptor = index_descriptor(index)
    if descriptor.method is CompressionMethod.NONE:
        return np.asarray(query, dtype=np.float32)
    return apply_compression(query, descriptor)
