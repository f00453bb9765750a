"""
Exact inner-product search.

Scores are accumulated in float64 with the fixed-order matmul kernel;
rankings sort by descending score with ascending doc id breaking ties, so
a ranking is a pure function of the vectors and ids.
"""

import logging
from typing import Mapping

import numpy as np

from eval_metrics.models import RunFile
from numerics import kernels

from .config import DEFAULT_TOP_K
from .exceptions import InvalidSearchError
from .models import DenseIndex, SearchResult

logger = logging.getLogger(__name__)


def score_all(index: DenseIndex, query: np.ndarray) -> np.ndarray:
    """Inner product of the query with every stored vector, float64 [N]."""
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != index.dim:
        raise InvalidSearchError(f"query dimension {q.shape[0]} != index dimension {index.dim}")
    docs = np.asarray(index.vectors, dtype=np.float64)
    return kernels.matmul(docs, q.reshape(-1, 1)).reshape(-1)


def search(index: DenseIndex, query: np.ndarray, k: int) -> SearchResult:
    """
    Top-k documents by inner product.

    When k exceeds the index size all N documents are returned and the
    result is flagged as truncated.

    Raises:
        InvalidSearchError: k < 1 or wrong query dimension
    """
    if k < 1:
        raise InvalidSearchError(f"k must be at least 1, got {k}")
    scores = score_all(index, query)
    order = sorted(range(len(index)), key=lambda i: (-scores[i], index.doc_ids[i]))
    truncated = k > len(index)
    hits = [(index.doc_ids[i], float(scores[i])) for i in order[:k]]
    return SearchResult(hits=hits, truncated=truncated)


def search_many(
    index: DenseIndex,
    queries: Mapping[str, np.ndarray],
    k: int = DEFAULT_TOP_K,
    tag: str = "ebadapt",
) -> RunFile:
    """Search every query; returns a RunFile keyed by query id."""
    rankings = {}
    truncated = 0
    for qid in sorted(queries):
        result = search(index, queries[qid], k)
        truncated += result.truncated
        rankings[qid] = result.hits
    if truncated:
        logger.warning(f"k={k} exceeds index size {len(index)}; returned all documents for {truncated} queries")
    logger.info(f"Searched {len(rankings)} queries against {len(index)} documents (k={k})")
    return RunFile(rankings=rankings, tag=tag)
