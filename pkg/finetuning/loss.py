"""
In-batch contrastive loss.
"""

from typing import Optional, Sequence

from numerics import ops
from numerics.tensor import Tensor

from .exceptions import DuplicateDocumentError


def contrastive_loss(
    query_embs: Tensor,
    doc_embs: Tensor,
    positive_index: Sequence[int],
    temperature: float = 1.0,
    doc_ids: Optional[Sequence[str]] = None,
) -> Tensor:
    """
    Mean over queries of -log softmax(<q, d> / τ) at the query's positive.

    Every document of the batch is a candidate for every query, so other
    queries' positives and all mined negatives act as negatives.

    Args:
        query_embs: [B × d]
        doc_embs: [M × d]
        positive_index: row of doc_embs holding each query's positive
        doc_ids: ids of the doc rows, checked for duplicates when given

    Raises:
        DuplicateDocumentError: a doc id occurs twice
        ValueError: temperature ≤ 0 or positive_index not matching B
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if len(positive_index) != query_embs.shape[0]:
        raise ValueError(f"{len(positive_index)} positives for {query_embs.shape[0]} queries")
    if doc_ids is not None:
        if len(doc_ids) != doc_embs.shape[0]:
            raise ValueError(f"{len(doc_ids)} doc ids for {doc_embs.shape[0]} doc embeddings")
        seen = set()
        for doc_id in doc_ids:
            if doc_id in seen:
                raise DuplicateDocumentError(f"doc id '{doc_id}' appears twice in the batch")
            seen.add(doc_id)
    scores = ops.matmul(query_embs, ops.transpose(doc_embs))
    if temperature != 1.0:
        scores = ops.scale(scores, 1.0 / temperature)
    return ops.cross_entropy_rows(scores, positive_index)
