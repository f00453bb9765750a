"""
Vocabulary projection of embeddings through the head.
"""

from typing import Union

import numpy as np

from numerics import kernels
from transformer_model.model import TransformerModel
from transformer_model.models import Embedding

from .exceptions import InvalidProjectionError
from .models import VocabProjection


def vocab_logits(model: TransformerModel, embedding: Union[Embedding, np.ndarray]) -> np.ndarray:
    """eᵀW in float64, shape [|V|]."""
    e = embedding.numpy() if isinstance(embedding, Embedding) else np.asarray(embedding)
    e = e.astype(np.float64).reshape(1, -1)
    w = model.head_weight().data.astype(np.float64)
    if e.shape[1] != w.shape[0]:
        raise InvalidProjectionError(f"embedding dimension {e.shape[1]} != head input dimension {w.shape[0]}")
    return kernels.matmul(e, w).reshape(-1)


def vocab_project(
    model: TransformerModel,
    embedding: Union[Embedding, np.ndarray],
    n: int,
    kind: str = "plain",
) -> VocabProjection:
    """
    Top-n token ids of eᵀW, by descending logit then ascending id.

    Raises:
        InvalidProjectionError: n < 1 or dimension mismatch
    """
    if n < 1:
        raise InvalidProjectionError(f"N must be at least 1, got {n}")
    if isinstance(embedding, Embedding):
        kind = embedding.kind.value
    logits = vocab_logits(model, embedding)
    order = np.lexsort((np.arange(logits.shape[0]), -logits))
    return VocabProjection(kind=kind, token_ids=tuple(int(i) for i in order[:n]), n=n)
