"""
Batch assembly with unique doc ids.

Positives come first in pair order (row i is pair i's positive), then the
hard negatives. A pair whose positive is already in the batch is deferred
to a later batch; a negative already in the batch is dropped.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from numerics import ops
from numerics.tensor import Tensor
from prompt_builder.builder import build_single
from prompt_builder.models import PromptKind
from prompt_builder.templates import PromptTemplates
from transformer_model.model import TransformerModel

from .models import Batch, TrainPair

logger = logging.getLogger(__name__)


class BatchAssembler:
    """Endless stream of batches over epoch permutations of the pairs."""

    def __init__(self, pairs: Sequence[TrainPair], batch_size: int, seed: int = 0):
        if not pairs:
            raise ValueError("no training pairs")
        self.pairs = list(pairs)
        self.batch_size = min(batch_size, len(self.pairs))
        self.rng = np.random.default_rng(seed)
        self._order: List[int] = []
        self._deferred: List[int] = []

    def _next_index(self) -> int:
        if self._deferred:
            return self._deferred.pop(0)
        if not self._order:
            self._order = [int(i) for i in self.rng.permutation(len(self.pairs))]
        return self._order.pop(0)

    def next_batch(self) -> Batch:
        chosen: List[TrainPair] = []
        used = set()
        skipped: List[int] = []
        # a full pass over the pairs bounds the search for compatible pairs
        for _ in range(len(self.pairs) + len(self._deferred)):
            if len(chosen) == self.batch_size:
                break
            idx = self._next_index()
            pair = self.pairs[idx]
            if pair.positive_id in used:
                skipped.append(idx)
                continue
            chosen.append(pair)
            used.add(pair.positive_id)
        # negatives may collide with a later pair's positive, so positives go in first
        negatives = []
        for pair in chosen:
            for doc_id, tokens in pair.negatives:
                if doc_id not in used:
                    used.add(doc_id)
                    negatives.append((doc_id, tokens))
        self._deferred = skipped + self._deferred
        if skipped:
            logger.debug(f"Deferred {len(skipped)} pairs with a positive already in the batch")

        doc_ids = [p.positive_id for p in chosen] + [d for d, _ in negatives]
        doc_tokens = [p.positive for p in chosen] + [t for _, t in negatives]
        return Batch(pairs=chosen, doc_ids=doc_ids, doc_tokens=doc_tokens, positive_index=list(range(len(chosen))))


def embed_batch(
    model: TransformerModel,
    token_lists: Sequence[Sequence[int]],
    kind: PromptKind,
    templates: PromptTemplates,
    seq_len: int,
    projection: Optional[Tensor] = None,
    normalize: bool = False,
) -> Tensor:
    """
    Anchor embeddings of several texts stacked into [n × d] (or [n × d'] with a projection).

    Each text is its own forward pass; the result stays on the graph.
    """
    rows = [model.embed(build_single(ids, kind, templates, seq_len)).vector for ids in token_lists]
    x = ops.concat_rows(rows)
    if projection is not None:
        x = ops.matmul(x, projection)
    if normalize:
        x = ops.l2_normalize_rows(x)
    return x
