"""
Hard-negative mining from the retriever's own top-k.
"""

import logging
from typing import Iterable, List, Mapping, Optional, Sequence

import numpy as np

from corpus_toolkit.models import Document
from retrieval_index.encoder import TextEncoder
from retrieval_index.models import DenseIndex
from retrieval_index.search import search

from .models import TrainPair

logger = logging.getLogger(__name__)


def _judged(judged, query_id: str) -> set:
    if judged is None:
        return set()
    if hasattr(judged, "relevant"):
        return set(judged.relevant(query_id))
    return set(judged.get(query_id, ()))


def mine_hard_negatives(
    encoder: TextEncoder,
    pairs: Sequence[TrainPair],
    documents: Sequence[Document],
    k_window: int,
    n_negatives: int,
    judged: Optional[Mapping[str, Iterable[str]]] = None,
    seed: int = 0,
    index: Optional[DenseIndex] = None,
) -> List[TrainPair]:
    """
    Replace each pair's negatives with docs sampled from retrieval ranks 2..k_window.

    The pair's positive and every judged positive of its query are never
    sampled. When the window holds too few candidates the rest is drawn at
    random from the corpus and a warning is logged.

    Args:
        encoder: embeds queries (and the corpus when `index` is omitted)
        judged: Qrels or query id → relevant doc ids
        index: prebuilt corpus index from the same encoder
    """
    if k_window < 2:
        raise ValueError(f"k_window must be at least 2, got {k_window}")
    if n_negatives < 0:
        raise ValueError(f"n_negatives cannot be negative, got {n_negatives}")
    if index is None:
        index = encoder.embed_corpus(documents)
    else:
        encoder.check_index(index)

    texts = {d.doc_id: d.text for d in documents}
    corpus_ids = sorted(texts)
    rng = np.random.default_rng(seed)
    query_kind = encoder.kind_for("query")
    token_cache = {}

    def tokens(doc_id: str):
        if doc_id not in token_cache:
            token_cache[doc_id] = tuple(encoder.tokenizer.encode(texts[doc_id]))
        return token_cache[doc_id]

    mined = []
    shortfalls = 0
    for pair in pairs:
        excluded = _judged(judged, pair.query_id) | {pair.positive_id}
        chosen: List[str] = []
        if n_negatives > 0:
            query_vec = encoder.embed_ids(pair.query, query_kind)
            hits = search(index, query_vec, k_window).doc_ids[1:]
            window = [doc_id for doc_id in hits if doc_id not in excluded]
            take = min(n_negatives, len(window))
            picks = rng.choice(len(window), size=take, replace=False) if take else []
            chosen = [window[int(i)] for i in picks]
            if len(chosen) < n_negatives:
                shortfalls += 1
                pool = [d for d in corpus_ids if d not in excluded and d not in chosen]
                extra = min(n_negatives - len(chosen), len(pool))
                chosen += [pool[int(i)] for i in rng.choice(len(pool), size=extra, replace=False)] if extra else []
                logger.warning(
                    f"Query '{pair.query_id}': {len(window)} candidates in ranks 2..{k_window}, "
                    f"filled to {len(chosen)} of {n_negatives} negatives from random corpus docs"
                )
        mined.append(pair.with_negatives((doc_id, tokens(doc_id)) for doc_id in chosen))

    logger.info(
        f"Mined {n_negatives} negatives for {len(mined)} pairs from ranks 2..{k_window} "
        f"({shortfalls} pairs filled at random)"
    )
    return mined
