"""
Okapi BM25 over an in-memory inverted index.

    score(q, d) = Σ_{t ∈ q} idf(t) · tf·(k1+1) / (tf + k1·(1 − b + b·|d|/avgdl))
    idf(t)      = ln((N − df + 0.5) / (df + 0.5) + 1)

Terms may be any hashable value (words or token ids). Query terms are
summed in query order, repeats included.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Mapping, Sequence, Tuple

from eval_metrics.models import RunFile

from .exceptions import UnknownDocumentError

logger = logging.getLogger(__name__)

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


@dataclass
class Bm25Index:
    """
    Inverted index with BM25 statistics.

    Invariants:
        - postings of every term are sorted by doc id
        - avg_doc_len is the mean of doc_lengths
    """
    postings: Dict[Hashable, List[Tuple[str, int]]] = field(default_factory=dict)
    doc_lengths: Dict[str, int] = field(default_factory=dict)
    avg_doc_len: float = 0.0
    n_docs: int = 0
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    _tf: Dict[str, Counter] = field(default_factory=dict, repr=False)

    @classmethod
    def from_documents(
        cls,
        documents: Sequence[Tuple[str, Sequence[Hashable]]],
        k1: float = DEFAULT_K1,
        b: float = DEFAULT_B,
    ) -> "Bm25Index":
        """Index (doc id, terms) pairs."""
        tf: Dict[str, Counter] = {}
        for doc_id, terms in documents:
            if doc_id in tf:
                raise ValueError(f"duplicate doc id '{doc_id}' in BM25 collection")
            tf[doc_id] = Counter(terms)
        postings: Dict[Hashable, List[Tuple[str, int]]] = {}
        for doc_id in sorted(tf):
            for term, count in tf[doc_id].items():
                postings.setdefault(term, []).append((doc_id, count))
        lengths = {doc_id: sum(c.values()) for doc_id, c in tf.items()}
        n = len(lengths)
        avg = sum(lengths[d] for d in sorted(lengths)) / n if n else 0.0
        return cls(postings=postings, doc_lengths=lengths, avg_doc_len=avg, n_docs=n, k1=k1, b=b, _tf=tf)

    def df(self, term: Hashable) -> int:
        return len(self.postings.get(term, ()))

    def idf(self, term: Hashable) -> float:
        df = self.df(term)
        return math.log((self.n_docs - df + 0.5) / (df + 0.5) + 1.0)

    def term_weight(self, tf: int, doc_len: int) -> float:
        norm = 1.0 - self.b + self.b * doc_len / self.avg_doc_len if self.avg_doc_len > 0 else 1.0
        return tf * (self.k1 + 1.0) / (tf + self.k1 * norm)


def bm25_score(index: Bm25Index, query_terms: Sequence[Hashable], doc_id: str) -> float:
    """
    BM25 score of one document for a query.

    Raises:
        UnknownDocumentError: doc_id is not indexed
    """
    if doc_id not in index.doc_lengths:
        raise UnknownDocumentError(f"document '{doc_id}' is not in the BM25 index")
    tf = index._tf[doc_id]
    dl = index.doc_lengths[doc_id]
    score = 0.0
    for term in query_terms:
        count = tf.get(term, 0)
        if count:
            score += index.idf(term) * index.term_weight(count, dl)
    return score


def bm25_rank(index: Bm25Index, query_terms: Sequence[Hashable], k: int) -> List[Tuple[str, float]]:
    """Top-k documents sharing at least one term, by (−score, doc id)."""
    scores: Dict[str, float] = {}
    for term in query_terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = index.idf(term)
        for doc_id, count in plist:
            scores[doc_id] = scores.get(doc_id, 0.0) + idf * index.term_weight(count, index.doc_lengths[doc_id])
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]


def bm25_search(
    index: Bm25Index,
    queries: Mapping[str, Sequence[Hashable]],
    k: int = 1000,
    tag: str = "bm25",
) -> RunFile:
    """Rank the collection for every query; returns a RunFile."""
    if k < 1:
        raise ValueError(f"k must be ≥ 1, got {k}")
    rankings = {qid: bm25_rank(index, queries[qid], k) for qid in sorted(queries)}
    logger.info(f"BM25 search: {len(rankings)} queries over {index.n_docs} docs (k={k})")
    return RunFile(rankings, tag=tag)
