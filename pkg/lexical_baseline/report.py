"""
Lexical effect of adaptation and fine-tuning.

For each (query, answer) pair both texts are embedded with their scheme
prompts and projected to their top-N vocabulary tokens v_q and v_a. The
v_a sets form a pseudo-document collection for BM25, and the score of
v_q against its own v_a is averaged over pairs.
"""

import logging
from typing import Dict, List, Mapping, Sequence, Tuple

from corpus_toolkit.models import Document, Query
from retrieval_index.encoder import TextEncoder

from .bm25 import Bm25Index, bm25_score
from .models import LexicalReport
from .projection import vocab_project

logger = logging.getLogger(__name__)

DEFAULT_NS = (10, 100, 500, 1000)


def eval_pairs(
    queries: Sequence[Query],
    qrels: Mapping[str, Mapping[str, int]],
    documents: Sequence[Document],
) -> List[Tuple[str, str]]:
    """(query text, answer text) using each judged query's most relevant doc (lowest id on ties)."""
    texts = {d.doc_id: d.text for d in documents}
    pairs = []
    for query in queries:
        judged = {d: r for d, r in qrels.get(query.query_id, {}).items() if r > 0 and d in texts}
        if not judged:
            continue
        best = min(judged, key=lambda d: (-judged[d], d))
        pairs.append((query.text, texts[best]))
    return pairs


def mean_lexical_similarity(encoder: TextEncoder, pairs: Sequence[Tuple[str, str]], n: int) -> float:
    """Mean BM25(v_q, v_a) for one checkpoint at one N."""
    model = encoder.model
    q_kind, a_kind = encoder.kind_for("query"), encoder.kind_for("doc")
    q_vecs = encoder.embed_texts([q for q, _ in pairs], q_kind)
    a_vecs = encoder.embed_texts([a for _, a in pairs], a_kind)
    v_q = [vocab_project(model, v, n, q_kind.value).token_ids for v in q_vecs]
    v_a = [vocab_project(model, v, n, a_kind.value).token_ids for v in a_vecs]
    index = Bm25Index.from_documents([(f"a{i:06d}", tokens) for i, tokens in enumerate(v_a)])
    scores = [bm25_score(index, v_q[i], f"a{i:06d}") for i in range(len(pairs))]
    return sum(scores) / len(scores)


def lexical_similarity_report(
    encoders: Mapping[str, TextEncoder],
    pairs: Sequence[Tuple[str, str]],
    ns: Sequence[int] = DEFAULT_NS,
) -> LexicalReport:
    """
    Mean lexical similarity at each N for every checkpoint stage.

    Args:
        encoders: stage label (initial / adapted / finetuned) → encoder,
            in column order
        pairs: (query text, answer text)
    """
    if not pairs:
        raise ValueError("no evaluation pairs for the lexical report")
    if not encoders:
        raise ValueError("no checkpoints for the lexical report")
    vocab = max(e.model.config.vocab_size for e in encoders.values())
    columns: Dict[str, List[float]] = {}
    for label, encoder in encoders.items():
        columns[label] = [mean_lexical_similarity(encoder, pairs, n) for n in ns]
        logger.info(f"Lexical similarity [{label}]: " + ", ".join(f"N={n}: {v:.3f}" for n, v in zip(ns, columns[label])))
    capped = [n for n in ns if n > vocab]
    if capped:
        logger.warning(f"N values {capped} exceed |V|={vocab}; projections keep the whole vocabulary")
    return LexicalReport(ns=list(ns), columns=columns, n_pairs=len(pairs), vocab_size=vocab)
