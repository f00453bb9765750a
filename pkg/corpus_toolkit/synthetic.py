"""
Template-based synthetic retrieval tasks.

A task is a collection of "topics". Topic i owns document d{i} whose text
carries the key pair (key[i], key[i+1]), an attribute, two attribute values
and filler words. A query mentions the same key pair, so exactly one
document is relevant; documents i-1 and i+1 share one key each and act as
partial-overlap distractors.

Relationships:
    correlation       query is a question, the document answers it
    long-paraphrase   query rewords the full document (synonym, new order)
    short-paraphrase  document and query are four/five-word rewordings
"""

import logging
from typing import Dict, List, Tuple

import numpy as np

from .config import FUNCTION_WORDS
from .exceptions import InvalidTaskSpecError
from .models import (
    AdaptExample,
    Document,
    PairExample,
    Query,
    Relationship,
    SynthTask,
    SynthTaskSpec,
)

logger = logging.getLogger(__name__)

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


def make_lexicon(size: int, rng: np.random.Generator) -> List[str]:
    """`size` distinct two-syllable pseudo-words (consonant-vowel pairs)."""
    syllables = [c + v for c in _CONSONANTS for v in _VOWELS]
    pool = sorted({a + b for a in syllables for b in syllables} - set(FUNCTION_WORDS))
    if size > len(pool):
        raise InvalidTaskSpecError(f"cannot build {size} pseudo-words (max {len(pool)})")
    order = rng.permutation(len(pool))[:size]
    return [pool[i] for i in order]


def _allocate(spec: SynthTaskSpec, lexicon: List[str]) -> Dict[str, List[str]]:
    n_keys, n_attr = spec.n_docs, spec.n_attributes
    rest = spec.vocab_size - n_keys - 2 * n_attr
    n_values = rest // 2
    pos = 0
    groups = {}
    for name, count in (
        ("keys", n_keys),
        ("attributes", n_attr),
        ("synonyms", n_attr),
        ("values", n_values),
        ("fillers", rest - n_values),
    ):
        groups[name] = lexicon[pos:pos + count]
        pos += count
    return groups


def _topic_texts(
    relationship: Relationship,
    k1: str,
    k2: str,
    attr: str,
    syn: str,
    v1: str,
    v2: str,
    fillers: List[str],
    reordered: List[str],
) -> Tuple[List[str], str]:
    """Return (document sentences, query text) for one topic."""
    fill = " ".join(fillers)
    if relationship is Relationship.SHORT_PARAPHRASE:
        return [f"{k1} {k2} {attr} {v1}"], f"{syn} {v1} for {k1} {k2}"
    sentences = [
        f"the {attr} of {k1} {k2} is {v1} {v2} .",
        f"{k1} {k2} has {fill} .".replace("  ", " "),
    ]
    if relationship is Relationship.CORRELATION:
        return sentences, f"what is the {attr} of {k1} {k2} ?"
    refill = " ".join(reordered)
    query = f"for {k1} {k2} the {syn} equals {v2} and {v1} . {refill} {k1} {k2} ."
    return sentences, " ".join(query.split())


def gen_synthetic(spec: SynthTaskSpec) -> SynthTask:
    """
    Generate documents, adaptation pairs, training pairs and evaluation
    queries for `spec`. Output is a pure function of the spec.

    Raises:
        InvalidTaskSpecError: if the spec fails validation
    """
    issues = spec.validate()
    if issues:
        raise InvalidTaskSpecError(f"Invalid synthetic task spec: {', '.join(issues)}")

    rng = np.random.default_rng(spec.seed)
    lexicon = make_lexicon(spec.vocab_size, rng)
    groups = _allocate(spec, lexicon)
    keys, attrs, syns = groups["keys"], groups["attributes"], groups["synonyms"]
    values, fillers = groups["values"], groups["fillers"]

    n = spec.n_docs
    documents: List[Document] = []
    doc_sentences: List[List[str]] = []
    query_texts: List[str] = []
    for i in range(n):
        k1, k2 = keys[i], keys[(i + 1) % n]
        a = int(rng.integers(len(attrs)))
        v1, v2 = (values[int(j)] for j in rng.choice(len(values), size=2, replace=False))
        fill_idx = rng.choice(len(fillers), size=min(spec.n_filler, len(fillers)), replace=False)
        fill = [fillers[int(j)] for j in fill_idx]
        reordered = [fill[int(j)] for j in rng.permutation(len(fill))]
        sentences, query = _topic_texts(spec.relationship, k1, k2, attrs[a], syns[a], v1, v2, fill, reordered)
        documents.append(Document(doc_id=f"d{i:05d}", text=" ".join(sentences)))
        doc_sentences.append(sentences)
        query_texts.append(query)

    topics = [int(t) for t in rng.permutation(n)[: spec.n_queries]]
    n_eval = max(1, int(round(spec.n_queries * spec.eval_fraction)))
    eval_topics = sorted(topics[:n_eval])
    train_topics = sorted(topics[n_eval:])

    train_pairs: List[PairExample] = []
    train_qrels: Dict[str, Dict[str, int]] = {}
    for t in train_topics:
        qid, doc = f"q{t:05d}", documents[t]
        train_pairs.append(PairExample(qid, query_texts[t], doc.doc_id, doc.text))
        train_qrels[qid] = {doc.doc_id: 1}

    eval_queries: List[Query] = []
    eval_qrels: Dict[str, Dict[str, int]] = {}
    for t in eval_topics:
        qid = f"q{t:05d}"
        eval_queries.append(Query(qid, query_texts[t]))
        eval_qrels[qid] = {documents[t].doc_id: 1}

    # Adaptation pairs never include an evaluation query
    adapt: List[AdaptExample] = []
    for pair in train_pairs:
        adapt.append(AdaptExample(f"pair-{pair.query_id}", pair.query, pair.positive))
    for doc, sentences in zip(documents, doc_sentences):
        if len(sentences) > 1:
            adapt.append(AdaptExample(f"doc-{doc.doc_id}", sentences[0], sentences[1]))

    metadata = {
        "lexicon_sizes": {name: len(words) for name, words in groups.items()},
        "n_train": len(train_pairs),
        "n_eval": len(eval_queries),
        "n_adapt": len(adapt),
    }
    logger.info(
        f"Generated {spec.relationship.value} task: {n} docs, "
        f"{len(train_pairs)} train / {len(eval_queries)} eval queries, {len(adapt)} adapt pairs"
    )
    return SynthTask(
        spec=spec,
        documents=documents,
        adapt_corpus=adapt,
        train_pairs=train_pairs,
        train_qrels=train_qrels,
        eval_queries=eval_queries,
        eval_qrels=eval_qrels,
        metadata=metadata,
    )
