"""
EBAdapt Lab - lexical_baseline

BM25 retrieval baseline and the vocabulary-projection diagnostic measuring
how adaptation changes the lexical content of embeddings.
"""

from .bm25 import DEFAULT_B, DEFAULT_K1, Bm25Index, bm25_rank, bm25_score, bm25_search
from .exceptions import InvalidProjectionError, LexicalBaselineError, UnknownDocumentError
from .models import REPORT_NOTE, LexicalReport, VocabProjection
from .projection import vocab_logits, vocab_project
from .report import DEFAULT_NS, eval_pairs, lexical_similarity_report, mean_lexical_similarity

__all__ = [
    # BM25
    "Bm25Index",
    "bm25_score",
    "bm25_rank",
    "bm25_search",
    "DEFAULT_K1",
    "DEFAULT_B",

    # Vocabulary projection
    "VocabProjection",
    "vocab_logits",
    "vocab_project",

    # Report
    "LexicalReport",
    "lexical_similarity_report",
    "mean_lexical_similarity",
    "eval_pairs",
    "DEFAULT_NS",
    "REPORT_NOTE",

    # Exceptions
    "LexicalBaselineError",
    "UnknownDocumentError",
    "InvalidProjectionError",
]

__version__ = "1.0.0"
