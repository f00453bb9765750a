"""
EBAdapt Lab - corpus_toolkit

Tokenizer, synthetic retrieval tasks and dataset file I/O.
"""

from .config import SPECIAL_TOKENS, WORD_MARKER
from .exceptions import CorpusError, InvalidTaskSpecError, MalformedRecordError, TokenizerError
from .io import (
    read_adapt_corpus,
    read_documents,
    read_jsonl,
    read_pairs,
    read_queries,
    write_jsonl,
    write_task,
)
from .models import (
    AdaptExample,
    Document,
    PairExample,
    Query,
    Relationship,
    SynthTask,
    SynthTaskSpec,
)
from .synthetic import gen_synthetic, make_lexicon
from .text import pair_sentences, split_sentences
from .tokenizer import Tokenizer, build_tokenizer

__all__ = [
    # Tokenizer
    "Tokenizer",
    "build_tokenizer",
    "SPECIAL_TOKENS",
    "WORD_MARKER",

    # Synthetic tasks
    "SynthTaskSpec",
    "SynthTask",
    "Relationship",
    "gen_synthetic",
    "make_lexicon",

    # Records and I/O
    "AdaptExample",
    "Document",
    "Query",
    "PairExample",
    "read_jsonl",
    "write_jsonl",
    "read_adapt_corpus",
    "read_documents",
    "read_queries",
    "read_pairs",
    "write_task",
    "pair_sentences",
    "split_sentences",

    # Exceptions
    "CorpusError",
    "InvalidTaskSpecError",
    "MalformedRecordError",
    "TokenizerError",
]

__version__ = "1.0.0"
