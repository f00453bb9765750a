"""
EBAdapt Lab - retrieval_index

Corpus embedding under a prompt scheme, exact top-k inner-product search
and the binary index format.
"""

from .encoder import TextEncoder, mean_pool_encoder, resolve_threads
from .exceptions import (
    DuplicateDocumentIdError,
    EmptyCorpusError,
    IndexFormatError,
    InvalidSearchError,
    RetrievalIndexError,
    SchemeMismatchError,
)
from .io import load_index, save_index
from .models import DenseIndex, IndexMetadata, SearchResult
from .search import score_all, search, search_many

__all__ = [
    # Types
    "DenseIndex",
    "IndexMetadata",
    "SearchResult",

    # Embedding
    "TextEncoder",
    "mean_pool_encoder",
    "resolve_threads",

    # Search
    "search",
    "search_many",
    "score_all",

    # Files
    "save_index",
    "load_index",

    # Exceptions
    "RetrievalIndexError",
    "EmptyCorpusError",
    "DuplicateDocumentIdError",
    "SchemeMismatchError",
    "InvalidSearchError",
    "IndexFormatError",
]

__version__ = "1.0.0"
