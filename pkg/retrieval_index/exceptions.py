"""
Custom exceptions for the retrieval index.
"""


class RetrievalIndexError(Exception):
    """Base exception for embedding, indexing and search"""
    pass


class EmptyCorpusError(RetrievalIndexError, ValueError):
    """Raised when there is nothing to embed"""
    pass


class DuplicateDocumentIdError(RetrievalIndexError, ValueError):
    """Raised when an index would hold two vectors under one doc id"""
    pass


class SchemeMismatchError(RetrievalIndexError, ValueError):
    """Raised when a prompt kind or scheme disagrees with the one the model or index was built with"""
    pass


class InvalidSearchError(RetrievalIndexError, ValueError):
    """Raised for a bad cutoff or a query vector of the wrong dimension"""
    pass


class IndexFormatError(RetrievalIndexError, ValueError):
    """Raised when an index file is malformed or of another version"""
    pass
