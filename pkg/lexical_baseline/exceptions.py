"""
Custom exceptions for the lexical baseline.
"""


class LexicalBaselineError(Exception):
    """Base exception for BM25 scoring and vocabulary projection"""
    pass


class UnknownDocumentError(LexicalBaselineError, ValueError):
    """Raised when a doc id is not part of the BM25 index"""
    pass


class InvalidProjectionError(LexicalBaselineError, ValueError):
    """Raised when a vocabulary projection request is inconsistent"""
    pass
