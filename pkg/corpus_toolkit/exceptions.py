"""
Custom exceptions for the corpus toolkit.
"""


class CorpusError(Exception):
    """Base exception for tokenization, generation and dataset I/O"""
    pass


class InvalidTaskSpecError(CorpusError, ValueError):
    """Raised when a synthetic task specification is inconsistent"""
    pass


class MalformedRecordError(CorpusError, ValueError):
    """Raised when a dataset file line cannot be parsed; names file and line"""
    pass


class TokenizerError(CorpusError, ValueError):
    """Raised when a tokenizer file or token id is invalid"""
    pass
