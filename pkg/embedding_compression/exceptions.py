"""
Custom exceptions for embedding compression.
"""


class CompressionError(Exception):
    """Base exception for embedding compression"""
    pass


class InvalidCompressionError(CompressionError, ValueError):
    """Raised when a descriptor or budget does not fit the embedding dimension"""
    pass
