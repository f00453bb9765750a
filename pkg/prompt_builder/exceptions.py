"""
Custom exceptions for prompt construction.
"""


class PromptBuilderError(Exception):
    """Base exception for prompt construction and scheme routing"""
    pass


class EmptyInputError(PromptBuilderError, ValueError):
    """Raised when the input text has no tokens"""
    pass


class PromptOverflowError(PromptBuilderError, ValueError):
    """Raised when prompt blocks alone leave no room for input tokens"""
    pass


class UnknownRelationshipError(PromptBuilderError, ValueError):
    """Raised when a task relationship has no prompt scheme"""
    pass


class InvalidPromptError(PromptBuilderError, ValueError):
    """Raised when a joint prompt violates its layout invariants"""
    pass
