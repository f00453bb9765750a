"""
Custom exceptions for contrastive fine-tuning.
"""


class FinetuningError(Exception):
    """Base exception for contrastive fine-tuning"""
    pass


class InvalidFinetuneConfigError(FinetuningError, ValueError):
    """Raised when a FinetuneConfig fails validation"""
    pass


class InvalidPairError(FinetuningError, ValueError):
    """Raised when a training pair is empty or lists its positive as a negative"""
    pass


class DuplicateDocumentError(FinetuningError, ValueError):
    """Raised when a doc id appears twice in one contrastive batch"""
    pass


class FinetuneDivergedError(FinetuningError, ArithmeticError):
    """Raised when the contrastive loss exceeds its bound or stops being finite, or a gradient does"""
    pass
