"""
Custom exceptions for the adaptation trainer.
"""


class AdaptationError(Exception):
    """Base exception for EBAE/EBAR adaptation"""
    pass


class InvalidAdaptConfigError(AdaptationError, ValueError):
    """Raised when an AdaptConfig fails validation"""
    pass


class InvalidRecordError(AdaptationError, ValueError):
    """Raised when an adaptation record has an empty text or next text"""
    pass


class InsufficientCorpusError(AdaptationError, ValueError):
    """Raised when the corpus holds fewer records than one batch"""
    pass


class TrainingDivergedError(AdaptationError, ArithmeticError):
    """Raised when a loss becomes non-finite or exceeds the divergence bound"""
    pass
