"""
Custom exceptions for the transformer model.
"""


class TransformerModelError(Exception):
    """Base exception for model construction, inference and checkpoints"""
    pass


class InvalidModelConfigError(TransformerModelError, ValueError):
    """Raised when a ModelConfig fails validation"""
    pass


class SequenceTooLongError(TransformerModelError, ValueError):
    """Raised when an input exceeds max_seq_len"""
    pass


class AnchorOutOfRangeError(TransformerModelError, ValueError):
    """Raised when an embedding anchor is not a valid position"""
    pass


class CheckpointFormatError(TransformerModelError, ValueError):
    """Raised when a checkpoint file is malformed or of another version"""
    pass
