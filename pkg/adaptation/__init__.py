"""
EBAdapt Lab - adaptation

Unsupervised EBAE + EBAR adaptation over (sentence, next sentence) pairs.
"""

from corpus_toolkit.text import pair_sentences

from .exceptions import (
    AdaptationError,
    InsufficientCorpusError,
    InvalidAdaptConfigError,
    InvalidRecordError,
    TrainingDivergedError,
)
from .models import AdaptConfig, AdaptRecord, AdaptResult, StepLoss
from .trainer import (
    AdaptationTrainer,
    epoch_batches,
    evaluate_adapt_loss,
    record_losses,
    run_adaptation,
    target_multiset,
)

__all__ = [
    # Types
    "AdaptRecord",
    "AdaptConfig",
    "AdaptResult",
    "StepLoss",

    # Training
    "AdaptationTrainer",
    "run_adaptation",
    "record_losses",
    "target_multiset",
    "evaluate_adapt_loss",
    "epoch_batches",
    "pair_sentences",

    # Exceptions
    "AdaptationError",
    "InvalidAdaptConfigError",
    "InvalidRecordError",
    "InsufficientCorpusError",
    "TrainingDivergedError",
]

__version__ = "1.0.0"
