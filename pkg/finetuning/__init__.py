"""
EBAdapt Lab - finetuning

Supervised contrastive fine-tuning with in-batch and mined hard negatives,
optionally through low-rank adapters and a jointly trained projection.
"""

from .batching import BatchAssembler, embed_batch
from .exceptions import (
    DuplicateDocumentError,
    FinetuneDivergedError,
    FinetuningError,
    InvalidFinetuneConfigError,
    InvalidPairError,
)
from .loss import contrastive_loss
from .mining import mine_hard_negatives
from .models import Batch, FinetuneConfig, FinetuneResult, StepLoss, TrainPair
from .trainer import ContrastiveTrainer, identity_projection, run_finetune

__all__ = [
    # Types
    "TrainPair",
    "FinetuneConfig",
    "FinetuneResult",
    "Batch",
    "StepLoss",

    # Training
    "ContrastiveTrainer",
    "run_finetune",
    "contrastive_loss",
    "mine_hard_negatives",
    "BatchAssembler",
    "embed_batch",
    "identity_projection",

    # Exceptions
    "FinetuningError",
    "InvalidFinetuneConfigError",
    "InvalidPairError",
    "DuplicateDocumentError",
    "FinetuneDivergedError",
]

__version__ = "1.0.0"
