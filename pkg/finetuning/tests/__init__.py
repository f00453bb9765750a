"""
Unit tests for contrastive fine-tuning.
"""

from .test_finetuning import (
    TestBatchAssembler,
    TestContrastiveLoss,
    TestContrastiveTrainer,
    TestFinetuneAcceptance,
    TestMining,
)

__all__ = [
    'TestContrastiveLoss',
    'TestBatchAssembler',
    'TestMining',
    'TestContrastiveTrainer',
    'TestFinetuneAcceptance',
]
