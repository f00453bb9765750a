"""
Unit tests for the adaptation trainer.
"""

from .test_trainer import (
    TestAdaptationAcceptance,
    TestAdaptationTrainer,
    TestAdaptLoss,
    TestAdaptRecord,
    TestTargetMultiset,
)

__all__ = [
    'TestTargetMultiset',
    'TestAdaptLoss',
    'TestAdaptationTrainer',
    'TestAdaptRecord',
    'TestAdaptationAcceptance',
]
