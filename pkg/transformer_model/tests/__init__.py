"""
Unit tests for the transformer model.
"""

from .test_lora_checkpoint import TestCheckpoint, TestLora
from .test_model import TestEmbeddings, TestForward, TestModelConfig, TestModelGradients

__all__ = [
    'TestModelConfig',
    'TestForward',
    'TestEmbeddings',
    'TestModelGradients',
    'TestLora',
    'TestCheckpoint',
]
