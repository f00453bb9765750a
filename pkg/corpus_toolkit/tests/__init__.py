"""
Unit tests for the corpus toolkit.
"""

from .test_synthetic import TestDatasetIO, TestGenSynthetic, TestSentencePairing
from .test_tokenizer import TestBuildTokenizer, TestTokenizerRoundTrip

__all__ = [
    'TestBuildTokenizer',
    'TestTokenizerRoundTrip',
    'TestGenSynthetic',
    'TestDatasetIO',
    'TestSentencePairing',
]
