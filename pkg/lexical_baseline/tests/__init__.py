"""
Unit tests for the lexical baseline.
"""

from .test_lexical import TestBm25, TestLexicalReport, TestVocabProjection

__all__ = [
    'TestBm25',
    'TestVocabProjection',
    'TestLexicalReport',
]
