"""
Unit tests for the retrieval index.
"""

from .test_encoder import TestTextEncoder
from .test_search import TestIndexFiles, TestSearch

__all__ = [
    'TestSearch',
    'TestIndexFiles',
    'TestTextEncoder',
]
