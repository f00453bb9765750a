"""
Unit tests for embedding compression.
"""

from .test_compression import (
    TestCompressIndex,
    TestDescriptor,
    TestDistillation,
    TestJointProjection,
    TestSparsify,
)

__all__ = [
    'TestSparsify',
    'TestDescriptor',
    'TestCompressIndex',
    'TestDistillation',
    'TestJointProjection',
]
