"""
Unit tests for the numerics package.
"""

from .test_gradients import TestOpGradients, TestRelativeError
from .test_ops import TestMaskedAttention, TestMatmul, TestOtherOps, TestSoftmaxCrossEntropy
from .test_optim import TestAdam, TestAdamStep
from .test_tensor import TestGraph, TestTensor

__all__ = [
    'TestTensor',
    'TestGraph',
    'TestMatmul',
    'TestSoftmaxCrossEntropy',
    'TestMaskedAttention',
    'TestOtherOps',
    'TestOpGradients',
    'TestRelativeError',
    'TestAdam',
    'TestAdamStep',
]
