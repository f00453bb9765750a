"""
Unit tests for ranking metrics and TREC file handling.
"""

from .test_metrics import TestEvaluateRun, TestMetricExamples, TestMetricOracles, TestMetricProperties
from .test_trec_io import TestTrecIO

__all__ = [
    'TestMetricExamples',
    'TestMetricOracles',
    'TestMetricProperties',
    'TestEvaluateRun',
    'TestTrecIO',
]
