"""
Tests for the dashboard
"""

from .test_charts import TestCharts, TestRunData

__all__ = [
    'TestCharts',
    'TestRunData',
]
