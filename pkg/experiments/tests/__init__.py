"""
Tests for end-to-end experiments
"""

from .test_experiments import (
    TestComparisons,
    TestDeskScaleEffects,
    TestExperimentConfig,
    TestInitializationEffect,
    TestPipeline,
)

__all__ = [
    'TestExperimentConfig',
    'TestPipeline',
    'TestComparisons',
    'TestDeskScaleEffects',
    'TestInitializationEffect',
]
