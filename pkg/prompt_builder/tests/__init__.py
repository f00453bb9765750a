"""
Unit tests for the prompt builder.
"""

from .test_builder import TestBuildJoint, TestBuildSingle, TestMasks, TestRouting, TestTemplates

__all__ = [
    'TestBuildSingle',
    'TestBuildJoint',
    'TestMasks',
    'TestRouting',
    'TestTemplates',
]
