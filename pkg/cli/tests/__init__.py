"""
Tests for the command-line interface
"""

from .test_cli import (
    TestArguments,
    TestCorpusCommands,
    TestEvalCommand,
    TestRetrievalPipeline,
    TestTrainingCommands,
)

__all__ = [
    'TestArguments',
    'TestCorpusCommands',
    'TestTrainingCommands',
    'TestEvalCommand',
    'TestRetrievalPipeline',
]
