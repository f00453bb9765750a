"""
Custom exceptions for experiments.
"""


class ExperimentError(Exception):
    """Base exception for experiments"""
    pass


class InvalidExperimentError(ExperimentError, ValueError):
    """Raised when an experiment configuration has issues"""
    pass
