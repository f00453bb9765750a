"""
Custom exceptions for ranking evaluation.
"""


class EvaluationError(Exception):
    """Base exception for metric computation and TREC file handling"""
    pass


class InvalidCutoffError(EvaluationError, ValueError):
    """Raised when a metric cutoff k is below 1"""
    pass


class MalformedTrecFileError(EvaluationError, ValueError):
    """Raised when a qrels or run file line cannot be parsed"""
    pass


class InvalidRunError(EvaluationError, ValueError):
    """Raised when a run violates ordering or uniqueness rules"""
    pass
