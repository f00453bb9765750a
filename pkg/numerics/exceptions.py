"""
Custom exceptions for the numerics package.

Data/usage problems derive from ValueError, numerical failures from
ArithmeticError, so callers (the CLI in particular) can map them to exit
codes without knowing every subclass.
"""


class NumericsError(Exception):
    """Base exception for tensor math and autodiff"""
    pass


class ShapeError(NumericsError, ValueError):
    """Raised when operand shapes are incompatible"""
    pass


class IndexRangeError(NumericsError, ValueError):
    """Raised when a token id or row index falls outside the table"""
    pass


class EmptyTargetError(NumericsError, ValueError):
    """Raised when a cross-entropy target multiset is empty"""
    pass


class OutOfVocabularyError(NumericsError, ValueError):
    """Raised when a target token id is not below the vocabulary size"""
    pass


class DegenerateAttentionError(NumericsError, ValueError):
    """Raised when an attention mask row allows no position at all"""
    pass


class GradientError(NumericsError, RuntimeError):
    """Raised when backward is requested on a graph that cannot provide it"""
    pass


class NonFiniteError(NumericsError, ArithmeticError):
    """Raised when an operation produces NaN or Inf"""
    pass
