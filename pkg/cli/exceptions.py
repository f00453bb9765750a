"""
Custom exceptions for the command-line interface.
"""


class CliError(Exception):
    """Base exception for the command-line interface"""
    pass


class UsageError(CliError):
    """Raised for bad arguments or option combinations (exit code 1)"""
    pass
