"""
EBAdapt Lab - cli

The `ebadapt` command: corpus generation, adaptation, fine-tuning,
indexing, search, evaluation, diagnostics, compression and reports, each
writing a manifest next to its artifacts.
"""

from .exceptions import CliError, UsageError
from .main import build_parser, main
from .manifest import RunManifest, file_checksum
from .settings import configure_logging, load_config, load_environment, resolve

__all__ = [
    # Entry point
    "main",
    "build_parser",

    # Configuration
    "load_config",
    "load_environment",
    "configure_logging",
    "resolve",

    # Manifests
    "RunManifest",
    "file_checksum",

    # Exceptions
    "CliError",
    "UsageError",
]

__version__ = "1.0.0"
