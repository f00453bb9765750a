"""
Environment, logging and layered configuration for the CLI.

Precedence: command-line flags > JSON config file > built-in defaults.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import load_dotenv

from .config import ENV_FILES, LOG_FORMAT, LOG_LEVEL_ENV

PROJECT_ROOT = Path(__file__).resolve().parent.parent


def load_environment(root: Union[str, Path] = PROJECT_ROOT) -> None:
    """Load .env files without overriding variables already set."""
    for name in ENV_FILES:
        path = Path(root) / name
        if path.is_file():
            load_dotenv(path, override=False)


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def load_config(path: Optional[Union[str, Path]]) -> Dict[str, Any]:
    """Sections keyed by name (corpus, tokenizer, model, adapt, finetune, ...); empty without a file."""
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return data


def resolve(
    section: str,
    defaults: Mapping[str, Any],
    file_config: Mapping[str, Any],
    overrides: Mapping[str, Any],
) -> Dict[str, Any]:
    """Defaults, then the file's section, then every flag that was given (not None)."""
    merged = dict(defaults)
    section_values = file_config.get(section, {}) or {}
    if not isinstance(section_values, dict):
        raise ValueError(f"config section '{section}' must be a JSON object")
    merged.update(section_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return merged
