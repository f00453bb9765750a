"""
Collects the artifacts of a pipeline run directory for the dashboard.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from cli.config import (
    ADAPT_LOSS_FILE,
    FINETUNE_LOSS_FILE,
    LEXICAL_CSV,
    MANIFEST_FILE,
    METRICS_FILE,
    REPORT_CSV,
)
from lexical_baseline.models import LexicalReport

logger = logging.getLogger(__name__)


@dataclass
class RunArtifacts:
    """Everything the dashboard can show for one run directory"""
    root: Path
    adapt_loss: Optional[pd.DataFrame] = None
    finetune_loss: Optional[pd.DataFrame] = None
    metrics: Dict[str, Dict[str, float]] = field(default_factory=dict)   # eval dir → metric → value
    lexical: Optional[LexicalReport] = None
    report: Optional[pd.DataFrame] = None
    manifests: Dict[str, dict] = field(default_factory=dict)             # relative dir → manifest

    @property
    def empty(self) -> bool:
        return (
            self.adapt_loss is None
            and self.finetune_loss is None
            and not self.metrics
            and self.lexical is None
            and self.report is None
        )

    def metrics_frame(self) -> pd.DataFrame:
        """Long form: run, metric, value."""
        rows = [
            {"run": run, "metric": metric, "value": value}
            for run, values in sorted(self.metrics.items())
            for metric, value in values.items()
        ]
        return pd.DataFrame(rows, columns=["run", "metric", "value"])


def _first(root: Path, name: str) -> Optional[Path]:
    matches = sorted(root.rglob(name))
    if len(matches) > 1:
        logger.debug(f"{len(matches)} copies of {name} under {root}; using {matches[0]}")
    return matches[0] if matches else None


def _label(root: Path, path: Path) -> str:
    rel = path.parent.relative_to(root).as_posix()
    return rel if rel != "." else root.name


def load_run_artifacts(root: Union[str, Path]) -> RunArtifacts:
    """Scan `root` recursively; unreadable files are logged and skipped."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"run directory {root} does not exist")
    artifacts = RunArtifacts(root=root)

    path = _first(root, ADAPT_LOSS_FILE)
    if path is not None:
        artifacts.adapt_loss = pd.read_csv(path, float_precision="round_trip")
    path = _first(root, FINETUNE_LOSS_FILE)
    if path is not None:
        artifacts.finetune_loss = pd.read_csv(path, float_precision="round_trip")
    path = _first(root, LEXICAL_CSV)
    if path is not None:
        artifacts.lexical = LexicalReport.read_csv(path)
    path = _first(root, REPORT_CSV)
    if path is not None:
        artifacts.report = pd.read_csv(path, float_precision="round_trip")

    for path in sorted(root.rglob(METRICS_FILE)):
        try:
            artifacts.metrics[_label(root, path)] = json.loads(path.read_text(encoding="utf-8"))["metrics"]
        except (ValueError, KeyError) as exc:
            logger.warning(f"Skipping {path}: {exc}")
    for path in sorted(root.rglob(MANIFEST_FILE)):
        try:
            artifacts.manifests[_label(root, path)] = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as exc:
            logger.warning(f"Skipping {path}: {exc}")
    return artifacts


def list_run_dirs(base: Union[str, Path]) -> List[Path]:
    """Immediate subdirectories of `base` holding at least one manifest."""
    base = Path(base)
    if not base.is_dir():
        return []
    return [p for p in sorted(base.iterdir()) if p.is_dir() and any(p.rglob(MANIFEST_FILE))]
