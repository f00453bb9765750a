"""
Data models for the adaptation trainer.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from corpus_toolkit.models import AdaptExample

from .config import BATCH_SIZE, CLIP_NORM, LEARNING_RATE, LOG_EVERY, LOSS_CURVE_COLUMNS, SEED, STEPS, W_EBAE, W_EBAR
from .exceptions import InvalidRecordError


@dataclass(frozen=True)
class AdaptRecord:
    """Token-level (text, next text) pair; carries no relevance labels."""
    id: str
    text: Tuple[int, ...]
    next_text: Tuple[int, ...]

    def validate(self) -> List[str]:
        issues = []
        if not self.text:
            issues.append("text has no tokens")
        if not self.next_text:
            issues.append("next text has no tokens")
        return issues

    @classmethod
    def from_example(cls, example: AdaptExample, tokenizer) -> "AdaptRecord":
        record = cls(
            id=example.id,
            text=tuple(tokenizer.encode(example.text)),
            next_text=tuple(tokenizer.encode(example.next)),
        )
        issues = record.validate()
        if issues:
            raise InvalidRecordError(f"record '{example.id}': {', '.join(issues)}")
        return record


@dataclass(frozen=True)
class AdaptConfig:
    """Adaptation run parameters"""
    steps: int = STEPS
    batch_size: int = BATCH_SIZE
    learning_rate: float = LEARNING_RATE
    seq_len: Optional[int] = None  # None: the model's max_seq_len
    w_ebae: float = W_EBAE
    w_ebar: float = W_EBAR
    seed: int = SEED
    clip_norm: Optional[float] = CLIP_NORM
    freeze_head: bool = False
    log_every: int = LOG_EVERY

    def validate(self) -> List[str]:
        """Validate configuration and return list of issues"""
        issues = []

        if self.steps < 0:
            issues.append("steps cannot be negative")
        if self.batch_size < 1:
            issues.append("batch_size must be positive")
        if self.learning_rate <= 0:
            issues.append("learning_rate must be positive")
        if self.seq_len is not None and self.seq_len < 2:
            issues.append("seq_len must be at least 2")
        if self.w_ebae < 0 or self.w_ebar < 0:
            issues.append("loss weights cannot be negative")
        if self.w_ebae == 0 and self.w_ebar == 0:
            issues.append("loss weights cannot both be zero")
        if self.clip_norm is not None and self.clip_norm <= 0:
            issues.append("clip_norm must be positive")
        if self.log_every < 1:
            issues.append("log_every must be positive")

        return issues

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AdaptConfig":
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass(frozen=True)
class StepLoss:
    step: int
    ebae_loss: float
    ebar_loss: float


@dataclass
class AdaptResult:
    """Outcome of an adaptation run"""
    config: AdaptConfig
    loss_curve: List[StepLoss] = field(default_factory=list)
    checksum_before: str = ""
    checksum_after: str = ""
    elapsed_sec: float = 0.0

    @property
    def final(self) -> Optional[StepLoss]:
        return self.loss_curve[-1] if self.loss_curve else None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(s) for s in self.loss_curve], columns=LOSS_CURVE_COLUMNS)

    def write_loss_curve(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    @staticmethod
    def read_loss_curve(path) -> pd.DataFrame:
        return pd.read_csv(path, float_precision="round_trip")

    def summary(self) -> Dict[str, Any]:
        last = self.final
        return {
            "steps": len(self.loss_curve),
            "final_ebae_loss": last.ebae_loss if last else None,
            "final_ebar_loss": last.ebar_loss if last else None,
            "checksum_before": self.checksum_before,
            "checksum_after": self.checksum_after,
            "elapsed_sec": round(self.elapsed_sec, 3),
        }
