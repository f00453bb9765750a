"""
Data models for contrastive fine-tuning.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from corpus_toolkit.models import PairExample
from prompt_builder.models import SchemePair

from .config import (
    BATCH_SIZE,
    CLIP_NORM,
    K_WINDOW,
    LEARNING_RATE,
    LOG_EVERY,
    LORA_ALPHA,
    LORA_RANK,
    LOSS_CURVE_COLUMNS,
    N_HARD_NEGATIVES,
    SEED,
    STEPS,
    TEMPERATURE,
    USE_LORA,
)
from .exceptions import InvalidPairError


@dataclass(frozen=True)
class TrainPair:
    """Token-level (query, positive, hard negatives) tuple"""
    query_id: str
    query: Tuple[int, ...]
    positive_id: str
    positive: Tuple[int, ...]
    negatives: Tuple[Tuple[str, Tuple[int, ...]], ...] = ()

    @property
    def negative_ids(self) -> List[str]:
        return [doc_id for doc_id, _ in self.negatives]

    def validate(self) -> List[str]:
        issues = []
        if not self.query:
            issues.append("query has no tokens")
        if not self.positive:
            issues.append("positive has no tokens")
        if self.positive_id in self.negative_ids:
            issues.append(f"positive {self.positive_id} is listed as a negative")
        if any(not ids for _, ids in self.negatives):
            issues.append("a negative has no tokens")
        return issues

    def with_negatives(self, negatives) -> "TrainPair":
        return TrainPair(self.query_id, self.query, self.positive_id, self.positive, tuple(negatives))

    @classmethod
    def from_example(cls, example: PairExample, tokenizer) -> "TrainPair":
        pair = cls(
            query_id=example.query_id,
            query=tuple(tokenizer.encode(example.query)),
            positive_id=example.positive_id,
            positive=tuple(tokenizer.encode(example.positive)),
            negatives=tuple((n["id"], tuple(tokenizer.encode(n["text"]))) for n in example.negatives),
        )
        issues = pair.validate()
        if issues:
            raise InvalidPairError(f"pair '{example.query_id}': {', '.join(issues)}")
        return pair


@dataclass(frozen=True)
class FinetuneConfig:
    """Contrastive fine-tuning parameters"""
    scheme: str = SchemePair.N2S.value
    batch_size: int = BATCH_SIZE
    steps: int = STEPS
    learning_rate: float = LEARNING_RATE
    temperature: float = TEMPERATURE
    n_hard_negatives: int = N_HARD_NEGATIVES
    k_window: int = K_WINDOW
    use_lora: bool = USE_LORA
    lora_rank: int = LORA_RANK
    lora_alpha: float = LORA_ALPHA
    normalize: bool = False
    projection_dim: Optional[int] = None
    seq_len: Optional[int] = None
    seed: int = SEED
    clip_norm: Optional[float] = CLIP_NORM
    log_every: int = LOG_EVERY

    @property
    def scheme_pair(self) -> SchemePair:
        return SchemePair.parse(self.scheme)

    def validate(self) -> List[str]:
        """Validate configuration and return list of issues"""
        issues = []

        try:
            SchemePair.parse(self.scheme)
        except ValueError as exc:
            issues.append(str(exc))
        if self.batch_size < 2:
            issues.append("batch_size must be at least 2")
        if self.steps < 0:
            issues.append("steps cannot be negative")
        if self.learning_rate <= 0:
            issues.append("learning_rate must be positive")
        if self.temperature <= 0:
            issues.append("temperature must be positive")
        if self.n_hard_negatives < 0:
            issues.append("n_hard_negatives cannot be negative")
        if self.k_window < 2:
            issues.append("k_window must be at least 2")
        if self.lora_rank < 0:
            issues.append("lora_rank cannot be negative")
        if self.projection_dim is not None and self.projection_dim < 1:
            issues.append("projection_dim must be positive")
        if self.clip_norm is not None and self.clip_norm <= 0:
            issues.append("clip_norm must be positive")
        if self.log_every < 1:
            issues.append("log_every must be positive")

        return issues

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FinetuneConfig":
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass
class Batch:
    """Pairs of one step with the de-duplicated document pool"""
    pairs: List[TrainPair]
    doc_ids: List[str]
    doc_tokens: List[Tuple[int, ...]]
    positive_index: List[int]


@dataclass(frozen=True)
class StepLoss:
    step: int
    loss: float


@dataclass
class FinetuneResult:
    """Outcome of a fine-tuning run"""
    config: FinetuneConfig
    loss_curve: List[StepLoss] = field(default_factory=list)
    base_checksum_before: str = ""
    base_checksum_after: str = ""
    adapter_checksum: Optional[str] = None
    projection: Optional[np.ndarray] = None
    elapsed_sec: float = 0.0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(s) for s in self.loss_curve], columns=LOSS_CURVE_COLUMNS)

    def write_loss_curve(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    @staticmethod
    def read_loss_curve(path) -> pd.DataFrame:
        return pd.read_csv(path, float_precision="round_trip")

    def summary(self) -> Dict[str, Any]:
        return {
            "steps": len(self.loss_curve),
            "final_loss": self.loss_curve[-1].loss if self.loss_curve else None,
            "base_checksum_before": self.base_checksum_before,
            "base_checksum_after": self.base_checksum_after,
            "adapter_checksum": self.adapter_checksum,
            "elapsed_sec": round(self.elapsed_sec, 3),
        }
