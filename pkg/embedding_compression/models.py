"""
Data models for embedding compression.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from .config import (
    DISTILL_INIT,
    DISTILL_LEARNING_RATE,
    DISTILL_SEED,
    DISTILL_STEPS,
    SAMPLE_DOCS,
    SAMPLE_QUERIES,
)


class CompressionMethod(Enum):
    """How an embedding is shrunk"""
    NONE = "none"
    SPARSE = "sparse"              # keep the N largest-magnitude entries
    DIMRED = "dimred"              # projection trained jointly with fine-tuning
    DIMRED_STAR = "dimred_star"    # projection distilled from a frozen retriever

    @classmethod
    def parse(cls, value: "str | CompressionMethod") -> "CompressionMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown compression method '{value}' (expected one of {[m.value for m in cls]})"
            ) from None


@dataclass
class CompressionDescriptor:
    """A compression method with its budget and, for projections, the matrix"""
    method: CompressionMethod = CompressionMethod.NONE
    n_keep: Optional[int] = None
    dim: Optional[int] = None
    projection: Optional[np.ndarray] = None   # [d × d']

    def __post_init__(self):
        self.method = CompressionMethod.parse(self.method)
        if self.projection is not None:
            self.projection = np.asarray(self.projection, dtype=np.float32)
            if self.dim is None:
                self.dim = int(self.projection.shape[1])

    @property
    def is_projection(self) -> bool:
        return self.method in (CompressionMethod.DIMRED, CompressionMethod.DIMRED_STAR)

    def output_dim(self, source_dim: int) -> int:
        return int(self.dim) if self.is_projection else source_dim

    def validate(self, source_dim: Optional[int] = None) -> List[str]:
        """Validate against the uncompressed dimension when given"""
        issues = []

        if self.method is CompressionMethod.SPARSE:
            if self.n_keep is None or self.n_keep < 1:
                issues.append("sparse compression needs n_keep ≥ 1")
            elif source_dim is not None and self.n_keep > source_dim:
                issues.append(f"n_keep {self.n_keep} exceeds dimension {source_dim}")

        if self.is_projection:
            if self.projection is None:
                issues.append(f"{self.method.value} needs a projection matrix")
            elif self.projection.ndim != 2:
                issues.append("projection must be a matrix")
            else:
                d, d_out = self.projection.shape
                if d_out != self.dim:
                    issues.append(f"projection has {d_out} columns, descriptor says dim {self.dim}")
                if d_out > d:
                    issues.append(f"projection widens {d} → {d_out}")
                if source_dim is not None and d != source_dim:
                    issues.append(f"projection expects dimension {d}, embeddings have {source_dim}")
                if not np.all(np.isfinite(self.projection)):
                    issues.append("projection contains non-finite values")

        return issues

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"method": self.method.value}
        if self.n_keep is not None:
            data["n_keep"] = int(self.n_keep)
        if self.dim is not None:
            data["dim"] = int(self.dim)
        if self.projection is not None:
            data["projection"] = self.projection.tolist()
        return data

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "CompressionDescriptor":
        if not data:
            return cls()
        projection = data.get("projection")
        return cls(
            method=data.get("method", "none"),
            n_keep=data.get("n_keep"),
            dim=data.get("dim"),
            projection=np.asarray(projection, dtype=np.float32) if projection is not None else None,
        )


@dataclass(frozen=True)
class DistillConfig:
    """Projection distillation parameters"""
    dim: int
    steps: int = DISTILL_STEPS
    learning_rate: float = DISTILL_LEARNING_RATE
    init: str = DISTILL_INIT
    sample_queries: int = SAMPLE_QUERIES
    sample_docs: int = SAMPLE_DOCS
    seed: int = DISTILL_SEED

    def validate(self) -> List[str]:
        issues = []
        if self.dim < 1:
            issues.append("dim must be positive")
        if self.steps < 0:
            issues.append("steps cannot be negative")
        if self.learning_rate <= 0:
            issues.append("learning_rate must be positive")
        if self.init not in ("pca", "identity"):
            issues.append(f"unknown init '{self.init}' (expected pca or identity)")
        if self.sample_queries < 1 or self.sample_docs < 1:
            issues.append("sample sizes must be positive")
        return issues

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class DistillResult:
    """Distilled projection with its objective trace (non-increasing)"""
    descriptor: CompressionDescriptor
    loss_curve: List[float] = field(default_factory=list)
    rejected_steps: int = 0

    @property
    def final_loss(self) -> Optional[float]:
        return self.loss_curve[-1] if self.loss_curve else None
