"""
Data models for the retrieval index.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .config import POOLING_ANCHOR


@dataclass
class IndexMetadata:
    """How the stored vectors were produced"""
    kind: str                       # PromptKind value used for the documents
    dim: int
    scheme: Optional[str] = None    # SchemePair value of the encoder
    model_checksum: str = ""
    adapter_checksum: Optional[str] = None
    pooling: str = POOLING_ANCHOR
    compression: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IndexMetadata":
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass
class DenseIndex:
    """Document vectors [N × d] under unique doc ids"""
    doc_ids: List[str]
    vectors: np.ndarray
    metadata: IndexMetadata

    def __len__(self) -> int:
        return len(self.doc_ids)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def validate(self) -> List[str]:
        """Check ids, shape and metadata; return list of issues"""
        issues = []
        if self.vectors.ndim != 2:
            issues.append(f"vectors must be 2-D, got shape {self.vectors.shape}")
            return issues
        if len(self.doc_ids) != self.vectors.shape[0]:
            issues.append(f"{len(self.doc_ids)} ids for {self.vectors.shape[0]} vectors")
        if len(set(self.doc_ids)) != len(self.doc_ids):
            issues.append("doc ids are not unique")
        if self.metadata.dim != self.vectors.shape[1]:
            issues.append(f"metadata dim {self.metadata.dim} != vector dim {self.vectors.shape[1]}")
        if not np.all(np.isfinite(self.vectors)):
            issues.append("vectors contain non-finite values")
        return issues

    def vector(self, doc_id: str) -> np.ndarray:
        return self.vectors[self.doc_ids.index(doc_id)]


@dataclass
class SearchResult:
    """Ranked (doc id, score) hits for one query"""
    hits: List[Tuple[str, float]] = field(default_factory=list)
    truncated: bool = False

    @property
    def doc_ids(self) -> List[str]:
        return [d for d, _ in self.hits]
