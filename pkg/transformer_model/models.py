"""
Data models for the transformer.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, List

import numpy as np

from numerics.tensor import Tensor
from prompt_builder.models import PromptKind

from .config import (
    BOS_ID,
    D_FF,
    D_MODEL,
    EOS_ID,
    MAX_SEQ_LEN,
    MLP_ACTIVATIONS,
    N_HEADS,
    N_LAYERS,
    NORM_EPS,
    PAD_ID,
    ROPE_BASE,
    VOCAB_SIZE,
)


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyper-parameters and special token ids"""
    n_layers: int = N_LAYERS
    n_heads: int = N_HEADS
    d_model: int = D_MODEL
    d_ff: int = D_FF
    vocab_size: int = VOCAB_SIZE
    max_seq_len: int = MAX_SEQ_LEN
    rope_base: float = ROPE_BASE
    pad_id: int = PAD_ID
    bos_id: int = BOS_ID
    eos_id: int = EOS_ID
    tie_head: bool = False
    mlp_activation: str = "silu"
    norm_eps: float = NORM_EPS

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads

    def validate(self) -> List[str]:
        """Validate configuration and return list of issues"""
        issues = []

        for name in ("n_layers", "n_heads", "d_model", "d_ff", "vocab_size", "max_seq_len"):
            if getattr(self, name) < 1:
                issues.append(f"{name} must be positive")

        if self.n_heads > 0 and self.d_model % self.n_heads:
            issues.append("d_model must be divisible by n_heads")
        elif self.n_heads > 0 and self.head_dim % 2:
            issues.append("head dimension must be even for rotary embeddings")

        specials = (self.pad_id, self.bos_id, self.eos_id)
        if len(set(specials)) != 3:
            issues.append("special token ids must be pairwise distinct")
        if any(not 0 <= s < self.vocab_size for s in specials):
            issues.append("special token ids must be below vocab_size")

        if self.mlp_activation not in MLP_ACTIVATIONS:
            issues.append(f"mlp_activation must be one of {MLP_ACTIVATIONS}")

        if self.rope_base <= 1.0:
            issues.append("rope_base must exceed 1")

        return issues

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelConfig":
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass
class Embedding:
    """A text embedding taken at an anchor position"""
    vector: Tensor  # [1 × d]
    kind: PromptKind

    @property
    def dim(self) -> int:
        return self.vector.shape[-1]

    def numpy(self) -> np.ndarray:
        return self.vector.data.reshape(-1).copy()
