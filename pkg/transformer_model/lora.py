"""
Low-rank adapters on the attention projections.

W' = W + (alpha / r) · A @ B with A [d_in × r] random and B [r × d_out]
zero, so a fresh adapter leaves the model output unchanged.
"""

import hashlib
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from numerics import ops
from numerics.tensor import Tensor, default_dtype

from .params import ModelParams

LORA_TARGETS = ("wq", "wk", "wv", "wo")


@dataclass(frozen=True)
class LoraConfig:
    rank: int = 8
    alpha: float = 16.0
    targets: Tuple[str, ...] = LORA_TARGETS
    init_std: float = 0.02

    @property
    def scaling(self) -> float:
        return self.alpha / self.rank if self.rank > 0 else 0.0

    def validate(self) -> List[str]:
        issues = []
        if self.rank < 0:
            issues.append("rank must be non-negative")
        if self.alpha < 0:
            issues.append("alpha must be non-negative")
        unknown = [t for t in self.targets if t not in LORA_TARGETS]
        if unknown:
            issues.append(f"unknown LoRA targets {unknown}")
        return issues

    def to_dict(self) -> dict:
        data = asdict(self)
        data["targets"] = list(self.targets)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "LoraConfig":
        return cls(
            rank=int(data.get("rank", 8)),
            alpha=float(data.get("alpha", 16.0)),
            targets=tuple(data.get("targets", LORA_TARGETS)),
            init_std=float(data.get("init_std", 0.02)),
        )


@dataclass
class LoraAdapters:
    """A/B factor pairs keyed by the base parameter name they adapt."""
    config: LoraConfig
    factors: Dict[str, Tuple[Tensor, Tensor]] = field(default_factory=dict)

    @property
    def active(self) -> bool:
        return self.config.rank > 0 and self.config.scaling != 0.0 and bool(self.factors)

    def adapted(self, x: Tensor, name: str, weight: Tensor) -> Tensor:
        """x @ W plus the low-rank path when one exists for `name`."""
        out = ops.matmul(x, weight)
        pair = self.factors.get(name)
        if pair is None or not self.active:
            return out
        a, b = pair
        delta = ops.matmul(ops.matmul(x, a), b)
        return ops.add(out, ops.scale(delta, self.config.scaling))

    def parameters(self) -> Dict[str, Tensor]:
        params = {}
        for name in sorted(self.factors):
            a, b = self.factors[name]
            params[f"{name}.lora_a"] = a
            params[f"{name}.lora_b"] = b
        return params

    def merged_weight(self, name: str, weight: Tensor) -> np.ndarray:
        pair = self.factors.get(name)
        if pair is None or not self.active:
            return weight.data.copy()
        a, b = pair
        return weight.data + self.config.scaling * (a.data @ b.data)

    def checksum(self) -> str:
        h = hashlib.sha256()
        for name, t in self.parameters().items():
            h.update(name.encode("utf-8"))
            h.update(np.ascontiguousarray(t.data).tobytes())
        return h.hexdigest()


def attach_lora(params: ModelParams, config: LoraConfig, seed: int = 0) -> LoraAdapters:
    """Create adapters for every layer's target projections."""
    issues = config.validate()
    if issues:
        raise ValueError(f"Invalid LoRA config: {', '.join(issues)}")
    rng = np.random.default_rng(seed)
    dtype = default_dtype()
    factors = {}
    if config.rank == 0:
        return LoraAdapters(config, factors)
    for i in range(params.config.n_layers):
        for target in config.targets:
            name = f"layers.{i}.{target}"
            d_in, d_out = params[name].shape
            a = rng.normal(0.0, config.init_std, size=(d_in, config.rank)).astype(dtype)
            b = np.zeros((config.rank, d_out), dtype=dtype)
            factors[name] = (Tensor(a, requires_grad=True), Tensor(b, requires_grad=True))
    return LoraAdapters(config, factors)
