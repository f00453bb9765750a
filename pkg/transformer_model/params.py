"""
Named parameter store and initialization.

Weights are stored in the x @ W orientation: wq/wk/wv/wo are [d × d],
w1/w3 are [d × d_ff], w2 is [d_ff × d] and the head is [d × |V|].
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from numerics.tensor import Tensor, default_dtype

from .config import INIT_STD
from .exceptions import InvalidModelConfigError
from .models import ModelConfig


def param_shapes(config: ModelConfig) -> List[Tuple[str, Tuple[int, ...]]]:
    """Parameter names and shapes in canonical order."""
    d, f, V = config.d_model, config.d_ff, config.vocab_size
    shapes = [("tok_embeddings", (V, d))]
    for i in range(config.n_layers):
        p = f"layers.{i}"
        shapes += [
            (f"{p}.attention_norm", (d,)),
            (f"{p}.wq", (d, d)),
            (f"{p}.wk", (d, d)),
            (f"{p}.wv", (d, d)),
            (f"{p}.wo", (d, d)),
            (f"{p}.ffn_norm", (d,)),
            (f"{p}.w1", (d, f)),
            (f"{p}.w3", (d, f)),
            (f"{p}.w2", (f, d)),
        ]
    shapes.append(("norm", (d,)))
    if not config.tie_head:
        shapes.append(("head", (d, V)))
    return shapes


@dataclass
class ModelParams:
    """Transformer weights keyed by name, including the projection head."""
    config: ModelConfig
    tensors: Dict[str, Tensor] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def items(self):
        return self.tensors.items()

    def validate(self) -> List[str]:
        """Check names and shapes against the config"""
        issues = []
        expected = dict(param_shapes(self.config))
        missing = sorted(set(expected) - set(self.tensors))
        extra = sorted(set(self.tensors) - set(expected))
        if missing:
            issues.append(f"missing parameters {missing}")
        if extra:
            issues.append(f"unexpected parameters {extra}")
        for name, shape in expected.items():
            t = self.tensors.get(name)
            if t is not None and tuple(t.shape) != shape:
                issues.append(f"{name} has shape {tuple(t.shape)}, expected {shape}")
        return issues

    def set_trainable(self, trainable: bool, names: Optional[List[str]] = None) -> None:
        for name in names if names is not None else list(self.tensors):
            self.tensors[name].requires_grad = trainable

    def trainable(self) -> Dict[str, Tensor]:
        return {n: t for n, t in self.tensors.items() if t.requires_grad}

    def copy(self) -> "ModelParams":
        return ModelParams(self.config, {n: t.copy() for n, t in self.tensors.items()})

    def n_parameters(self) -> int:
        return sum(t.size for t in self.tensors.values())

    def checksum(self) -> str:
        """sha256 over the config and every tensor in sorted name order."""
        h = hashlib.sha256()
        h.update(json.dumps(self.config.to_dict(), sort_keys=True).encode("utf-8"))
        for name in sorted(self.tensors):
            arr = np.ascontiguousarray(self.tensors[name].data)
            h.update(name.encode("utf-8"))
            h.update(str(arr.dtype).encode("ascii"))
            h.update(str(arr.shape).encode("ascii"))
            h.update(arr.tobytes())
        return h.hexdigest()


def init_params(config: ModelConfig, seed: int = 0, std: float = INIT_STD, dtype=None) -> ModelParams:
    """
    Gaussian init for matrices, ones for norm gains.

    Output projections (wo, w2) are scaled by 1/sqrt(2·n_layers).

    Raises:
        InvalidModelConfigError: config fails validation
    """
    issues = config.validate()
    if issues:
        raise InvalidModelConfigError(f"Invalid model config: {', '.join(issues)}")

    dtype = np.dtype(dtype) if dtype is not None else default_dtype()
    rng = np.random.default_rng(seed)
    resid_std = std / np.sqrt(2.0 * config.n_layers)
    tensors: Dict[str, Tensor] = {}
    for name, shape in param_shapes(config):
        if len(shape) == 1:
            data = np.ones(shape, dtype=dtype)
        elif name.endswith((".wo", ".w2")):
            data = rng.normal(0.0, resid_std, size=shape).astype(dtype)
        else:
            data = rng.normal(0.0, std, size=shape).astype(dtype)
        tensors[name] = Tensor(data, requires_grad=True)
    return ModelParams(config, tensors)
