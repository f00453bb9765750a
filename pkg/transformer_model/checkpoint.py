"""
Checkpoint files.

Layout: magic b"EBCK", uint32 format version, uint64 header length, a JSON
header (config, tensor table, LoRA config, metadata), then the tensor
blobs as little-endian float32 in header order.
"""

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from numerics.tensor import Tensor

from .config import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from .exceptions import CheckpointFormatError
from .lora import LoraAdapters, LoraConfig
from .model import TransformerModel
from .models import ModelConfig
from .params import ModelParams

logger = logging.getLogger(__name__)

_BLOB_DTYPE = np.dtype("<f4")


@dataclass
class Checkpoint:
    params: ModelParams
    lora: Optional[LoraAdapters] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def model(self, verbose: bool = False) -> TransformerModel:
        return TransformerModel(self.params, lora=self.lora, verbose=verbose)


def save_checkpoint(
    path: Union[str, Path],
    params: ModelParams,
    lora: Optional[LoraAdapters] = None,
    metadata: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write params (and adapters) to `path`; returns the path."""
    path = Path(path)
    blobs = [(name, params[name]) for name in params]
    if lora is not None:
        blobs += [(f"lora.{name}", t) for name, t in lora.parameters().items()]

    table = []
    offset = 0
    for name, t in blobs:
        nbytes = t.size * _BLOB_DTYPE.itemsize
        table.append({"name": name, "shape": list(t.shape), "dtype": "float32", "offset": offset, "nbytes": nbytes})
        offset += nbytes

    header = {
        "config": params.config.to_dict(),
        "tensors": table,
        "lora": lora.config.to_dict() if lora is not None else None,
        "metadata": metadata or {},
        "base_checksum": params.checksum(),
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", CHECKPOINT_VERSION))
        fh.write(struct.pack("<Q", len(header_bytes)))
        fh.write(header_bytes)
        for _, t in blobs:
            fh.write(np.ascontiguousarray(t.data, dtype=_BLOB_DTYPE).tobytes())
    logger.info(f"Saved checkpoint {path} ({len(blobs)} tensors, {offset} bytes)")
    return path


def read_header(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "rb") as fh:
        header, _ = _read_header(fh, path)
    return header


def _read_header(fh, path) -> tuple:
    magic = fh.read(4)
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointFormatError(f"{path}: not a checkpoint file (bad magic)")
    raw = fh.read(12)
    if len(raw) != 12:
        raise CheckpointFormatError(f"{path}: truncated header")
    version, header_len = struct.unpack("<IQ", raw)
    if version != CHECKPOINT_VERSION:
        raise CheckpointFormatError(f"{path}: unsupported checkpoint version {version}")
    try:
        header = json.loads(fh.read(header_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointFormatError(f"{path}: corrupt header ({exc})") from None
    return header, 16 + header_len


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    """
    Read a checkpoint written by save_checkpoint.

    Raises:
        CheckpointFormatError: bad magic, version, header or truncated payload
    """
    path = Path(path)
    with open(path, "rb") as fh:
        header, start = _read_header(fh, path)
        payload = fh.read()

    config = ModelConfig.from_dict(header["config"])
    tensors: Dict[str, Tensor] = {}
    lora_tensors: Dict[str, Tensor] = {}
    for entry in header["tensors"]:
        lo, hi = entry["offset"], entry["offset"] + entry["nbytes"]
        if hi > len(payload):
            raise CheckpointFormatError(f"{path}: payload truncated in tensor {entry['name']}")
        arr = np.frombuffer(payload[lo:hi], dtype=_BLOB_DTYPE).astype(np.float32).reshape(entry["shape"])
        name = entry["name"]
        if name.startswith("lora."):
            lora_tensors[name[len("lora."):]] = Tensor(arr, requires_grad=True)
        else:
            tensors[name] = Tensor(arr, requires_grad=True)

    params = ModelParams(config, tensors)
    issues = params.validate()
    if issues:
        raise CheckpointFormatError(f"{path}: {', '.join(issues)}")

    lora = None
    if header.get("lora") is not None:
        lora_config = LoraConfig.from_dict(header["lora"])
        factors = {}
        for key in sorted(lora_tensors):
            if key.endswith(".lora_a"):
                base = key[: -len(".lora_a")]
                factors[base] = (lora_tensors[key], lora_tensors[f"{base}.lora_b"])
        lora = LoraAdapters(lora_config, factors)

    logger.debug(f"Loaded checkpoint {path} ({len(tensors)} base tensors)")
    return Checkpoint(params=params, lora=lora, metadata=header.get("metadata", {}))
