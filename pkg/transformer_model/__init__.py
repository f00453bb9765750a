"""
EBAdapt Lab - transformer_model

Decoder-only transformer producing token logits and prompt-anchored text
embeddings, with LoRA adapters and a self-describing checkpoint format.
"""

from .checkpoint import Checkpoint, load_checkpoint, read_header, save_checkpoint
from .exceptions import (
    AnchorOutOfRangeError,
    CheckpointFormatError,
    InvalidModelConfigError,
    SequenceTooLongError,
    TransformerModelError,
)
from .lora import LORA_TARGETS, LoraAdapters, LoraConfig, attach_lora
from .model import TransformerModel
from .models import Embedding, ModelConfig
from .params import ModelParams, init_params, param_shapes

__all__ = [
    # Types
    "ModelConfig",
    "ModelParams",
    "Embedding",
    "LoraConfig",
    "LoraAdapters",
    "Checkpoint",

    # Model
    "TransformerModel",
    "init_params",
    "param_shapes",
    "attach_lora",
    "LORA_TARGETS",

    # Checkpoints
    "save_checkpoint",
    "load_checkpoint",
    "read_header",

    # Exceptions
    "TransformerModelError",
    "InvalidModelConfigError",
    "SequenceTooLongError",
    "AnchorOutOfRangeError",
    "CheckpointFormatError",
]

__version__ = "1.0.0"
