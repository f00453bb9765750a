"""
Decoder-only transformer with prompt-anchored embeddings.

Pre-norm residual blocks (RMS norm), rotary positions taken from explicit
position ids, per-head masked attention and a SwiGLU feed-forward. Every
op computes each output row from its own input row, so a row's hidden
state depends only on the tokens and positions the mask lets it see.
"""

import logging
from typing import Dict, Optional, Sequence, Union

import numpy as np

from numerics import ops
from numerics.tensor import Tensor
from prompt_builder.builder import build_mask
from prompt_builder.models import JointPrompt, PromptKind, TokenSeq

from .exceptions import AnchorOutOfRangeError, InvalidModelConfigError, SequenceTooLongError
from .lora import LoraAdapters
from .models import Embedding, ModelConfig
from .params import ModelParams, init_params

Prompt = Union[TokenSeq, JointPrompt]


class TransformerModel:
    """
    Transformer over a ModelParams store, optionally with LoRA adapters.

    Parameters are read-only during inference, so one model may serve
    concurrent forward passes as long as each thread runs under no_grad.
    """

    def __init__(self, params: ModelParams, lora: Optional[LoraAdapters] = None, verbose: bool = False):
        issues = params.config.validate() + params.validate()
        if issues:
            raise InvalidModelConfigError(f"Invalid model parameters: {', '.join(issues)}")
        self.params = params
        self.config: ModelConfig = params.config
        self.lora = lora

        self.logger = logging.getLogger(__name__)
        if verbose:
            self.logger.setLevel(logging.DEBUG)
        self.logger.debug(
            f"TransformerModel: {self.config.n_layers} layers, d={self.config.d_model}, "
            f"|V|={self.config.vocab_size}, {params.n_parameters()} parameters"
        )

    @classmethod
    def initialize(cls, config: ModelConfig, seed: int = 0, verbose: bool = False) -> "TransformerModel":
        return cls(init_params(config, seed=seed), verbose=verbose)

    # ------------------------------------------------------------------
    # Parameters
    # ------------------------------------------------------------------
    def parameters(self) -> Dict[str, Tensor]:
        """Trainable tensors: base parameters with requires_grad plus LoRA factors."""
        params = dict(self.params.trainable())
        if self.lora is not None:
            params.update(self.lora.parameters())
        return params

    def freeze_base(self) -> None:
        self.params.set_trainable(False)

    def freeze_head(self) -> None:
        """Stop updates to W (the embedding table when the head is tied)."""
        name = "tok_embeddings" if self.config.tie_head else "head"
        self.params[name].requires_grad = False

    def head_weight(self) -> Tensor:
        """Projection head W [d × |V|]."""
        if self.config.tie_head:
            return ops.transpose(self.params["tok_embeddings"])
        return self.params["head"]

    def checksum(self) -> str:
        return self.params.checksum()

    # ------------------------------------------------------------------
    # Forward
    # ------------------------------------------------------------------
    def _linear(self, x: Tensor, name: str) -> Tensor:
        if self.lora is not None:
            return self.lora.adapted(x, name, self.params[name])
        return ops.matmul(x, self.params[name])

    def _attention(self, x: Tensor, prefix: str, mask: np.ndarray, positions: Sequence[int]) -> Tensor:
        cfg = self.config
        q = self._linear(x, f"{prefix}.wq")
        k = self._linear(x, f"{prefix}.wk")
        v = self._linear(x, f"{prefix}.wv")
        hd = cfg.head_dim
        heads = []
        for h in range(cfg.n_heads):
            lo, hi = h * hd, (h + 1) * hd
            qh = ops.rope_rotate(ops.slice_cols(q, lo, hi), positions, cfg.rope_base, cfg.max_seq_len)
            kh = ops.rope_rotate(ops.slice_cols(k, lo, hi), positions, cfg.rope_base, cfg.max_seq_len)
            vh = ops.slice_cols(v, lo, hi)
            heads.append(ops.masked_attention(qh, kh, vh, mask))
        out = heads[0] if len(heads) == 1 else ops.concat_cols(heads)
        return self._linear(out, f"{prefix}.wo")

    def _feed_forward(self, x: Tensor, prefix: str) -> Tensor:
        act = ops.silu if self.config.mlp_activation == "silu" else ops.gelu
        gate = act(ops.matmul(x, self.params[f"{prefix}.w1"]))
        up = ops.matmul(x, self.params[f"{prefix}.w3"])
        return ops.matmul(ops.mul(gate, up), self.params[f"{prefix}.w2"])

    def forward(self, token_ids: Sequence[int], mask: np.ndarray, positions: Sequence[int]) -> Tensor:
        """
        Hidden states [L × d] for a token sequence.

        Args:
            token_ids: L token ids
            mask: boolean [L × L], mask[i][j] True when i may attend to j
            positions: rotary position id per token

        Raises:
            SequenceTooLongError: L exceeds max_seq_len
            ValueError: empty input, or mask/positions not matching L
        """
        cfg = self.config
        L = len(token_ids)
        if L == 0:
            raise ValueError("forward needs at least one token")
        if L > cfg.max_seq_len:
            raise SequenceTooLongError(f"sequence of {L} tokens exceeds max_seq_len {cfg.max_seq_len}")
        if len(positions) != L:
            raise ValueError(f"{len(positions)} position ids for {L} tokens")
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (L, L):
            raise ValueError(f"mask shape {mask.shape} does not match sequence length {L}")

        x = ops.embedding_lookup(self.params["tok_embeddings"], token_ids)
        for i in range(cfg.n_layers):
            p = f"layers.{i}"
            h = ops.rms_norm(x, self.params[f"{p}.attention_norm"], cfg.norm_eps)
            x = ops.add(x, self._attention(h, p, mask, positions))
            h = ops.rms_norm(x, self.params[f"{p}.ffn_norm"], cfg.norm_eps)
            x = ops.add(x, self._feed_forward(h, p))
        return ops.rms_norm(x, self.params["norm"], cfg.norm_eps)

    def encode(self, prompt: Prompt) -> Tensor:
        """Run forward with the prompt's own segment mask and position ids."""
        return self.forward(prompt.token_ids, build_mask(prompt), prompt.positions)

    def logits(self, hidden: Tensor) -> Tensor:
        """hidden @ W, shape [L × |V|]."""
        return ops.matmul(hidden, self.head_weight())

    # ------------------------------------------------------------------
    # Embeddings
    # ------------------------------------------------------------------
    def extract_embedding(self, hidden: Tensor, anchor: int, kind: PromptKind = PromptKind.PLAIN) -> Embedding:
        """
        The hidden row at an anchor position.

        Raises:
            AnchorOutOfRangeError: anchor is not in 0..L-1
        """
        L = hidden.shape[0]
        if not 0 <= int(anchor) < L:
            raise AnchorOutOfRangeError(f"anchor {anchor} outside sequence of length {L}")
        return Embedding(ops.take_rows(hidden, [int(anchor)]), kind)

    def mean_pool(self, hidden: Tensor, valid_len: Optional[int] = None, kind: PromptKind = PromptKind.PLAIN) -> Embedding:
        """Arithmetic mean of the first valid_len hidden rows."""
        return Embedding(ops.mean_rows(hidden, valid_len), kind)

    def embed(self, prompt: TokenSeq) -> Embedding:
        hidden = self.encode(prompt)
        return self.extract_embedding(hidden, prompt.anchor, prompt.kind)

    def embed_joint(self, prompt: JointPrompt) -> tuple:
        """(SELF embedding, NEXT embedding, hidden) from one pass."""
        hidden = self.encode(prompt)
        alpha = self.extract_embedding(hidden, prompt.alpha_anchor, PromptKind.SELF)
        beta = self.extract_embedding(hidden, prompt.beta_anchor, PromptKind.NEXT)
        return alpha, beta, hidden
