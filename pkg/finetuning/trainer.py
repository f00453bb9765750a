"""
Supervised contrastive fine-tuning.

Queries are embedded with the scheme's query prompt and documents with its
doc prompt, inside the graph. With LoRA the base weights are frozen and only
the adapter factors (and the optional projection) move.
"""

import logging
import math
import time
from typing import Optional, Sequence

import numpy as np

from numerics.exceptions import NonFiniteError
from numerics.optim import Adam
from numerics.tensor import Tensor, default_dtype
from prompt_builder.templates import PromptTemplates
from transformer_model.checkpoint import save_checkpoint
from transformer_model.lora import LoraConfig, attach_lora
from transformer_model.model import TransformerModel

from .batching import BatchAssembler, embed_batch
from .config import DIVERGENCE_FACTOR
from .exceptions import FinetuneDivergedError, InvalidFinetuneConfigError, InvalidPairError
from .loss import contrastive_loss
from .models import FinetuneConfig, FinetuneResult, StepLoss, TrainPair


def identity_projection(d_in: int, d_out: int) -> np.ndarray:
    """First d_out columns of the d_in identity, so projected scores start as a prefix inner product."""
    if d_out > d_in:
        raise InvalidFinetuneConfigError(f"projection_dim {d_out} exceeds embedding dimension {d_in}")
    return np.eye(d_in, d_out, dtype=default_dtype())


class ContrastiveTrainer:
    """
    Fine-tunes a TransformerModel in place on (query, positive, negatives) pairs.

    Args:
        model: adapted or freshly initialized model
        templates: prompt blocks shared with embedding and search
        config: fine-tuning parameters
        projection: initial projection [d × d'] (identity slice when
            config.projection_dim is set and none is given)
    """

    def __init__(
        self,
        model: TransformerModel,
        templates: PromptTemplates,
        config: Optional[FinetuneConfig] = None,
        projection: Optional[np.ndarray] = None,
        verbose: bool = False,
    ):
        self.config = config or FinetuneConfig()
        issues = self.config.validate()
        if issues:
            raise InvalidFinetuneConfigError(f"Invalid fine-tuning config: {', '.join(issues)}")

        self.model = model
        self.templates = templates
        self.scheme = self.config.scheme_pair
        self.seq_len = min(self.config.seq_len or model.config.max_seq_len, model.config.max_seq_len)
        self.divergence_factor = DIVERGENCE_FACTOR

        self.projection: Optional[Tensor] = None
        if projection is not None:
            self.projection = Tensor(np.array(projection, dtype=default_dtype()), requires_grad=True)
        elif self.config.projection_dim is not None:
            init = identity_projection(model.config.d_model, self.config.projection_dim)
            self.projection = Tensor(init, requires_grad=True)

        self.logger = logging.getLogger(__name__)
        if verbose:
            self.logger.setLevel(logging.DEBUG)

        self.logger.info(
            f"Initializing ContrastiveTrainer (scheme={self.scheme.value}, steps={self.config.steps}, "
            f"batch={self.config.batch_size}, lora={self.config.use_lora}, tau={self.config.temperature})"
        )

    def _attach_adapters(self) -> None:
        cfg = self.config
        if self.model.lora is None:
            lora_config = LoraConfig(rank=cfg.lora_rank, alpha=cfg.lora_alpha)
            self.model.lora = attach_lora(self.model.params, lora_config, seed=cfg.seed)
            self.logger.info(f"Attached LoRA adapters (rank={cfg.lora_rank}, alpha={cfg.lora_alpha})")
        self.model.freeze_base()

    def divergence_bound(self, n_candidates: int) -> float:
        return self.divergence_factor * max(math.log(max(n_candidates, 1)), 1.0)

    def batch_loss(self, batch, step: int = 0) -> Tensor:
        """Contrastive loss of one assembled batch, still on the graph."""
        cfg = self.config
        queries = embed_batch(
            self.model, [p.query for p in batch.pairs], self.scheme.query_kind,
            self.templates, self.seq_len, self.projection, cfg.normalize,
        )
        docs = embed_batch(
            self.model, batch.doc_tokens, self.scheme.doc_kind,
            self.templates, self.seq_len, self.projection, cfg.normalize,
        )
        return contrastive_loss(queries, docs, batch.positive_index, cfg.temperature, batch.doc_ids)

    def run(self, pairs: Sequence[TrainPair]) -> FinetuneResult:
        """
        Train for config.steps batches.

        Raises:
            InvalidPairError: a pair with an empty text or its positive as a negative
            InvalidFinetuneConfigError: fewer than two pairs to train on
            FinetuneDivergedError: non-finite or runaway loss, or non-finite gradient
        """
        cfg = self.config
        for pair in pairs:
            issues = pair.validate()
            if issues:
                raise InvalidPairError(f"pair '{pair.query_id}': {', '.join(issues)}")
        if cfg.steps > 0 and len(pairs) < 2:
            raise InvalidFinetuneConfigError(f"need at least 2 training pairs, got {len(pairs)}")

        if cfg.use_lora:
            self._attach_adapters()

        result = FinetuneResult(config=cfg, base_checksum_before=self.model.checksum())
        self.logger.info(f"Fine-tuning on {len(pairs)} pairs for {cfg.steps} steps")
        start = time.time()

        if cfg.steps > 0:
            params = self.model.parameters()
            if self.projection is not None:
                params["projection"] = self.projection
            optimizer = Adam(params, lr=cfg.learning_rate, clip_norm=cfg.clip_norm)
            assembler = BatchAssembler(pairs, cfg.batch_size, cfg.seed)
            for step in range(1, cfg.steps + 1):
                optimizer.zero_grad()
                batch = assembler.next_batch()
                try:
                    loss = self.batch_loss(batch, step)
                    value = loss.item()
                    bound = self.divergence_bound(len(batch.doc_ids))
                    if not math.isfinite(value) or value > bound:
                        raise FinetuneDivergedError(
                            f"loss {value:.4f} at step {step} (bound {bound:.2f}, "
                            f"queries {[p.query_id for p in batch.pairs]})"
                        )
                    if loss.requires_grad:
                        loss.backward()
                    norm = optimizer.step()
                except NonFiniteError as exc:
                    raise FinetuneDivergedError(f"step {step}: {exc}") from exc
                result.loss_curve.append(StepLoss(step=step, loss=value))
                self.logger.debug(f"step {step}: loss={value:.4f} docs={len(batch.doc_ids)} grad_norm={norm:.4f}")
                if step % cfg.log_every == 0 or step == cfg.steps:
                    self.logger.info(f"Step {step}/{cfg.steps}: contrastive loss {value:.4f}")
            optimizer.zero_grad()

        result.elapsed_sec = time.time() - start
        result.base_checksum_after = self.model.checksum()
        lora = self.model.lora
        result.adapter_checksum = lora.checksum() if lora is not None and lora.active else None
        if self.projection is not None:
            result.projection = self.projection.data.copy()
        self.logger.info(f"Fine-tuning finished in {result.elapsed_sec:.1f}s")
        return result


def run_finetune(
    config: FinetuneConfig,
    pairs: Sequence[TrainPair],
    model: TransformerModel,
    templates: PromptTemplates,
    checkpoint_path=None,
    loss_curve_path=None,
    projection: Optional[np.ndarray] = None,
    verbose: bool = False,
) -> FinetuneResult:
    """Fine-tune `model` in place; the checkpoint records the scheme so search can refuse a mismatch."""
    result = ContrastiveTrainer(model, templates, config, projection=projection, verbose=verbose).run(pairs)
    if checkpoint_path is not None:
        metadata = {
            "stage": "finetuned",
            "scheme": config.scheme_pair.value,
            "finetune_config": config.to_dict(),
            "prompts": templates.metadata(),
        }
        if result.projection is not None:
            metadata["projection"] = result.projection.astype(np.float32).tolist()
        save_checkpoint(checkpoint_path, model.params, lora=model.lora, metadata=metadata)
    if loss_curve_path is not None:
        result.write_loss_curve(loss_curve_path)
    return result
