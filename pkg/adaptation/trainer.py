"""
EBAE/EBAR adaptation.

For each record one joint prompt is encoded; the SELF anchor embedding is
projected through the head W and scored against the bag of input tokens
(EBAE), the NEXT anchor embedding against the bag of next-text tokens
(EBAR). Per-record losses are back-propagated one record at a time in
batch order, so gradients accumulate in a fixed order.
"""

import logging
import math
import time
from collections import Counter
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from numerics import ops
from numerics.exceptions import NonFiniteError
from numerics.optim import Adam
from numerics.tensor import Tensor, no_grad
from prompt_builder.builder import build_joint
from prompt_builder.templates import PromptTemplates
from transformer_model.checkpoint import save_checkpoint
from transformer_model.model import TransformerModel

from .config import DIVERGENCE_FACTOR
from .exceptions import InsufficientCorpusError, InvalidAdaptConfigError, InvalidRecordError, TrainingDivergedError
from .models import AdaptConfig, AdaptRecord, AdaptResult, StepLoss


def target_multiset(tokens: Sequence[int], exclude: Sequence[int] = ()) -> Dict[int, int]:
    """
    Token id → count, ascending by id. The normalizer is the total count.

    Raises:
        InvalidRecordError: nothing is left after exclusion
    """
    skip = set(int(t) for t in exclude)
    counts = Counter(int(t) for t in tokens if int(t) not in skip)
    if not counts:
        raise InvalidRecordError("target multiset is empty")
    return dict(sorted(counts.items()))


def epoch_batches(n_items: int, batch_size: int, seed: int) -> Iterator[List[int]]:
    """Endless batches drawn from a fresh permutation per epoch."""
    rng = np.random.default_rng(seed)
    order: List[int] = []
    while True:
        batch = []
        while len(batch) < batch_size:
            if not order:
                order = [int(i) for i in rng.permutation(n_items)]
            batch.append(order.pop(0))
        yield batch


def record_losses(
    model: TransformerModel,
    record: AdaptRecord,
    templates: PromptTemplates,
    seq_len: int,
) -> Tuple[Tensor, Tensor]:
    """(EBAE loss, EBAR loss) for one record from a single joint pass."""
    prompt = build_joint(record.text, templates, seq_len)
    hidden = model.encode(prompt)
    anchors = ops.take_rows(hidden, [prompt.alpha_anchor, prompt.beta_anchor])
    logits = model.logits(anchors)
    specials = (model.config.pad_id, model.config.bos_id, model.config.eos_id)
    # EBAE scores the input tokens that were actually encoded
    ebae_target = target_multiset(prompt.token_ids[: prompt.n_input], specials)
    ebar_target = target_multiset(record.next_text, specials)
    ebae = ops.softmax_cross_entropy(ops.take_rows(logits, [0]), ebae_target)
    ebar = ops.softmax_cross_entropy(ops.take_rows(logits, [1]), ebar_target)
    return ebae, ebar


def evaluate_adapt_loss(
    model: TransformerModel,
    records: Sequence[AdaptRecord],
    templates: PromptTemplates,
    seq_len: Optional[int] = None,
) -> Tuple[float, float]:
    """Mean (EBAE, EBAR) loss over records without recording a graph."""
    if not records:
        raise InvalidRecordError("no records to evaluate")
    seq_len = seq_len or model.config.max_seq_len
    ebae_sum = ebar_sum = 0.0
    with no_grad():
        for record in records:
            ebae, ebar = record_losses(model, record, templates, seq_len)
            ebae_sum += ebae.item()
            ebar_sum += ebar.item()
    return ebae_sum / len(records), ebar_sum / len(records)


class AdaptationTrainer:
    """
    Runs EBAE/EBAR adaptation on a TransformerModel in place.

    The trainer only ever sees AdaptRecords (text pairs), never relevance
    judgments.
    """

    def __init__(
        self,
        model: TransformerModel,
        templates: PromptTemplates,
        config: Optional[AdaptConfig] = None,
        verbose: bool = False,
    ):
        self.config = config or AdaptConfig()
        issues = self.config.validate()
        if issues:
            raise InvalidAdaptConfigError(f"Invalid adaptation config: {', '.join(issues)}")

        self.model = model
        self.templates = templates
        self.seq_len = min(self.config.seq_len or model.config.max_seq_len, model.config.max_seq_len)
        self.divergence_bound = DIVERGENCE_FACTOR * math.log(model.config.vocab_size)

        self.logger = logging.getLogger(__name__)
        if verbose:
            self.logger.setLevel(logging.DEBUG)

        self.logger.info(
            f"Initializing AdaptationTrainer (steps={self.config.steps}, batch={self.config.batch_size}, "
            f"lr={self.config.learning_rate})"
        )

    def _check(self, value: float, step: int, record: AdaptRecord, what: str) -> None:
        if not math.isfinite(value) or value > self.divergence_bound:
            raise TrainingDivergedError(
                f"{what} loss {value:.4f} at step {step}, record '{record.id}' "
                f"(bound {self.divergence_bound:.2f})"
            )

    def batch_loss(self, batch: Sequence[AdaptRecord], step: int = 0) -> Tuple[float, float]:
        """
        Forward and backward for one batch; gradients are left on the params.

        Returns:
            Batch-mean (EBAE loss, EBAR loss)
        """
        cfg = self.config
        inv = 1.0 / len(batch)
        ebae_sum = ebar_sum = 0.0
        for record in batch:
            try:
                ebae, ebar = record_losses(self.model, record, self.templates, self.seq_len)
                self._check(ebae.item(), step, record, "EBAE")
                self._check(ebar.item(), step, record, "EBAR")
                terms = []
                if cfg.w_ebae:
                    terms.append(ops.scale(ebae, cfg.w_ebae * inv))
                if cfg.w_ebar:
                    terms.append(ops.scale(ebar, cfg.w_ebar * inv))
                total = terms[0] if len(terms) == 1 else ops.add_n(terms)
                if total.requires_grad:
                    total.backward()
            except NonFiniteError as exc:
                raise TrainingDivergedError(f"step {step}, record '{record.id}': {exc}") from exc
            ebae_sum += ebae.item()
            ebar_sum += ebar.item()
        return ebae_sum * inv, ebar_sum * inv

    def run(self, records: Sequence[AdaptRecord]) -> AdaptResult:
        """
        Train for config.steps batches.

        Raises:
            InsufficientCorpusError: fewer records than batch_size
            InvalidRecordError: a record with an empty side
            TrainingDivergedError: non-finite or runaway loss
        """
        cfg = self.config
        for record in records:
            issues = record.validate()
            if issues:
                raise InvalidRecordError(f"record '{record.id}': {', '.join(issues)}")
        if cfg.steps > 0 and len(records) < cfg.batch_size:
            raise InsufficientCorpusError(
                f"corpus has {len(records)} records, fewer than batch_size {cfg.batch_size}"
            )

        if cfg.freeze_head:
            self.model.freeze_head()

        result = AdaptResult(config=cfg, checksum_before=self.model.checksum())
        self.logger.info(f"Adapting on {len(records)} records for {cfg.steps} steps")
        start = time.time()

        if cfg.steps > 0:
            optimizer = Adam(self.model.parameters(), lr=cfg.learning_rate, clip_norm=cfg.clip_norm)
            batches = epoch_batches(len(records), cfg.batch_size, cfg.seed)
            for step in range(1, cfg.steps + 1):
                optimizer.zero_grad()
                batch = [records[i] for i in next(batches)]
                ebae, ebar = self.batch_loss(batch, step)
                try:
                    norm = optimizer.step()
                except NonFiniteError as exc:
                    raise TrainingDivergedError(f"step {step}: {exc}") from exc
                result.loss_curve.append(StepLoss(step=step, ebae_loss=ebae, ebar_loss=ebar))
                self.logger.debug(f"step {step}: ebae={ebae:.4f} ebar={ebar:.4f} grad_norm={norm:.4f}")
                if step % cfg.log_every == 0 or step == cfg.steps:
                    self.logger.info(f"Step {step}/{cfg.steps}: EBAE {ebae:.4f}, EBAR {ebar:.4f}")
            optimizer.zero_grad()

        result.elapsed_sec = time.time() - start
        result.checksum_after = self.model.checksum()
        self.logger.info(f"Adaptation finished in {result.elapsed_sec:.1f}s")
        return result


def run_adaptation(
    config: AdaptConfig,
    records: Sequence[AdaptRecord],
    model: TransformerModel,
    templates: PromptTemplates,
    checkpoint_path=None,
    loss_curve_path=None,
    verbose: bool = False,
) -> AdaptResult:
    """Adapt `model` in place, then write the checkpoint and loss curve when paths are given."""
    result = AdaptationTrainer(model, templates, config, verbose=verbose).run(records)
    if checkpoint_path is not None:
        save_checkpoint(
            checkpoint_path,
            model.params,
            lora=model.lora,
            metadata={"stage": "adapted", "adapt_config": config.to_dict(), "prompts": templates.metadata()},
        )
    if loss_curve_path is not None:
        result.write_loss_curve(loss_curve_path)
    return result
