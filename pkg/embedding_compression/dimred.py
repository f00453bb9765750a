"""
Projection heads that shrink embeddings from d to d' dimensions.

DimRed trains the projection together with contrastive fine-tuning.
DimRed* keeps the fine-tuned retriever frozen and fits the projection so
projected inner products reproduce the full-dimension ones.
"""

import dataclasses
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from corpus_toolkit.models import Document, Query
from finetuning.models import FinetuneConfig, FinetuneResult, TrainPair
from finetuning.trainer import ContrastiveTrainer
from numerics import kernels, ops
from numerics.tensor import Tensor, no_grad, precision
from prompt_builder.templates import PromptTemplates
from retrieval_index.encoder import TextEncoder
from transformer_model.model import TransformerModel

from .config import BACKTRACK_FACTOR, GROWTH_FACTOR, MIN_STEP
from .exceptions import InvalidCompressionError
from .models import CompressionDescriptor, CompressionMethod, DistillConfig, DistillResult


def _check_dim(dim: int, source_dim: int) -> None:
    if not 1 <= dim <= source_dim:
        raise InvalidCompressionError(f"target dimension {dim} must be in 1..{source_dim}")


def pca_projection(vectors: np.ndarray, dim: int) -> np.ndarray:
    """
    Top-dim eigenvectors of the uncentered second moment XᵀX, as columns [d × dim].

    Each column is signed so its largest-magnitude entry is positive.
    """
    x = np.asarray(vectors, dtype=np.float64)
    _check_dim(dim, x.shape[1])
    gram = kernels.matmul(x.T.copy(), x)
    _, vecs = np.linalg.eigh((gram + gram.T) / 2.0)
    top = vecs[:, ::-1][:, :dim].copy()
    lead = np.argmax(np.abs(top), axis=0)
    signs = np.sign(top[lead, np.arange(dim)])
    signs[signs == 0] = 1.0
    return top * signs


def train_dimred(
    model: TransformerModel,
    templates: PromptTemplates,
    pairs: Sequence[TrainPair],
    dim: int,
    config: Optional[FinetuneConfig] = None,
    verbose: bool = False,
) -> Tuple[CompressionDescriptor, FinetuneResult]:
    """
    Fine-tune with a projection head [d × dim] trained jointly; the contrastive
    loss sees only projected embeddings. The head starts as an identity slice.

    Raises:
        InvalidCompressionError: dim outside 1..d
    """
    _check_dim(dim, model.config.d_model)
    config = dataclasses.replace(config or FinetuneConfig(), projection_dim=dim)
    result = ContrastiveTrainer(model, templates, config, verbose=verbose).run(pairs)
    descriptor = CompressionDescriptor(CompressionMethod.DIMRED, dim=dim, projection=result.projection)
    return descriptor, result


class ProjectionDistiller:
    """
    Fits P [d × d'] minimizing mean((Q Dᵀ − (QP)(DP)ᵀ)²) over sampled query and doc embeddings.

    Full-batch gradient descent in float64. A step that would raise the
    objective is shrunk until it does not, so the loss curve never rises.
    """

    def __init__(self, config: DistillConfig, verbose: bool = False):
        issues = config.validate()
        if issues:
            raise InvalidCompressionError(f"Invalid distillation config: {', '.join(issues)}")
        self.config = config

        self.logger = logging.getLogger(__name__)
        if verbose:
            self.logger.setLevel(logging.DEBUG)
        self.logger.info(f"Initializing ProjectionDistiller (dim={config.dim}, steps={config.steps}, init={config.init})")

    def _sample(self, rows: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
        if rows.shape[0] <= size:
            return rows
        picks = np.sort(rng.choice(rows.shape[0], size=size, replace=False))
        return rows[picks]

    @staticmethod
    def _objective(q: Tensor, d: Tensor, p: Tensor, target: Tensor) -> Tensor:
        scores = ops.matmul(ops.matmul(q, p), ops.transpose(ops.matmul(d, p)))
        return ops.mse(scores, target)

    def fit(self, query_embs: np.ndarray, doc_embs: np.ndarray) -> DistillResult:
        cfg = self.config
        queries = np.asarray(query_embs, dtype=np.float64)
        docs = np.asarray(doc_embs, dtype=np.float64)
        if queries.ndim != 2 or docs.ndim != 2 or queries.shape[1] != docs.shape[1]:
            raise InvalidCompressionError(f"embedding shapes {queries.shape} and {docs.shape} do not match")
        _check_dim(cfg.dim, queries.shape[1])

        rng = np.random.default_rng(cfg.seed)
        queries = self._sample(queries, cfg.sample_queries, rng)
        docs = self._sample(docs, cfg.sample_docs, rng)
        if cfg.init == "pca":
            proj = pca_projection(np.vstack([queries, docs]), cfg.dim)
        else:
            proj = np.eye(queries.shape[1], cfg.dim)

        rejected = 0
        with precision(np.float64):
            q, d = Tensor(queries), Tensor(docs)
            target = Tensor(kernels.matmul(queries, docs.T.copy()))
            with no_grad():
                current = self._objective(q, d, Tensor(proj), target).item()
            curve = [current]
            step_size = cfg.learning_rate
            for step in range(1, cfg.steps + 1):
                p = Tensor(proj, requires_grad=True)
                self._objective(q, d, p, target).backward()
                grad = p.grad
                if not np.any(grad):
                    self.logger.debug(f"Zero gradient at step {step}")
                    break
                while step_size > MIN_STEP:
                    candidate = proj - step_size * grad
                    with no_grad():
                        value = self._objective(q, d, Tensor(candidate), target).item()
                    if value <= current:
                        break
                    step_size *= BACKTRACK_FACTOR
                    rejected += 1
                else:
                    self.logger.debug(f"Step size below {MIN_STEP} at step {step}; stopping")
                    break
                proj, current = candidate, value
                curve.append(current)
                step_size *= GROWTH_FACTOR
                self.logger.debug(f"step {step}: distill loss={current:.6e} step_size={step_size:.3e}")

        self.logger.info(
            f"Distilled {queries.shape[1]}→{cfg.dim} projection on {len(queries)}×{len(docs)} pairs: "
            f"loss {curve[0]:.6e} → {curve[-1]:.6e}"
        )
        descriptor = CompressionDescriptor(CompressionMethod.DIMRED_STAR, dim=cfg.dim, projection=proj)
        return DistillResult(descriptor=descriptor, loss_curve=curve, rejected_steps=rejected)


def distill_dimred(
    query_embs: np.ndarray,
    doc_embs: np.ndarray,
    config: DistillConfig,
    verbose: bool = False,
) -> DistillResult:
    """DimRed* projection from frozen-retriever embeddings."""
    return ProjectionDistiller(config, verbose=verbose).fit(query_embs, doc_embs)


def distill_from_encoder(
    encoder: TextEncoder,
    queries: Sequence[Query],
    documents: Sequence[Document],
    config: DistillConfig,
    verbose: bool = False,
) -> DistillResult:
    """Embed queries and docs with a frozen encoder (forward only), then distill."""
    query_embs = encoder.embed_queries(queries)
    index = encoder.embed_corpus(documents)
    q = np.vstack([query_embs[x.query_id] for x in queries])
    return distill_dimred(q, index.vectors, config, verbose=verbose)
