"""
Programmatic end-to-end runs: generate → tokenize → initialize → adapt →
fine-tune → embed → search → evaluate.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

from adaptation.models import AdaptResult
from adaptation.trainer import run_adaptation
from corpus_toolkit.synthetic import gen_synthetic
from corpus_toolkit.tokenizer import build_tokenizer
from embedding_compression.compress import compress_index, compress_query
from embedding_compression.models import CompressionDescriptor
from eval_metrics.metrics import evaluate_run
from eval_metrics.models import EvaluationReport
from eval_metrics.trec_io import write_run
from finetuning.mining import mine_hard_negatives
from finetuning.models import TrainPair
from finetuning.trainer import run_finetune
from prompt_builder import PROMPT_WORDS
from prompt_builder.templates import PromptTemplates
from retrieval_index.encoder import TextEncoder
from retrieval_index.models import DenseIndex
from retrieval_index.search import search_many
from transformer_model.model import TransformerModel

from .exceptions import InvalidExperimentError
from .models import ExperimentConfig, PipelineResult, Workspace

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def prepare_workspace(config: ExperimentConfig) -> Workspace:
    """Generate the task and build its tokenizer."""
    task = gen_synthetic(config.task)
    texts = [d.text for d in task.documents]
    texts += [f"{r.text} {r.next}" for r in task.adapt_corpus]
    texts += [p.query for p in task.train_pairs]
    texts += [q.text for q in task.eval_queries]
    tokenizer = build_tokenizer(texts, max_vocab=config.max_vocab, reserved_words=PROMPT_WORDS)
    logger.info(
        f"Workspace: {len(task.documents)} docs, {len(task.train_pairs)} train pairs, "
        f"{len(task.eval_queries)} eval queries, |V|={tokenizer.vocab_size}"
    )
    return Workspace(task=task, tokenizer=tokenizer, templates=PromptTemplates.from_tokenizer(tokenizer))


def copy_model(model: TransformerModel) -> TransformerModel:
    """Base weights only; adapters are not carried over."""
    return TransformerModel(model.params.copy())


def initialize_model(config: ExperimentConfig, workspace: Workspace) -> TransformerModel:
    return TransformerModel.initialize(config.model_config(workspace.tokenizer), seed=config.seed)


def adapt_model(
    config: ExperimentConfig,
    workspace: Workspace,
    model: TransformerModel,
    out_dir: Optional[PathLike] = None,
    verbose: bool = False,
) -> Tuple[TransformerModel, AdaptResult]:
    """Adapted copy of `model`; `model` itself is left as it was."""
    adapted = copy_model(model)
    out = Path(out_dir) if out_dir is not None else None
    result = run_adaptation(
        config.adapt,
        workspace.adapt_records(),
        adapted,
        workspace.templates,
        checkpoint_path=out / "adapted.ckpt" if out else None,
        loss_curve_path=out / "adapt_loss.csv" if out else None,
        verbose=verbose,
    )
    return adapted, result


def training_pairs(config: ExperimentConfig, workspace: Workspace, start: TransformerModel) -> Sequence[TrainPair]:
    """Train pairs with negatives mined by the pre-fine-tuning encoder."""
    pairs = workspace.train_pairs()
    cfg = config.finetune
    if cfg.n_hard_negatives == 0:
        return pairs
    encoder = TextEncoder(start, workspace.tokenizer, scheme=cfg.scheme_pair, templates=workspace.templates,
                          threads=config.threads)
    return mine_hard_negatives(
        encoder, pairs, workspace.task.documents, cfg.k_window, cfg.n_hard_negatives,
        judged=workspace.task.train_qrels, seed=cfg.seed,
    )


def evaluate_encoder(
    config: ExperimentConfig,
    workspace: Workspace,
    encoder: TextEncoder,
    index: Optional[DenseIndex] = None,
    descriptor: Optional[CompressionDescriptor] = None,
    run_path: Optional[PathLike] = None,
) -> Tuple[EvaluationReport, DenseIndex]:
    """
    Embed (unless `index` is given), optionally compress, search the eval
    queries and score them.
    """
    if index is None:
        index = encoder.embed_corpus(workspace.task.documents)
    if descriptor is not None:
        index = compress_index(index, descriptor)
    query_vecs = encoder.embed_queries(workspace.task.eval_queries)
    if index.metadata.compression:
        query_vecs = {qid: compress_query(index, vec) for qid, vec in query_vecs.items()}
    run = search_many(index, query_vecs, k=max(k for _, k in config.metrics))
    if run_path is not None:
        write_run(run, run_path)
    return evaluate_run(run, workspace.task.eval_qrels, config.metrics), index


def finetune_and_evaluate(
    config: ExperimentConfig,
    workspace: Workspace,
    initial: TransformerModel,
    start: TransformerModel,
    adapt_result: Optional[AdaptResult] = None,
    out_dir: Optional[PathLike] = None,
    verbose: bool = False,
) -> PipelineResult:
    """Fine-tune a copy of `start` and evaluate it on the held-out queries."""
    out = Path(out_dir) if out_dir is not None else None
    pairs = training_pairs(config, workspace, start)
    model = copy_model(start)
    finetune_result = run_finetune(
        config.finetune,
        pairs,
        model,
        workspace.templates,
        checkpoint_path=out / "finetuned.ckpt" if out else None,
        loss_curve_path=out / "finetune_loss.csv" if out else None,
        verbose=verbose,
    )
    encoder = TextEncoder(model, workspace.tokenizer, scheme=config.finetune.scheme_pair,
                          templates=workspace.templates, threads=config.threads)
    report, index = evaluate_encoder(config, workspace, encoder, run_path=out / "run.trec" if out else None)
    if out is not None:
        (out / "metrics.json").write_text(report.to_json() + "\n", encoding="utf-8")
    return PipelineResult(
        config=config,
        report=report,
        initial=initial,
        start=start,
        finetuned=model,
        encoder=encoder,
        index=index,
        pairs=pairs,
        adapt_result=adapt_result,
        finetune_result=finetune_result,
    )


def run_pipeline(
    config: ExperimentConfig,
    workspace: Optional[Workspace] = None,
    adapt: bool = True,
    out_dir: Optional[PathLike] = None,
    verbose: bool = False,
) -> PipelineResult:
    """
    One full run. With `adapt=False` fine-tuning starts from the initial
    model (the unadapted baseline).

    Raises:
        InvalidExperimentError: the configuration has issues
    """
    issues = config.validate()
    if issues:
        raise InvalidExperimentError(f"Invalid experiment config: {', '.join(issues)}")
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    workspace = workspace or prepare_workspace(config)

    initial = initialize_model(config, workspace)
    adapt_result = None
    start = initial
    if adapt:
        start, adapt_result = adapt_model(config, workspace, initial, out_dir, verbose)
    result = finetune_and_evaluate(config, workspace, initial, start, adapt_result, out_dir, verbose)
    logger.info(
        f"Pipeline (seed={config.seed}, adapted={adapt}, scheme={config.finetune.scheme}): "
        + ", ".join(str(r) for r in result.report.results)
    )
    return result
