"""
Comparison experiments at desk scale.

- compare_initializations: adapt-then-finetune against finetune-from-scratch
- compare_schemes: prompt schemes on one task
- compression_sweep: none / Sparse / DimRed / DimRed* over a budget schedule
- lexical_effect: lexical similarity of initial, adapted and fine-tuned models
"""

import dataclasses
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from corpus_toolkit.models import Query
from embedding_compression.dimred import distill_dimred, train_dimred
from embedding_compression.models import CompressionDescriptor, CompressionMethod, DistillConfig
from lexical_baseline.models import LexicalReport
from lexical_baseline.report import DEFAULT_NS, eval_pairs, lexical_similarity_report
from retrieval_index.encoder import TextEncoder

from .config import BUDGET_FRACTIONS, MONOTONE_TOLERANCE, PRIMARY_METRIC, SEEDS
from .exceptions import InvalidExperimentError
from .models import ExperimentConfig, PipelineResult, Workspace
from .pipeline import (
    adapt_model,
    copy_model,
    evaluate_encoder,
    finetune_and_evaluate,
    initialize_model,
    prepare_workspace,
    run_pipeline,
)

logger = logging.getLogger(__name__)

SWEEP_METHODS = ("sparse", "dimred", "dimred_star")


def compare_initializations(
    config: ExperimentConfig,
    seeds: Sequence[int] = SEEDS,
    workspace: Optional[Workspace] = None,
) -> pd.DataFrame:
    """One row per (seed, init) with init ∈ {adapted, scratch} and every metric."""
    workspace = workspace or prepare_workspace(config)
    rows = []
    for seed in seeds:
        seeded = config.with_seed(seed)
        for adapt in (True, False):
            result = run_pipeline(seeded, workspace, adapt=adapt)
            rows.append({"init": "adapted" if adapt else "scratch", **result.summary()})
    frame = pd.DataFrame(rows).drop(columns=["adapted"])
    means = frame.groupby("init")[PRIMARY_METRIC].mean()
    logger.info(
        f"Initialization comparison over {len(seeds)} seeds: "
        f"adapted {means.get('adapted', float('nan')):.4f}, scratch {means.get('scratch', float('nan')):.4f}"
    )
    return frame


def compare_schemes(
    config: ExperimentConfig,
    schemes: Iterable[str] = ("n2s", "s2s", "n2n", "none"),
    workspace: Optional[Workspace] = None,
) -> pd.DataFrame:
    """Adapt once, then fine-tune and evaluate under each scheme."""
    workspace = workspace or prepare_workspace(config)
    initial = initialize_model(config, workspace)
    adapted, adapt_result = adapt_model(config, workspace, initial)
    rows = []
    for scheme in schemes:
        result = finetune_and_evaluate(config.with_scheme(scheme), workspace, initial, adapted, adapt_result)
        rows.append(result.summary())
    return pd.DataFrame(rows).drop(columns=["adapted"])


def budget_schedule(dim: int, fractions: Sequence[float] = BUDGET_FRACTIONS) -> List[int]:
    """Increasing budgets in 1..dim, one per fraction of the full dimension."""
    return sorted({max(1, min(dim, int(round(dim * f)))) for f in fractions})


def _row(method: str, budget: Optional[int], report) -> dict:
    return {"method": method, "budget": budget, **{r.label: r.value for r in report.results}}


def compression_sweep(
    result: PipelineResult,
    workspace: Workspace,
    budgets: Optional[Sequence[int]] = None,
    methods: Sequence[str] = SWEEP_METHODS,
    distill: Optional[DistillConfig] = None,
) -> pd.DataFrame:
    """
    Retrieval quality of every compression method at every budget.

    Sparse and DimRed* compress the fine-tuned retriever's index; DimRed
    repeats fine-tuning from the same start point with a projection head.
    The uncompressed run is the `none` row.
    """
    config = result.config
    dim = result.index.dim
    budgets = list(budgets or budget_schedule(dim))
    if any(not 1 <= b <= dim for b in budgets):
        raise InvalidExperimentError(f"budgets must lie in 1..{dim}, got {budgets}")
    unknown = set(methods) - set(SWEEP_METHODS)
    if unknown:
        raise InvalidExperimentError(f"unknown compression methods {sorted(unknown)}")

    rows = [_row("none", None, result.report)]
    encoder = result.encoder

    if "sparse" in methods:
        for n in budgets:
            descriptor = CompressionDescriptor(CompressionMethod.SPARSE, n_keep=n)
            report, _ = evaluate_encoder(config, workspace, encoder, result.index, descriptor)
            rows.append(_row("sparse", n, report))

    if "dimred_star" in methods:
        train_queries = _train_queries(workspace)
        query_vecs = encoder.embed_queries(train_queries)
        q = np.vstack([query_vecs[x.query_id] for x in train_queries])
        for d in budgets:
            distill_config = DistillConfig(dim=d, **_distill_overrides(distill))
            descriptor = distill_dimred(q, result.index.vectors, distill_config).descriptor
            report, _ = evaluate_encoder(config, workspace, encoder, result.index, descriptor)
            rows.append(_row("dimred_star", d, report))

    if "dimred" in methods:
        for d in budgets:
            model = copy_model(result.start)
            descriptor, _ = train_dimred(model, workspace.templates, result.pairs, d, config.finetune)
            projected = TextEncoder(model, workspace.tokenizer, scheme=config.finetune.scheme_pair,
                                    templates=workspace.templates, threads=config.threads)
            report, _ = evaluate_encoder(config, workspace, projected, descriptor=descriptor)
            rows.append(_row("dimred", d, report))

    frame = pd.DataFrame(rows)
    frame["budget"] = frame["budget"].astype("Int64")
    _report_dimred_direction(frame)
    return frame


def _train_queries(workspace: Workspace) -> List[Query]:
    seen = {}
    for p in workspace.task.train_pairs:
        seen.setdefault(p.query_id, Query(p.query_id, p.query))
    return list(seen.values())


def _distill_overrides(distill: Optional[DistillConfig]) -> dict:
    if distill is None:
        return {}
    return {k: v for k, v in dataclasses.asdict(distill).items() if k != "dim"}


def _report_dimred_direction(frame: pd.DataFrame) -> None:
    star = frame[frame.method == "dimred_star"].set_index("budget")[PRIMARY_METRIC]
    joint = frame[frame.method == "dimred"].set_index("budget")[PRIMARY_METRIC]
    for budget in star.index.intersection(joint.index):
        if star[budget] < joint[budget]:
            logger.warning(
                f"DimRed* below DimRed at d'={budget}: {star[budget]:.4f} < {joint[budget]:.4f}"
            )


def monotone_violations(
    frame: pd.DataFrame,
    method: str,
    metric: str = PRIMARY_METRIC,
    tolerance: float = MONOTONE_TOLERANCE,
) -> List[Tuple[int, int]]:
    """Budget pairs (b1 < b2) where the metric at b1 exceeds the one at b2 by more than `tolerance`."""
    rows = frame[frame.method == method].sort_values("budget")
    budgets = [int(b) for b in rows["budget"]]
    values = list(rows[metric])
    violations = []
    for i in range(len(budgets)):
        for j in range(i + 1, len(budgets)):
            if values[i] > values[j] + tolerance:
                violations.append((budgets[i], budgets[j]))
    return violations


def lexical_effect(
    result: PipelineResult,
    workspace: Workspace,
    ns: Sequence[int] = DEFAULT_NS,
) -> LexicalReport:
    """Initial / adapted / fine-tuned lexical similarity on the eval (query, answer) pairs."""
    if not result.adapted:
        raise InvalidExperimentError("lexical_effect needs a run that included adaptation")
    task = workspace.task
    scheme = result.config.finetune.scheme_pair

    def encoder(model):
        return TextEncoder(model, workspace.tokenizer, scheme=scheme, templates=workspace.templates,
                           threads=result.config.threads)

    encoders = {
        "initial": encoder(result.initial),
        "adapted": encoder(result.start),
        "finetuned": result.encoder,
    }
    pairs = eval_pairs(task.eval_queries, task.eval_qrels, task.documents)
    return lexical_similarity_report(encoders, pairs, ns)
