"""
eval_metrics/metrics.py
EBAdapt Lab - Ranking Metrics

Standard truncated ranking metrics over a run and graded judgments, computed
with ir_measures:
  - MRR@k    : RR@k, reciprocal rank of the first relevant document
  - Recall@k : R@k, fraction of relevant documents retrieved in the top k
  - NDCG@k   : nDCG@k with gains 2^rel − 1 and log2(rank + 1) discount

Runs are handed over with scores -rank, so the evaluator sees exactly the
stored ordering (trec_eval would otherwise re-break score ties by doc id
descending).

Only queries present in both the run and the judgments are averaged; run
queries without judgments are excluded and reported. A judged query the
evaluator yields nothing for scores 0. Per-query values are summed in
ascending query-id order.
"""

import logging
import math
from typing import Callable, Dict, List, Sequence, Tuple

import ir_measures

from .exceptions import InvalidCutoffError
from .models import EvaluationReport, MetricResult, Qrels, RunFile

logger = logging.getLogger(__name__)

DEFAULT_CUTOFFS: Tuple[Tuple[str, int], ...] = (
    ("mrr", 10),
    ("mrr", 100),
    ("recall", 100),
    ("recall", 1000),
    ("ndcg", 10),
)


def _check_k(k: int) -> None:
    if k < 1:
        raise InvalidCutoffError(f"cutoff k must be ≥ 1, got {k}")


def _rank_scored(run: RunFile, query_ids: Sequence[str], k: int) -> Dict[str, Dict[str, float]]:
    return {
        qid: {doc_id: float(-rank) for rank, (doc_id, _) in enumerate(run.rankings[qid][:k], start=1)}
        for qid in query_ids
        if run.rankings[qid]
    }


def _average(name: str, k: int, run, qrels, measure_fn: Callable[[Qrels, int], object]) -> MetricResult:
    _check_k(k)
    run = RunFile.coerce(run)
    qrels = Qrels.coerce(qrels)
    judged: List[str] = []
    excluded: List[str] = []
    for qid in run.query_ids():
        (judged if qid in qrels else excluded).append(qid)
    if excluded:
        logger.warning(f"{name}@{k}: {len(excluded)} run queries have no judgments and were excluded")

    per_query: Dict[str, float] = {qid: 0.0 for qid in judged}
    scored = _rank_scored(run, judged, k)
    if scored:
        measure = measure_fn(qrels, k)
        judgments = {qid: qrels[qid] for qid in judged}
        for row in ir_measures.iter_calc([measure], judgments, scored):
            value = float(row.value)
            per_query[row.query_id] = value if math.isfinite(value) else 0.0

    total = 0.0
    for qid in sorted(per_query):
        total += per_query[qid]
    value = total / len(per_query) if per_query else 0.0
    return MetricResult(name, k, value, len(per_query), excluded, per_query)


# ---------------------------------------------------------------------------
# 1. MRR@k - Mean Reciprocal Rank
# ---------------------------------------------------------------------------
def _rr_measure(qrels: Qrels, k: int):
    return ir_measures.RR @ k


def mrr_at_k(run, qrels, k: int = 10) -> MetricResult:
    """
    Mean over queries of 1/rank of the first relevant doc within the top k
    (0 when none is retrieved).
    """
    return _average("mrr", k, run, qrels, _rr_measure)


# ---------------------------------------------------------------------------
# 2. Recall@k
# ---------------------------------------------------------------------------
def _recall_measure(qrels: Qrels, k: int):
    return ir_measures.R @ k


def recall_at_k(run, qrels, k: int = 100) -> MetricResult:
    """Mean fraction of relevant docs retrieved in the top k."""
    return _average("recall", k, run, qrels, _recall_measure)


# ---------------------------------------------------------------------------
# 3. NDCG@k - Normalized Discounted Cumulative Gain
# ---------------------------------------------------------------------------
def graded_gains(qrels: Qrels) -> Dict[int, int]:
    """Relevance level → 2^rel − 1 for every level present in the judgments."""
    levels = {0}
    for docs in qrels.judgments.values():
        levels.update(docs.values())
    return {rel: 2 ** rel - 1 for rel in sorted(levels)}


def _ndcg_measure(qrels: Qrels, k: int):
    return ir_measures.nDCG(gains=graded_gains(qrels)) @ k


def ndcg_at_k(run, qrels, k: int = 10) -> MetricResult:
    """
    Mean NDCG@k. Queries whose judgments hold no relevant doc contribute 0
    and are counted.
    """
    return _average("ndcg", k, run, qrels, _ndcg_measure)


# ---------------------------------------------------------------------------
# 4. Full evaluation
# ---------------------------------------------------------------------------
_METRICS = {"mrr": mrr_at_k, "recall": recall_at_k, "ndcg": ndcg_at_k}


def parse_metric(label: str) -> Tuple[str, int]:
    """'mrr@10' → ('mrr', 10)."""
    name, sep, k = label.strip().lower().partition("@")
    if not sep or name not in _METRICS:
        raise ValueError(f"unknown metric '{label}' (expected mrr@k, recall@k or ndcg@k)")
    try:
        return name, int(k)
    except ValueError:
        raise ValueError(f"metric cutoff in '{label}' is not an integer") from None


def evaluate_run(
    run,
    qrels,
    metrics: Sequence[Tuple[str, int]] = DEFAULT_CUTOFFS,
) -> EvaluationReport:
    """
    Compute every (metric, k) pair for a run.

    Returns:
        EvaluationReport with results in the requested order
    """
    run = RunFile.coerce(run)
    qrels = Qrels.coerce(qrels)
    results = [_METRICS[name](run, qrels, k) for name, k in metrics]
    excluded = results[0].excluded if results else []
    logger.info(
        f"Evaluated {len(run)} run queries "
        f"({len(run) - len(excluded)} judged): "
        + ", ".join(str(r) for r in results)
    )
    return EvaluationReport(results=results, n_queries_in_run=len(run), excluded=list(excluded))
