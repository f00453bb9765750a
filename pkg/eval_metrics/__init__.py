"""
EBAdapt Lab - eval_metrics

Ranking metrics (MRR@k, Recall@k, NDCG@k) over ir_measures and TREC run/qrels files.
"""

from .exceptions import EvaluationError, InvalidCutoffError, InvalidRunError, MalformedTrecFileError
from .metrics import DEFAULT_CUTOFFS, evaluate_run, graded_gains, mrr_at_k, ndcg_at_k, parse_metric, recall_at_k
from .models import EvaluationReport, MetricResult, Qrels, RunFile
from .trec_io import read_qrels, read_run, write_qrels, write_run

__all__ = [
    "mrr_at_k",
    "recall_at_k",
    "ndcg_at_k",
    "graded_gains",
    "evaluate_run",
    "parse_metric",
    "DEFAULT_CUTOFFS",
    "Qrels",
    "RunFile",
    "MetricResult",
    "EvaluationReport",
    "read_qrels",
    "write_qrels",
    "read_run",
    "write_run",
    "EvaluationError",
    "InvalidCutoffError",
    "InvalidRunError",
    "MalformedTrecFileError",
]

__version__ = "1.0.0"
