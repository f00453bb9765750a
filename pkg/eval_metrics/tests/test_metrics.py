"""
Unit tests for ranking metrics, checked against direct-definition oracles.
"""

import math
import os
import sys
import unittest

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from eval_metrics.exceptions import InvalidCutoffError
from eval_metrics.metrics import evaluate_run, graded_gains, mrr_at_k, ndcg_at_k, parse_metric, recall_at_k
from eval_metrics.models import Qrels, RunFile


def _random_instance(rng):
    """A run over 1-8 queries plus graded qrels (some queries unjudged)."""
    n_docs = int(rng.integers(3, 30))
    run, qrels = {}, {}
    for q in range(int(rng.integers(1, 9))):
        qid = f"q{q}"
        docs = [f"d{j:03d}" for j in rng.permutation(n_docs)[: int(rng.integers(1, n_docs + 1))]]
        run[qid] = [(d, float(len(docs) - i)) for i, d in enumerate(docs)]
        if rng.random() < 0.85:
            judged = rng.permutation(n_docs)[: int(rng.integers(1, n_docs + 1))]
            qrels[qid] = {f"d{j:03d}": int(rng.integers(0, 4)) for j in judged}
    return run, qrels


def _oracle(run, qrels, k, per_query):
    values = [per_query(run[q], qrels[q], k) for q in sorted(run) if q in qrels]
    total = 0.0
    for v in values:
        total += v
    return total / len(values) if values else 0.0


def _rr(ranking, judged, k):
    for i in range(min(k, len(ranking))):
        if judged.get(ranking[i][0], 0) > 0:
            return 1.0 / (i + 1)
    return 0.0


def _rec(ranking, judged, k):
    rel = [d for d, r in judged.items() if r > 0]
    if not rel:
        return 0.0
    top = [d for d, _ in ranking[:k]]
    return len([d for d in rel if d in top]) / len(rel)


def _ndcg(ranking, judged, k):
    def dcg(gains):
        return sum((2.0 ** g - 1.0) / math.log2(i + 2) for i, g in enumerate(gains))
    ideal = dcg(sorted([r for r in judged.values() if r > 0], reverse=True)[:k])
    if ideal == 0:
        return 0.0
    return dcg([judged.get(d, 0) for d, _ in ranking[:k]]) / ideal


class TestMetricExamples(unittest.TestCase):
    """Hand-computed examples"""

    def test_mrr_first_result_relevant(self):
        run = {"q1": [("a", 3.0), ("b", 2.0)]}
        self.assertEqual(mrr_at_k(run, {"q1": {"a": 1}}, 10).value, 1.0)

    def test_mrr_rank_three(self):
        run = {"q1": [("a", 3.0), ("b", 2.0), ("c", 1.0)]}
        self.assertEqual(mrr_at_k(run, {"q1": {"c": 1}}, 10).value, 1 / 3)

    def test_mrr_beyond_cutoff_is_zero(self):
        run = {"q1": [("a", 3.0), ("b", 2.0), ("c", 1.0)]}
        self.assertEqual(mrr_at_k(run, {"q1": {"c": 1}}, 2).value, 0.0)

    def test_recall_all_and_none(self):
        run = {"q1": [("a", 2.0), ("b", 1.0)]}
        self.assertEqual(recall_at_k(run, {"q1": {"a": 1, "b": 2}}, 10).value, 1.0)
        self.assertEqual(recall_at_k(run, {"q1": {"z": 1}}, 10).value, 0.0)

    def test_ndcg_ideal_ordering(self):
        run = {"q1": [("a", 3.0), ("b", 2.0), ("c", 1.0)]}
        self.assertAlmostEqual(ndcg_at_k(run, {"q1": {"a": 3, "b": 2, "c": 1}}, 10).value, 1.0, places=15)

    def test_ndcg_hand_example(self):
        run = {"q1": [("a", 2.0), ("b", 1.0)]}
        result = ndcg_at_k(run, {"q1": {"a": 0, "b": 3}}, 2)
        self.assertAlmostEqual(result.value, 1 / math.log2(3), delta=1e-12)
        self.assertAlmostEqual(result.value, 0.6309, places=4)

    def test_ndcg_no_relevant_contributes_zero_and_counts(self):
        run = {"q1": [("a", 1.0)], "q2": [("b", 1.0)]}
        result = ndcg_at_k(run, {"q1": {"a": 0}, "q2": {"b": 1}}, 10)
        self.assertEqual(result.n_evaluated, 2)
        self.assertEqual(result.value, 0.5)

    def test_unjudged_queries_excluded_and_reported(self):
        run = {"q1": [("a", 1.0)], "q2": [("b", 1.0)]}
        result = mrr_at_k(run, {"q1": {"a": 1}}, 10)
        self.assertEqual(result.value, 1.0)
        self.assertEqual(result.excluded, ["q2"])

    def test_invalid_cutoff(self):
        with self.assertRaises(InvalidCutoffError):
            mrr_at_k({}, {}, 0)

    def test_equal_scores_keep_stored_order(self):
        # stored order breaks the tie by ascending doc id
        run = {"q1": [("a", 1.0), ("b", 1.0)]}
        qrels = {"q1": {"b": 1}}
        self.assertEqual(mrr_at_k(run, qrels, 10).value, 0.5)
        self.assertEqual(recall_at_k(run, qrels, 1).value, 0.0)

    def test_empty_ranking_scores_zero(self):
        result = mrr_at_k({"q1": [], "q2": [("a", 1.0)]}, {"q1": {"a": 1}, "q2": {"a": 1}}, 10)
        self.assertEqual(result.per_query, {"q1": 0.0, "q2": 1.0})
        self.assertEqual(result.value, 0.5)

    def test_graded_gains(self):
        gains = graded_gains(Qrels({"q1": {"a": 3, "b": 1}, "q2": {"c": 0}}))
        self.assertEqual(gains, {0: 0, 1: 1, 3: 7})


class TestMetricOracles(unittest.TestCase):
    """200 random instances vs direct-definition oracles"""

    def test_random_instances(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            run, qrels = _random_instance(rng)
            k = int(rng.integers(1, 15))
            self.assertEqual(mrr_at_k(run, qrels, k).value, _oracle(run, qrels, k, _rr))
            self.assertEqual(recall_at_k(run, qrels, k).value, _oracle(run, qrels, k, _rec))
            self.assertAlmostEqual(ndcg_at_k(run, qrels, k).value, _oracle(run, qrels, k, _ndcg), delta=1e-12)


class TestMetricProperties(unittest.TestCase):
    """Range, monotonicity and invariance properties"""

    def test_bounds_and_monotone_in_k(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            run, qrels = _random_instance(rng)
            prev_mrr = prev_rec = 0.0
            for k in range(1, 12):
                m = mrr_at_k(run, qrels, k).value
                r = recall_at_k(run, qrels, k).value
                n = ndcg_at_k(run, qrels, k).value
                for v in (m, r, n):
                    self.assertGreaterEqual(v, 0.0)
                    self.assertLessEqual(v, 1.0 + 1e-12)
                self.assertGreaterEqual(m, prev_mrr)
                self.assertGreaterEqual(r, prev_rec)
                prev_mrr, prev_rec = m, r

    def test_score_rescaling_invariance(self):
        rng = np.random.default_rng(8)
        run, qrels = _random_instance(rng)
        scaled = {q: [(d, 3.0 * s + 1.0) for d, s in r] for q, r in run.items()}
        for fn in (mrr_at_k, recall_at_k, ndcg_at_k):
            self.assertEqual(fn(run, qrels, 5).value, fn(scaled, qrels, 5).value)

    def test_swapping_relevant_doc_upward(self):
        run = {"q1": [("a", 3.0), ("b", 2.0), ("c", 1.0)]}
        better = {"q1": [("c", 3.0), ("a", 2.0), ("b", 1.0)]}
        qrels = {"q1": {"c": 2, "a": 1}}
        for fn in (mrr_at_k, recall_at_k, ndcg_at_k):
            self.assertGreaterEqual(fn(better, qrels, 2).value, fn(run, qrels, 2).value)


class TestEvaluateRun(unittest.TestCase):
    """Full evaluation report"""

    def test_report_labels(self):
        run = RunFile({"q1": [("a", 2.0), ("b", 1.0)]})
        report = evaluate_run(run, {"q1": {"b": 1}})
        self.assertEqual(report["mrr@10"], 0.5)
        self.assertEqual(report["recall@100"], 1.0)
        self.assertIn("mrr@10=0.500000", report.to_text())
        self.assertEqual(report.to_dict()["n_evaluated"], 1)

    def test_parse_metric(self):
        self.assertEqual(parse_metric("NDCG@10"), ("ndcg", 10))
        with self.assertRaises(ValueError):
            parse_metric("map@10")


if __name__ == '__main__':
    unittest.main()
