"""
Unit tests for dashboard data loading and charts.
"""

import json
import os
import sys
import tempfile
import unittest
from pathlib import Path

import pandas as pd

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from frontend.charts import compression_chart, lexical_chart, loss_curve_chart, metrics_chart
from frontend.run_data import list_run_dirs, load_run_artifacts
from lexical_baseline import LexicalReport


def _mark(spec):
    mark = spec["mark"]
    return mark["type"] if isinstance(mark, dict) else mark


class TestCharts(unittest.TestCase):
    """Chart construction"""

    def test_loss_curve_melts_columns(self):
        frame = pd.DataFrame({"step": [1, 2, 3], "ebae_loss": [3.0, 2.5, 2.0], "ebar_loss": [3.1, 2.9, 2.7]})
        spec = loss_curve_chart(frame).to_dict()
        self.assertEqual(_mark(spec), "line")
        self.assertEqual(spec["encoding"]["x"]["field"], "step")
        self.assertEqual(spec["encoding"]["color"]["field"], "loss")

    def test_metrics_chart_groups_by_run(self):
        frame = pd.DataFrame({"run": ["a", "b"], "metric": ["mrr@10", "mrr@10"], "value": [0.5, 0.7]})
        spec = metrics_chart(frame).to_dict()
        self.assertEqual(_mark(spec), "bar")
        self.assertEqual(spec["encoding"]["xOffset"]["field"], "run")

    def test_lexical_chart_uses_log_n(self):
        report = LexicalReport(ns=[10, 100], columns={"initial": [1.0, 2.0], "adapted": [1.5, 2.5]})
        spec = lexical_chart(report).to_dict()
        self.assertEqual(spec["encoding"]["x"]["scale"]["type"], "log")
        self.assertEqual(spec["encoding"]["color"]["sort"], ["initial", "adapted"])

    def test_compression_chart_layers_baseline(self):
        frame = pd.DataFrame({
            "method": ["none", "sparse", "sparse", "dimred_star"],
            "budget": [None, 4, 8, 4],
            "mrr@10": [0.6, 0.4, 0.55, 0.5],
        })
        spec = compression_chart(frame).to_dict()
        self.assertEqual(len(spec["layer"]), 2)
        without_baseline = compression_chart(frame[frame.method != "none"]).to_dict()
        self.assertNotIn("layer", without_baseline)


class TestRunData(unittest.TestCase):
    """Run directory scanning"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name) / "run1"
        (self.root / "adapted").mkdir(parents=True)
        (self.root / "eval").mkdir()
        pd.DataFrame({"step": [1, 2], "ebae_loss": [2.0, 1.0], "ebar_loss": [2.0, 1.5]}).to_csv(
            self.root / "adapted" / "adapt_loss.csv", index=False
        )
        (self.root / "eval" / "metrics.json").write_text(json.dumps({"metrics": {"mrr@10": 0.5, "ndcg@10": 0.6}}))
        (self.root / "eval" / "manifest.json").write_text(json.dumps({"subcommand": "eval"}))

    def tearDown(self):
        self._tmp.cleanup()

    def test_loads_available_artifacts(self):
        artifacts = load_run_artifacts(self.root)
        self.assertFalse(artifacts.empty)
        self.assertEqual(list(artifacts.adapt_loss.columns), ["step", "ebae_loss", "ebar_loss"])
        self.assertIsNone(artifacts.finetune_loss)
        self.assertEqual(artifacts.metrics, {"eval": {"mrr@10": 0.5, "ndcg@10": 0.6}})
        self.assertEqual(artifacts.manifests["eval"]["subcommand"], "eval")
        self.assertEqual(len(artifacts.metrics_frame()), 2)

    def test_broken_metrics_file_is_skipped(self):
        (self.root / "eval" / "metrics.json").write_text("{not json")
        self.assertEqual(load_run_artifacts(self.root).metrics, {})

    def test_missing_directory(self):
        with self.assertRaises(FileNotFoundError):
            load_run_artifacts(self.root / "nope")

    def test_list_run_dirs(self):
        (self.root.parent / "scratch").mkdir()
        self.assertEqual([p.name for p in list_run_dirs(self.root.parent)], ["run1"])


if __name__ == '__main__':
    unittest.main()
