"""
Unit tests for the ebadapt command line.
"""

import contextlib
import io
import json
import os
import sys
import tempfile
import unittest
from pathlib import Path

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from cli import RunManifest, UsageError, build_parser, file_checksum, main, resolve
from cli.config import EXIT_DATA, EXIT_OK, EXIT_USAGE
from cli.main import __doc__ as CLI_USAGE
from corpus_toolkit import Tokenizer
from eval_metrics import write_qrels, write_run
from transformer_model import ModelConfig, init_params, load_checkpoint, read_header, save_checkpoint

MICRO_MODEL = {"n_layers": 1, "n_heads": 2, "d_model": 16, "d_ff": 32, "max_seq_len": 64}
SMALL_TASK = ["--n-docs", "20", "--n-queries", "20", "--vocab-size", "120"]


def run_cli(*argv):
    """Exit code and captured stdout."""
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main([str(a) for a in argv])
    return code, out.getvalue()


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.config = self.tmp / "config.json"
        self.config.write_text(json.dumps({"seed": 3, "model": MICRO_MODEL}))

    def tearDown(self):
        self._tmp.cleanup()

    def make_task(self):
        task = self.tmp / "task"
        code, _ = run_cli("gen-corpus", *SMALL_TASK, "--seed", 5, "--out", task)
        self.assertEqual(code, EXIT_OK)
        tok_dir = self.tmp / "tok"
        code, _ = run_cli("build-tokenizer", "--task", task, "--out", tok_dir)
        self.assertEqual(code, EXIT_OK)
        return task, tok_dir / "tokenizer.json"

    def micro_checkpoint(self, tokenizer_path, metadata):
        tok = Tokenizer.load(tokenizer_path)
        cfg = ModelConfig(vocab_size=tok.vocab_size, pad_id=tok.pad_id, bos_id=tok.bos_id, eos_id=tok.eos_id, **MICRO_MODEL)
        path = self.tmp / "micro.ckpt"
        save_checkpoint(path, init_params(cfg, seed=3), metadata=metadata)
        return path


class TestArguments(CliTestCase):
    """Usage errors and configuration layering"""

    def test_missing_subcommand(self):
        code, _ = run_cli()
        self.assertEqual(code, EXIT_USAGE)

    def test_unknown_flag(self):
        code, _ = run_cli("gen-corpus", "--bogus", "1")
        self.assertEqual(code, EXIT_USAGE)

    def test_missing_required_option(self):
        code, _ = run_cli("gen-corpus", *SMALL_TASK)
        self.assertEqual(code, EXIT_USAGE)
        code, _ = run_cli("compress", "--out", self.tmp / "c")
        self.assertEqual(code, EXIT_USAGE)

    def test_parser_raises_usage_error(self):
        with self.assertRaises(UsageError):
            build_parser().parse_args(["finetune", "--scheme", "x2y"])

    def test_flags_override_file_override_defaults(self):
        merged = resolve(
            "adapt",
            {"steps": 10, "batch_size": 4, "seed": 0},
            {"adapt": {"steps": 20, "batch_size": 8}},
            {"steps": 30, "batch_size": None},
        )
        self.assertEqual(merged, {"steps": 30, "batch_size": 8, "seed": 0})

    def test_non_object_section_rejected(self):
        with self.assertRaises(ValueError):
            resolve("adapt", {}, {"adapt": [1, 2]}, {})


class TestCorpusCommands(CliTestCase):
    """gen-corpus and build-tokenizer"""

    def test_gen_corpus_is_deterministic(self):
        for name in ("a", "b"):
            code, _ = run_cli("gen-corpus", *SMALL_TASK, "--seed", 7, "--out", self.tmp / name)
            self.assertEqual(code, EXIT_OK)
        self.assertEqual(
            (self.tmp / "a" / "documents.jsonl").read_bytes(),
            (self.tmp / "b" / "documents.jsonl").read_bytes(),
        )
        manifest = RunManifest.read(self.tmp / "a")
        self.assertEqual(manifest.subcommand, "gen-corpus")
        self.assertEqual(manifest.seed, 7)
        self.assertEqual(manifest.config["n_docs"], 20)

    def test_unknown_relationship_flag_is_usage_error(self):
        code, _ = run_cli("gen-corpus", *SMALL_TASK, "--relationship", "telepathy", "--out", self.tmp / "t")
        self.assertEqual(code, EXIT_USAGE)

    def test_unknown_relationship_in_config_is_data_error(self):
        self.config.write_text(json.dumps({"corpus": {"relationship": "telepathy"}}))
        code, _ = run_cli("gen-corpus", *SMALL_TASK, "--config", self.config, "--out", self.tmp / "t")
        self.assertEqual(code, EXIT_DATA)

    def test_module_docstring_example(self):
        example = CLI_USAGE.split("ebadapt ", 1)[1].splitlines()[0].split()
        self.assertEqual(example[:3], ["gen-corpus", "--relationship", "correlation"])
        code, out = run_cli(*[str(self.tmp / a) if a.endswith("/") else a for a in example])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(out)["relationship"], "correlation")
        self.assertTrue((self.tmp / "task" / "documents.jsonl").is_file())

    def test_tokenizer_manifest_records_task_checksum(self):
        task, tok = self.make_task()
        manifest = RunManifest.read(tok.parent)
        self.assertEqual(manifest.inputs["task"], file_checksum(task))
        self.assertGreater(Tokenizer.load(tok).vocab_size, 20)


class TestTrainingCommands(CliTestCase):
    """adapt and scheme bookkeeping"""

    def test_adapt_zero_steps_keeps_checksum(self):
        task, tok = self.make_task()
        out = self.tmp / "adapted"
        code, stdout = run_cli(
            "adapt", "--config", self.config, "--task", task, "--tokenizer", tok, "--steps", 0, "--out", out
        )
        self.assertEqual(code, EXIT_OK)
        summary = json.loads(stdout)
        self.assertEqual(summary["steps"], 0)
        self.assertEqual(summary["checksum_before"], summary["checksum_after"])
        self.assertEqual(read_header(out / "adapted.ckpt")["base_checksum"], summary["checksum_before"])
        self.assertEqual(load_checkpoint(out / "adapted.ckpt").metadata["stage"], "adapted")
        self.assertEqual(RunManifest.read(out).config["adapt"]["steps"], 0)

    def test_scheme_mismatch_is_data_error(self):
        task, tok = self.make_task()
        ckpt = self.micro_checkpoint(tok, {"stage": "finetuned", "scheme": "s2s"})
        code, _ = run_cli(
            "embed", "--task", task, "--tokenizer", tok, "--checkpoint", ckpt, "--scheme", "n2s", "--out", self.tmp / "e"
        )
        self.assertEqual(code, EXIT_DATA)

    def test_dimred_needs_projection_in_checkpoint(self):
        task, tok = self.make_task()
        ckpt = self.micro_checkpoint(tok, {"stage": "finetuned", "scheme": "n2s"})
        code, _ = run_cli("embed", "--task", task, "--tokenizer", tok, "--checkpoint", ckpt, "--out", self.tmp / "e")
        self.assertEqual(code, EXIT_OK)
        code, _ = run_cli(
            "compress", "--index", self.tmp / "e" / "index.bin", "--method", "dimred",
            "--checkpoint", ckpt, "--out", self.tmp / "c",
        )
        self.assertEqual(code, EXIT_DATA)


class TestEvalCommand(CliTestCase):
    """eval output format"""

    def setUp(self):
        super().setUp()
        self.run_path = self.tmp / "run.trec"
        self.qrels_path = self.tmp / "qrels.tsv"
        write_run({"q0": [("d0", 2.0), ("d1", 1.0)], "q1": [("d0", 2.0), ("d1", 1.0)]}, self.run_path, tag="t")
        write_qrels({"q0": {"d0": 1}, "q1": {"d1": 1}}, self.qrels_path)

    def test_prints_metric_lines(self):
        code, stdout = run_cli("eval", "--run", self.run_path, "--qrels", self.qrels_path, "--k", 10)
        self.assertEqual(code, EXIT_OK)
        lines = stdout.strip().splitlines()
        self.assertEqual(lines[0], "mrr@10=0.750000")
        self.assertIn("recall@10=1.000000", lines)

    def test_writes_metrics_json(self):
        out = self.tmp / "metrics"
        code, _ = run_cli("eval", "--run", self.run_path, "--qrels", self.qrels_path, "--k", 10, "--out", out)
        self.assertEqual(code, EXIT_OK)
        metrics = json.loads((out / "metrics.json").read_text())["metrics"]
        self.assertAlmostEqual(metrics["mrr@10"], 0.75)
        self.assertEqual(RunManifest.read(out).subcommand, "eval")

    def test_malformed_run_is_data_error(self):
        self.run_path.write_text("q0 Q0 d0\n")
        code, _ = run_cli("eval", "--run", self.run_path, "--qrels", self.qrels_path)
        self.assertEqual(code, EXIT_DATA)

    def test_missing_file_is_data_error(self):
        code, _ = run_cli("eval", "--run", self.tmp / "nope.trec", "--qrels", self.qrels_path)
        self.assertEqual(code, EXIT_DATA)


class TestRetrievalPipeline(CliTestCase):
    """embed → search → eval → compress → report with a fresh micro model"""

    def test_pipeline_and_report(self):
        task, tok = self.make_task()
        common = ("--config", self.config, "--task", task, "--tokenizer", tok)

        self.assertEqual(run_cli("embed", *common, "--out", self.tmp / "dense")[0], EXIT_OK)
        index = self.tmp / "dense" / "index.bin"
        self.assertEqual(run_cli("search", *common, "--index", index, "--top-k", 5, "--out", self.tmp / "run")[0], EXIT_OK)
        code, _ = run_cli(
            "eval", "--run", self.tmp / "run" / "run.trec", "--qrels", task / "eval_qrels.tsv",
            "--k", 10, "--out", self.tmp / "eval_full",
        )
        self.assertEqual(code, EXIT_OK)

        code, _ = run_cli("compress", "--index", index, "--method", "sparse", "--sparse-n", 4, "--out", self.tmp / "sparse")
        self.assertEqual(code, EXIT_OK)
        code, _ = run_cli(
            "search", *common, "--index", self.tmp / "sparse" / "index.bin", "--top-k", 5, "--out", self.tmp / "run_sparse"
        )
        self.assertEqual(code, EXIT_OK)
        code, _ = run_cli(
            "eval", "--run", self.tmp / "run_sparse" / "run.trec", "--qrels", task / "eval_qrels.tsv",
            "--k", 10, "--out", self.tmp / "eval_sparse",
        )
        self.assertEqual(code, EXIT_OK)

        code, stdout = run_cli("report", "--inputs", self.tmp / "eval_full", self.tmp / "eval_sparse", "--out", self.tmp / "report")
        self.assertEqual(code, EXIT_OK)
        csv = (self.tmp / "report" / "report.csv").read_text().splitlines()
        self.assertTrue(csv[0].startswith("label,method,budget,mrr@10"))
        self.assertTrue(csv[1].startswith("eval_full,none"))
        self.assertTrue(csv[2].startswith("eval_sparse,sparse,4"))
        self.assertIn("eval_sparse", stdout)

    def test_search_with_other_seed_refuses_index(self):
        task, tok = self.make_task()
        common = ("--task", task, "--tokenizer", tok)
        self.assertEqual(run_cli("embed", "--config", self.config, *common, "--out", self.tmp / "dense")[0], EXIT_OK)
        code, _ = run_cli(
            "search", "--config", self.config, *common, "--seed", 99,
            "--index", self.tmp / "dense" / "index.bin", "--out", self.tmp / "run",
        )
        self.assertEqual(code, EXIT_DATA)

    def test_report_without_inputs_is_data_error(self):
        empty = self.tmp / "empty"
        empty.mkdir()
        code, _ = run_cli("report", "--inputs", empty, "--out", self.tmp / "report")
        self.assertEqual(code, EXIT_DATA)


if __name__ == '__main__':
    unittest.main()
