"""
Unit tests for synthetic task generation and dataset I/O.
"""

import filecmp
import os
import sys
import tempfile
import unittest

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from corpus_toolkit.exceptions import InvalidTaskSpecError, MalformedRecordError
from corpus_toolkit.io import (
    ADAPT_FILE,
    read_adapt_corpus,
    read_documents,
    read_pairs,
    read_queries,
    write_task,
)
from corpus_toolkit.models import Relationship, SynthTaskSpec
from corpus_toolkit.synthetic import gen_synthetic
from corpus_toolkit.text import pair_sentences, split_sentences
from eval_metrics.metrics import mrr_at_k
from eval_metrics.trec_io import read_qrels
from lexical_baseline.bm25 import Bm25Index, bm25_search


def _small_spec(relationship=Relationship.CORRELATION, seed=3):
    return SynthTaskSpec(relationship=relationship, vocab_size=200, n_docs=60, n_queries=40, seed=seed)


class TestGenSynthetic(unittest.TestCase):
    """Synthetic task generator"""

    def test_invalid_spec_raises(self):
        with self.assertRaises(InvalidTaskSpecError):
            gen_synthetic(SynthTaskSpec(n_docs=10, n_queries=20))
        with self.assertRaises(InvalidTaskSpecError):
            gen_synthetic(SynthTaskSpec(n_docs=100, vocab_size=50))

    def test_every_query_has_a_relevant_doc(self):
        task = gen_synthetic(_small_spec())
        doc_ids = {d.doc_id for d in task.documents}
        for q in task.eval_queries:
            rel = task.eval_qrels[q.query_id]
            self.assertEqual(len(rel), 1)
            self.assertTrue(set(rel) <= doc_ids)

    def test_train_and_eval_topics_disjoint(self):
        task = gen_synthetic(_small_spec())
        train = {p.query_id for p in task.train_pairs}
        evaluation = {q.query_id for q in task.eval_queries}
        self.assertFalse(train & evaluation)
        self.assertEqual(len(train) + len(evaluation), 40)

    def test_adapt_corpus_excludes_eval_queries(self):
        task = gen_synthetic(_small_spec())
        eval_texts = {q.text for q in task.eval_queries}
        for rec in task.adapt_corpus:
            self.assertNotIn(rec.text, eval_texts)
            self.assertTrue(rec.text and rec.next)

    def test_correlation_pairs_are_question_then_answer(self):
        task = gen_synthetic(_small_spec())
        pair = task.train_pairs[0]
        self.assertTrue(pair.query.startswith("what is the"))
        self.assertTrue(pair.query.endswith("?"))

    def test_bm25_oracle_is_perfect(self):
        for relationship in Relationship:
            task = gen_synthetic(_small_spec(relationship))
            index = Bm25Index.from_documents([(d.doc_id, d.text.split()) for d in task.documents])
            run = bm25_search(index, {q.query_id: q.text.split() for q in task.eval_queries}, k=10)
            self.assertEqual(mrr_at_k(run, task.eval_qrels, 10).value, 1.0, msg=relationship.value)

    def test_seed_gives_byte_identical_files(self):
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            pa = write_task(gen_synthetic(_small_spec(seed=5)), a)
            pb = write_task(gen_synthetic(_small_spec(seed=5)), b)
            for name in pa:
                self.assertTrue(filecmp.cmp(pa[name], pb[name], shallow=False), msg=name)

    def test_different_seeds_differ(self):
        a = gen_synthetic(_small_spec(seed=1))
        b = gen_synthetic(_small_spec(seed=2))
        self.assertNotEqual([d.text for d in a.documents], [d.text for d in b.documents])


class TestDatasetIO(unittest.TestCase):
    """JSONL and qrels files re-parse to the in-memory originals"""

    def test_round_trip(self):
        task = gen_synthetic(_small_spec(Relationship.LONG_PARAPHRASE))
        with tempfile.TemporaryDirectory() as tmp:
            paths = write_task(task, tmp)
            self.assertEqual(read_documents(paths["documents"]), task.documents)
            self.assertEqual(read_adapt_corpus(paths["adapt"]), task.adapt_corpus)
            self.assertEqual(read_pairs(paths["train_pairs"]), task.train_pairs)
            self.assertEqual(read_queries(paths["eval_queries"]), task.eval_queries)
            self.assertEqual(read_qrels(paths["eval_qrels"]).judgments, task.eval_qrels)
            self.assertEqual(read_qrels(paths["train_qrels"]).judgments, task.train_qrels)

    def test_malformed_line_names_file_and_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, ADAPT_FILE)
            with open(path, "w", encoding="utf-8") as f:
                f.write('{"id": "a", "text": "x", "next": "y"}\n{"id": "b"}\n')
            with self.assertRaises(MalformedRecordError) as ctx:
                read_adapt_corpus(path)
        self.assertIn(":2:", str(ctx.exception))


class TestSentencePairing(unittest.TestCase):
    """Raw-text next-sentence pairing"""

    def test_split_and_pair(self):
        text = "First one. Second one! Third?  Fourth"
        self.assertEqual(split_sentences(text), ["First one.", "Second one!", "Third?", "Fourth"])
        pairs = pair_sentences(text)
        self.assertEqual(len(pairs), 3)
        self.assertEqual((pairs[1].text, pairs[1].next), ("Second one!", "Third?"))

    def test_single_sentence_has_no_pairs(self):
        self.assertEqual(pair_sentences("Only one."), [])


if __name__ == '__main__':
    unittest.main()
