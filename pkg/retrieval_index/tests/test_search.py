"""
Unit tests for exact search and index files.
"""

import os
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from retrieval_index import (
    DenseIndex,
    IndexFormatError,
    IndexMetadata,
    InvalidSearchError,
    load_index,
    save_index,
    search,
    search_many,
)


def _index(vectors, ids=None, **meta):
    vectors = np.asarray(vectors, dtype=np.float32)
    ids = ids or [f"d{i:03d}" for i in range(len(vectors))]
    return DenseIndex(ids, vectors, IndexMetadata(kind="self", dim=vectors.shape[1], **meta))


def _oracle(vectors, ids, query, k):
    scores = [float(np.dot(v.astype(np.float64), query.astype(np.float64))) for v in vectors]
    ranked = sorted(zip(ids, scores), key=lambda p: (-p[1], p[0]))
    return [d for d, _ in ranked[:k]]


class TestSearch(unittest.TestCase):
    """Top-k inner-product search"""

    def test_matches_full_sort_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            vectors = rng.normal(size=(100, 12)).astype(np.float32)
            index = _index(vectors)
            query = rng.normal(size=12).astype(np.float32)
            for k in (1, 10, 100):
                got = search(index, query, k).doc_ids
                self.assertEqual(got, _oracle(vectors, index.doc_ids, query, k))

    def test_ties_break_by_doc_id(self):
        index = _index([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], ids=["b", "a", "c"])
        result = search(index, np.array([1.0, 0.0]), 3)
        self.assertEqual(result.doc_ids, ["a", "b", "c"])

    def test_normalized_self_query_ranks_first(self):
        rng = np.random.default_rng(1)
        vectors = rng.normal(size=(50, 8))
        vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
        index = _index(vectors)
        for i in (0, 17, 49):
            self.assertEqual(search(index, index.vectors[i], 1).doc_ids, [index.doc_ids[i]])

    def test_k_beyond_size_is_flagged(self):
        index = _index(np.eye(3))
        result = search(index, np.ones(3), 10)
        self.assertTrue(result.truncated)
        self.assertEqual(len(result.hits), 3)
        self.assertFalse(search(index, np.ones(3), 3).truncated)

    def test_prefix_property(self):
        rng = np.random.default_rng(2)
        index = _index(rng.normal(size=(30, 6)))
        query = rng.normal(size=6)
        full = search(index, query, 30).hits
        for k in range(1, 30):
            self.assertEqual(search(index, query, k).hits, full[:k])

    def test_insertion_order_invariance(self):
        rng = np.random.default_rng(3)
        vectors = rng.normal(size=(40, 5))
        ids = [f"d{i:03d}" for i in range(40)]
        perm = rng.permutation(40)
        a = _index(vectors, ids)
        b = _index(vectors[perm], [ids[i] for i in perm])
        query = rng.normal(size=5)
        self.assertEqual(search(a, query, 15).hits, search(b, query, 15).hits)

    def test_bad_arguments_raise(self):
        index = _index(np.eye(3))
        with self.assertRaises(InvalidSearchError):
            search(index, np.ones(3), 0)
        with self.assertRaises(InvalidSearchError):
            search(index, np.ones(4), 1)

    def test_search_many_builds_valid_run(self):
        rng = np.random.default_rng(4)
        index = _index(rng.normal(size=(20, 4)))
        queries = {f"q{i}": rng.normal(size=4) for i in range(5)}
        run = search_many(index, queries, k=7)
        self.assertEqual(run.query_ids(), sorted(queries))
        self.assertEqual(run.validate(), [])
        self.assertTrue(all(len(r) == 7 for r in run.rankings.values()))


class TestIndexFiles(unittest.TestCase):
    """Index save/load"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / "docs.ebix"

    def tearDown(self):
        self.tmp.cleanup()

    def test_dense_round_trip(self):
        rng = np.random.default_rng(5)
        index = _index(rng.normal(size=(10, 8)), scheme="n2s", model_checksum="abc")
        save_index(index, self.path)
        loaded = load_index(self.path)
        self.assertEqual(loaded.doc_ids, index.doc_ids)
        np.testing.assert_array_equal(loaded.vectors, index.vectors)
        self.assertEqual(loaded.metadata, index.metadata)

    def test_sparse_round_trip(self):
        rng = np.random.default_rng(6)
        vectors = rng.normal(size=(6, 16)).astype(np.float32)
        for row in vectors:
            row[np.argsort(-np.abs(row), kind="stable")[4:]] = 0.0
        index = _index(vectors, compression={"method": "sparse", "n_keep": 4})
        save_index(index, self.path)
        dense_path = Path(self.tmp.name) / "dense.ebix"
        save_index(_index(vectors), dense_path)
        self.assertLess(self.path.stat().st_size, dense_path.stat().st_size)
        np.testing.assert_array_equal(load_index(self.path).vectors, vectors)

    def test_unicode_ids(self):
        index = _index(np.eye(2), ids=["döc-1", "文書"])
        save_index(index, self.path)
        self.assertEqual(load_index(self.path).doc_ids, ["döc-1", "文書"])

    def test_bad_magic_raises(self):
        self.path.write_bytes(b"XXXX" + b"\x00" * 40)
        with self.assertRaises(IndexFormatError):
            load_index(self.path)

    def test_truncated_file_raises(self):
        save_index(_index(np.eye(4)), self.path)
        raw = self.path.read_bytes()
        self.path.write_bytes(raw[: len(raw) - 30])
        with self.assertRaises(IndexFormatError):
            load_index(self.path)

    def test_invalid_index_is_not_saved(self):
        index = _index(np.eye(2), ids=["a", "a"])
        with self.assertRaises(IndexFormatError):
            save_index(index, self.path)


if __name__ == '__main__':
    unittest.main()
