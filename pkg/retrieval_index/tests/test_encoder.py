"""
Unit tests for the text encoder.
"""

import os
import sys
import unittest

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from corpus_toolkit import Document, Query, build_tokenizer
from prompt_builder import PROMPT_WORDS, PromptKind, SchemePair
from retrieval_index import (
    DuplicateDocumentIdError,
    EmptyCorpusError,
    SchemeMismatchError,
    TextEncoder,
    mean_pool_encoder,
)
from transformer_model import ModelConfig, TransformerModel

TEXTS = [
    "the colour of sa ko is lu ne .",
    "sa ko has bi ru .",
    "the size of ko ma is te pa .",
    "ko ma has vi do .",
    "what is the size of ko ma ?",
    "ma ne has ri so .",
    "the weight of ne sa is fo gu .",
    "ne sa has po ki .",
    "lu lu lu",
    "te",
]


def _setup(scheme=SchemePair.N2S, threads=1, seed=0):
    tok = build_tokenizer(TEXTS, max_vocab=200, reserved_words=PROMPT_WORDS)
    cfg = ModelConfig(n_layers=1, n_heads=2, d_model=16, d_ff=32, vocab_size=tok.vocab_size, max_seq_len=64)
    model = TransformerModel.initialize(cfg, seed=seed)
    return TextEncoder(model, tok, scheme=scheme, threads=threads), tok, model


def _docs():
    return [Document(f"d{i:02d}", t) for i, t in enumerate(TEXTS)]


class TestTextEncoder(unittest.TestCase):
    """Corpus and query embedding"""

    def test_single_document_index(self):
        encoder, _, _ = _setup()
        index = encoder.embed_corpus(_docs()[:1])
        self.assertEqual(len(index), 1)
        self.assertEqual(index.dim, 16)
        self.assertEqual(index.validate(), [])

    def test_re_embedding_is_identical(self):
        encoder, _, _ = _setup()
        a = encoder.embed_corpus(_docs())
        b = encoder.embed_corpus(_docs())
        np.testing.assert_array_equal(a.vectors, b.vectors)

    def test_batch_size_does_not_change_vectors(self):
        encoder, _, _ = _setup()
        a = encoder.embed_corpus(_docs(), batch_size=1)
        b = encoder.embed_corpus(_docs(), batch_size=8)
        np.testing.assert_array_equal(a.vectors, b.vectors)

    def test_threads_do_not_change_vectors(self):
        single, _, _ = _setup(threads=1)
        pooled, _, _ = _setup(threads=3)
        np.testing.assert_array_equal(
            single.embed_corpus(_docs()).vectors,
            pooled.embed_corpus(_docs(), batch_size=4).vectors,
        )

    def test_scheme_kinds_are_used(self):
        encoder, tok, model = _setup(SchemePair.N2S)
        index = encoder.embed_corpus(_docs()[:2])
        self.assertEqual(index.metadata.kind, "self")
        self.assertEqual(index.metadata.scheme, "n2s")
        queries = encoder.embed_queries([Query("q1", TEXTS[4])])
        direct = encoder.embed_ids(tok.encode(TEXTS[4]), PromptKind.NEXT)
        np.testing.assert_array_equal(queries["q1"], direct)

    def test_mismatched_kind_raises(self):
        encoder, _, _ = _setup(SchemePair.N2S)
        with self.assertRaises(SchemeMismatchError):
            encoder.embed_corpus(_docs(), kind=PromptKind.NEXT)
        with self.assertRaises(SchemeMismatchError):
            encoder.embed_queries([Query("q", "te")], kind=PromptKind.SELF)

    def test_index_from_other_scheme_is_refused(self):
        n2s, tok, model = _setup(SchemePair.N2S)
        index = n2s.embed_corpus(_docs())
        s2s = TextEncoder(model, tok, scheme=SchemePair.S2S)
        with self.assertRaises(SchemeMismatchError):
            s2s.check_index(index)
        n2s.check_index(index)

    def test_duplicate_and_empty_corpus_raise(self):
        encoder, _, _ = _setup()
        with self.assertRaises(DuplicateDocumentIdError):
            encoder.embed_corpus([Document("a", "te"), Document("a", "lu")])
        with self.assertRaises(EmptyCorpusError):
            encoder.embed_corpus([])

    def test_mean_pool_baseline(self):
        _, tok, model = _setup()
        encoder = mean_pool_encoder(model, tok)
        index = encoder.embed_corpus(_docs()[:3])
        self.assertEqual(index.metadata.pooling, "mean")
        self.assertEqual(index.metadata.kind, "plain")
        # one-token text: the mean over the input is that row
        vec = encoder.embed_ids(tok.encode("te"), PromptKind.PLAIN)
        self.assertEqual(vec.shape, (16,))


if __name__ == '__main__':
    unittest.main()
