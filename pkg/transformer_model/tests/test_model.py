"""
Unit tests for the transformer forward pass and embedding extraction.
"""

import os
import sys
import unittest

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from numerics import ops
from numerics.gradcheck import check_gradient
from numerics.tensor import Tensor, no_grad, precision
from prompt_builder import PromptKind, PromptTemplates, build_joint, build_mask, build_single, causal_mask
from transformer_model import (
    AnchorOutOfRangeError,
    InvalidModelConfigError,
    ModelConfig,
    SequenceTooLongError,
    TransformerModel,
    init_params,
    param_shapes,
)

MICRO = ModelConfig(n_layers=2, n_heads=2, d_model=16, d_ff=32, vocab_size=64, max_seq_len=64)
TEMPLATES = PromptTemplates(sep_id=4, eos_id=2, self_ids=(10, 11, 12, 13), next_ids=(20, 21, 22, 23))


def _model(seed=0, config=MICRO):
    return TransformerModel.initialize(config, seed=seed)


def _random_text(rng, low=1, high=20):
    return [int(t) for t in rng.integers(5, MICRO.vocab_size, size=int(rng.integers(low, high)))]


class TestModelConfig(unittest.TestCase):
    """Configuration validation"""

    def test_defaults_are_valid(self):
        self.assertEqual(ModelConfig().validate(), [])
        self.assertEqual(MICRO.validate(), [])

    def test_heads_must_divide_width(self):
        issues = ModelConfig(d_model=18, n_heads=4).validate()
        self.assertTrue(any("divisible" in i for i in issues))

    def test_special_ids_distinct_and_in_range(self):
        self.assertTrue(ModelConfig(pad_id=2, eos_id=2).validate())
        self.assertTrue(ModelConfig(vocab_size=2).validate())

    def test_invalid_config_raises_on_init(self):
        with self.assertRaises(InvalidModelConfigError):
            init_params(ModelConfig(d_model=18, n_heads=4))

    def test_tied_head_has_no_head_tensor(self):
        tied = ModelConfig(n_layers=1, n_heads=2, d_model=16, d_ff=32, vocab_size=64, tie_head=True)
        names = [n for n, _ in param_shapes(tied)]
        self.assertNotIn("head", names)
        model = _model(config=tied)
        np.testing.assert_array_equal(model.head_weight().data, model.params["tok_embeddings"].data.T)


class TestForward(unittest.TestCase):
    """Hidden states, masks and determinism"""

    def test_single_token_input(self):
        model = _model()
        with no_grad():
            hidden = model.forward([MICRO.bos_id], causal_mask(1), [0])
        self.assertEqual(hidden.shape, (1, 16))
        self.assertTrue(np.all(np.isfinite(hidden.data)))

    def test_overlength_raises(self):
        model = _model()
        L = MICRO.max_seq_len + 1
        with self.assertRaises(SequenceTooLongError):
            model.forward([5] * L, causal_mask(L), list(range(L)))

    def test_mismatched_positions_raise(self):
        model = _model()
        with self.assertRaises(ValueError):
            model.forward([5, 6], causal_mask(2), [0])

    def test_same_seed_is_bit_identical(self):
        rng = np.random.default_rng(3)
        seq = build_single(_random_text(rng), PromptKind.SELF, TEMPLATES, MICRO.max_seq_len)
        with no_grad():
            a = _model(seed=7).encode(seq).data
            b = _model(seed=7).encode(seq).data
        np.testing.assert_array_equal(a, b)

    def test_invisible_tokens_do_not_leak(self):
        model = _model()
        rng = np.random.default_rng(4)
        for _ in range(10):
            text = _random_text(rng, 2, 12)
            jp = build_joint(text, TEMPLATES, MICRO.max_seq_len)
            mask = build_mask(jp)
            perturbed = list(jp.token_ids)
            # rewrite the SELF block's prompt words, invisible to the NEXT block
            for j in range(jp.n_input + 1, jp.alpha_anchor):
                perturbed[j] = int(rng.integers(5, MICRO.vocab_size))
            with no_grad():
                a = model.forward(jp.token_ids, mask, jp.positions).data
                b = model.forward(perturbed, mask, jp.positions).data
            np.testing.assert_array_equal(a[: jp.n_input], b[: jp.n_input])
            np.testing.assert_array_equal(a[jp.alpha_anchor + 1:], b[jp.alpha_anchor + 1:])

    def test_mask_change_at_invisible_pairs_keeps_other_rows(self):
        model = _model()
        jp = build_joint([30, 31, 32, 33], TEMPLATES, MICRO.max_seq_len)
        mask = build_mask(jp)
        opened = mask.copy()
        # the last row may now see the SELF block; no other row sees the last row
        opened[jp.beta_anchor] = causal_mask(len(jp))[jp.beta_anchor]
        with no_grad():
            a = model.forward(jp.token_ids, mask, jp.positions).data
            b = model.forward(jp.token_ids, opened, jp.positions).data
        np.testing.assert_array_equal(a[: jp.beta_anchor], b[: jp.beta_anchor])
        self.assertFalse(np.array_equal(a[jp.beta_anchor], b[jp.beta_anchor]))

    def test_one_pass_matches_two_passes_bitwise(self):
        model = _model(seed=11)
        rng = np.random.default_rng(0)
        for _ in range(100):
            text = _random_text(rng)
            with no_grad():
                alpha, beta, _ = model.embed_joint(build_joint(text, TEMPLATES, MICRO.max_seq_len))
                self_emb = model.embed(build_single(text, PromptKind.SELF, TEMPLATES, MICRO.max_seq_len))
                next_emb = model.embed(build_single(text, PromptKind.NEXT, TEMPLATES, MICRO.max_seq_len))
            np.testing.assert_array_equal(alpha.vector.data, self_emb.vector.data)
            np.testing.assert_array_equal(beta.vector.data, next_emb.vector.data)

    def test_logit_rows_are_distributions(self):
        model = _model()
        seq = build_single([30, 31, 32], PromptKind.NEXT, TEMPLATES, MICRO.max_seq_len)
        with no_grad():
            logits = model.logits(model.encode(seq)).data.astype(np.float64)
        self.assertEqual(logits.shape, (len(seq), MICRO.vocab_size))
        probs = np.exp(logits - logits.max(axis=1, keepdims=True))
        probs /= probs.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-6)

    def test_gelu_variant_runs(self):
        cfg = ModelConfig(n_layers=1, n_heads=2, d_model=16, d_ff=32, vocab_size=64, mlp_activation="gelu")
        with no_grad():
            hidden = _model(config=cfg).forward([5, 6, 7], causal_mask(3), [0, 1, 2])
        self.assertEqual(hidden.shape, (3, 16))


class TestEmbeddings(unittest.TestCase):
    """Anchor extraction and mean pooling"""

    def setUp(self):
        self.model = _model()
        seq = build_single([30, 31, 32, 33], PromptKind.SELF, TEMPLATES, MICRO.max_seq_len)
        with no_grad():
            self.hidden = self.model.encode(seq)
        self.seq = seq

    def test_extract_returns_anchor_row(self):
        emb = self.model.extract_embedding(self.hidden, self.seq.anchor, PromptKind.SELF)
        self.assertEqual(emb.kind, PromptKind.SELF)
        self.assertEqual(emb.dim, 16)
        np.testing.assert_array_equal(emb.numpy(), self.hidden.data[self.seq.anchor])

    def test_distinct_anchors_differ(self):
        a = self.model.extract_embedding(self.hidden, 0).numpy()
        b = self.model.extract_embedding(self.hidden, self.seq.anchor).numpy()
        self.assertFalse(np.array_equal(a, b))

    def test_anchor_out_of_range_raises(self):
        with self.assertRaises(AnchorOutOfRangeError):
            self.model.extract_embedding(self.hidden, len(self.seq))
        with self.assertRaises(AnchorOutOfRangeError):
            self.model.extract_embedding(self.hidden, -1)

    def test_mean_pool_single_row(self):
        row = Tensor(np.arange(16, dtype=np.float32).reshape(1, 16))
        np.testing.assert_array_equal(self.model.mean_pool(row).numpy(), row.data[0])

    def test_mean_pool_equal_rows(self):
        rows = Tensor(np.tile(np.linspace(-1, 1, 16, dtype=np.float32), (2, 1)))
        np.testing.assert_allclose(self.model.mean_pool(rows).numpy(), rows.data[0], rtol=1e-6)

    def test_mean_pool_matches_mean(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            data = rng.normal(size=(int(rng.integers(1, 10)), 16))
            n = int(rng.integers(1, data.shape[0] + 1))
            pooled = self.model.mean_pool(Tensor(data), n).numpy()
            np.testing.assert_allclose(pooled, data[:n].mean(axis=0), rtol=1e-10, atol=1e-12)


class TestModelGradients(unittest.TestCase):
    """Backprop through the whole model vs finite differences"""

    def test_bag_of_tokens_loss_gradient(self):
        cfg = ModelConfig(n_layers=1, n_heads=2, d_model=8, d_ff=16, vocab_size=32, max_seq_len=32)
        with precision(np.float64):
            params = init_params(cfg, seed=2, std=0.5, dtype=np.float64)
            model = TransformerModel(params)
            seq = build_single([6, 7, 8], PromptKind.SELF, TEMPLATES_SMALL, cfg.max_seq_len)

            def fn():
                hidden = model.encode(seq)
                logits = model.logits(ops.take_rows(hidden, [seq.anchor]))
                return ops.softmax_cross_entropy(logits, {6: 1, 7: 1, 8: 2})

            names = ["tok_embeddings", "layers.0.wq", "layers.0.wk", "layers.0.w1", "layers.0.w2", "norm", "head"]
            worst = check_gradient(fn, [params[n] for n in names], max_entries=6, seed=1)
        self.assertLess(worst, 1e-4)


TEMPLATES_SMALL = PromptTemplates(sep_id=4, eos_id=2, self_ids=(10, 11), next_ids=(20, 21))


if __name__ == '__main__':
    unittest.main()
