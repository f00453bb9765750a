"""
Unit tests for the Adam optimizer.
"""

import math
import os
import sys
import unittest

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from numerics import ops
from numerics.exceptions import NonFiniteError
from numerics.optim import Adam, adam_step, global_grad_norm
from numerics.tensor import Tensor


class TestAdamStep(unittest.TestCase):
    """In-place Adam update"""

    def test_first_step_moves_by_lr_times_sign(self):
        param = np.array([1.0, -1.0, 0.5])
        grad = np.array([0.3, -2.0, 1e-3])
        m, v = np.zeros(3), np.zeros(3)
        adam_step(param, grad, m, v, step=1, lr=0.1)
        # bias-corrected first step is lr·g/(|g|+eps)
        expected = np.array([1.0, -1.0, 0.5]) - 0.1 * grad / (np.abs(grad) + 1e-8)
        np.testing.assert_allclose(param, expected, rtol=1e-12)

    def test_step_counter_must_start_at_one(self):
        with self.assertRaises(ValueError):
            adam_step(np.zeros(1), np.zeros(1), np.zeros(1), np.zeros(1), step=0, lr=0.1)


class TestAdam(unittest.TestCase):
    """Adam over named tensors"""

    def test_minimizes_quadratic(self):
        x = Tensor(np.array([[3.0, -2.0]]), requires_grad=True)
        target = Tensor(np.zeros((1, 2)))
        opt = Adam({"x": x}, lr=0.1)
        for _ in range(300):
            opt.zero_grad()
            ops.mse(x, target).backward()
            opt.step()
        self.assertLess(np.abs(x.data).max(), 5e-2)

    def test_skips_parameters_without_grad(self):
        a = Tensor(np.ones(2), requires_grad=True)
        frozen = Tensor(np.ones(2), requires_grad=False)
        opt = Adam({"a": a, "frozen": frozen}, lr=0.1)
        a.grad = np.ones(2)
        opt.step()
        np.testing.assert_array_equal(frozen.data, np.ones(2))
        self.assertTrue(np.all(a.data < 1.0))

    def test_clipping_reports_unclipped_norm(self):
        a = Tensor(np.zeros(2), requires_grad=True)
        opt = Adam({"a": a}, lr=0.1, clip_norm=1.0)
        a.grad = np.array([3.0, 4.0])
        self.assertAlmostEqual(opt.step(), 5.0)

    def test_non_finite_gradient_raises(self):
        a = Tensor(np.zeros(2), requires_grad=True)
        opt = Adam({"a": a})
        a.grad = np.array([np.inf, 0.0])
        with self.assertRaises(NonFiniteError):
            opt.step()

    def test_global_norm(self):
        norm = global_grad_norm({"b": np.array([4.0]), "a": np.array([[3.0]])})
        self.assertEqual(norm, 5.0)
        self.assertEqual(global_grad_norm({}), 0.0)

    def test_invalid_lr(self):
        with self.assertRaises(ValueError):
            Adam({}, lr=0.0)


if __name__ == '__main__':
    unittest.main()
