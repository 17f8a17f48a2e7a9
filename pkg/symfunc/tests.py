# apps/symfunc/tests.py
from itertools import combinations
from math import comb

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from utils.exceptions import ArgumentError
from .models import SymMatrix
from .operations import SymmetricFunctionOperations as SFO


def principal_minor_sigma(A, k):
    """σ_k as the sum of k×k principal minors."""
    n = A.shape[0]
    if k == 0:
        return 1.0
    return sum(np.linalg.det(A[np.ix_(idx, idx)]) for idx in combinations(range(n), k))


def random_symmetric(rng, n):
    M = rng.standard_normal((n, n))
    return 0.5 * (M + M.T)


class SigmaOfEigenvaluesTest(SimpleTestCase):
    """σ_k of a spectrum"""

    def test_identity_spectrum(self):
        self.assertAlmostEqual(SFO.sigma_of_eigenvalues([1, 1, 1], 2), 3.0)

    def test_zero_order_is_one(self):
        self.assertEqual(SFO.sigma_of_eigenvalues([4.0, -2.0], 0), 1.0)

    def test_enumerated_pairs(self):
        self.assertAlmostEqual(SFO.sigma_of_eigenvalues([1, 2, 3], 2), 11.0)

    def test_order_out_of_range(self):
        with self.assertRaises(ArgumentError):
            SFO.sigma_of_eigenvalues([1, 2], 3)
        with self.assertRaises(ArgumentError):
            SFO.sigma_of_eigenvalues([1, 2], -1)


class SigmaOfMatrixTest(SimpleTestCase):
    """σ_k of a matrix through power traces"""

    def test_examples(self):
        self.assertAlmostEqual(SFO.sigma_of_matrix(np.eye(3), 2), 3.0)
        self.assertAlmostEqual(SFO.sigma_of_matrix(np.diag([1.0, 2.0, 3.0]), 3), 6.0)
        self.assertAlmostEqual(SFO.sigma_of_matrix([[0.0, 1.0], [1.0, 0.0]], 2), -1.0)

    def test_accepts_sym_matrix(self):
        A = SymMatrix(np.diag([1.0, 2.0]), symmetric=True)
        self.assertAlmostEqual(SFO.sigma_of_matrix(A, 1), 3.0)

    def test_rejects_unsymmetric_flag(self):
        with self.assertRaises(ArgumentError):
            SymMatrix([[0.0, 1.0], [0.0, 0.0]], symmetric=True)

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(min_value=1, max_value=5), seed=st.integers(0, 10_000))
    def test_agrees_with_spectrum(self, n, seed):
        A = random_symmetric(np.random.default_rng(seed), n)
        lam = SFO.spectrum(A)
        for k in range(n + 1):
            expected = SFO.sigma_of_eigenvalues(lam, k)
            self.assertLessEqual(
                abs(SFO.sigma_of_matrix(A, k) - expected), 1e-10 * max(1.0, abs(expected))
            )

    def test_agrees_with_principal_minors(self):
        rng = np.random.default_rng(3)
        for n in range(1, 5):
            A = random_symmetric(rng, n)
            for k in range(n + 1):
                self.assertAlmostEqual(SFO.sigma_of_matrix(A, k), principal_minor_sigma(A, k), places=10)

    def test_batched_stack(self):
        rng = np.random.default_rng(5)
        stack = np.stack([random_symmetric(rng, 3) for _ in range(7)])
        batched = SFO.sigma_of_matrix(stack, 2)
        for i in range(7):
            self.assertAlmostEqual(batched[i], SFO.sigma_of_matrix(stack[i], 2), places=12)


class NewtonTensorTest(SimpleTestCase):
    """Newton transformation tensors"""

    def test_order_zero_is_identity(self):
        A = random_symmetric(np.random.default_rng(0), 3)
        np.testing.assert_allclose(SFO.newton_tensor(A, 0), np.eye(3))

    def test_identity_argument(self):
        for n in range(1, 5):
            for k in range(n):
                np.testing.assert_allclose(
                    SFO.newton_tensor(np.eye(n), k), comb(n - 1, k) * np.eye(n), atol=1e-12
                )

    def test_two_by_two_diagonal(self):
        np.testing.assert_allclose(SFO.newton_tensor(np.diag([2.0, 5.0]), 1), np.diag([5.0, 2.0]))

    def test_top_order_vanishes(self):
        A = random_symmetric(np.random.default_rng(1), 3)
        np.testing.assert_array_equal(SFO.newton_tensor(A, 3), np.zeros((3, 3)))

    def test_trace_contraction(self):
        rng = np.random.default_rng(2)
        for n in range(1, 6):
            A = random_symmetric(rng, n)
            for k in range(1, n + 1):
                contraction = np.trace(A @ SFO.newton_tensor(A, k - 1))
                self.assertAlmostEqual(contraction, k * SFO.sigma_of_matrix(A, k), places=9)

    def test_transfer_identity(self):
        rng = np.random.default_rng(4)
        for n in range(2, 6):
            A = random_symmetric(rng, n)
            for m in range(n):
                lhs = SFO.newton_tensor(A, m) @ A
                rhs = SFO.sigma_of_matrix(A, m + 1) * np.eye(n) - SFO.newton_tensor(A, m + 1)
                np.testing.assert_allclose(lhs, rhs, atol=1e-11)

    def test_derivative_matches_finite_differences(self):
        rng = np.random.default_rng(6)
        h = 1e-6
        for n in (2, 3, 4):
            A = rng.standard_normal((n, n))
            for k in range(1, n + 1):
                grad = SFO.sigma_derivative(A, k)
                for i in range(n):
                    for j in range(n):
                        E = np.zeros((n, n))
                        E[i, j] = h
                        fd = (SFO.sigma_of_matrix(A + E, k) - SFO.sigma_of_matrix(A - E, k)) / (2 * h)
                        self.assertLess(abs(fd - grad[i, j]), 1e-6)


class SigmaPolarizationTest(SimpleTestCase):
    """Polarized symmetric function"""

    def test_diagonal_identity(self):
        self.assertAlmostEqual(SFO.sigma_polarization(np.eye(3), np.eye(3)), 6.0)

    def test_diagonal_pair(self):
        self.assertAlmostEqual(SFO.sigma_polarization(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])), 10.0)

    def test_repeated_argument(self):
        A = random_symmetric(np.random.default_rng(8), 4)
        for k in range(1, 5):
            self.assertAlmostEqual(
                SFO.sigma_polarization(*([A] * k)), k * SFO.sigma_of_matrix(A, k), places=8
            )

    def test_mixed_dimensions(self):
        with self.assertRaises(ArgumentError):
            SFO.sigma_polarization(np.eye(2), np.eye(3))

    def test_too_many_arguments(self):
        with self.assertRaises(ArgumentError):
            SFO.sigma_polarization(np.eye(2), np.eye(2), np.eye(2))

    @settings(max_examples=30, deadline=None)
    @given(n=st.integers(min_value=2, max_value=5), seed=st.integers(0, 10_000))
    def test_rank_one_factors_sharing_covector_vanish(self, n, seed):
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(n)
        for k in range(2, n + 1):
            fillers = [random_symmetric(rng, n) for _ in range(k - 2)]
            w1, w2 = rng.standard_normal(n), rng.standard_normal(n)
            value = SFO.sigma_polarization(np.outer(w1, v), np.outer(w2, v), *fillers)
            scale = (np.linalg.norm(w1) + np.linalg.norm(w2)) * np.linalg.norm(v)
            scale = (scale + sum(np.linalg.norm(M, 2) for M in fillers)) ** k
            self.assertLess(abs(value), 1e-12 * max(1.0, scale))
