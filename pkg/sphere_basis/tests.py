# apps/sphere_basis/tests.py
import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from utils.exceptions import ArgumentError, DomainError
from .models import JetSample, SphericalFunction, coefficient_count
from .operations import SphereBasisOperations as SBO


def random_function(n, L, seed, scale=0.1):
    rng = np.random.default_rng(seed)
    return SphericalFunction(n, L, scale * rng.standard_normal(coefficient_count(n, L)))


def harmonic(n, L, ell, m, amplitude=1.0):
    coeffs = np.zeros(coefficient_count(n, L))
    coeffs[SBO.coefficient_index(n, ell, m)] = amplitude
    return SphericalFunction(n, L, coeffs)


def interior_nodes(n, count, seed):
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.2, np.pi - 0.2, count) if n == 2 else rng.uniform(0.0, 2 * np.pi, count)
    if n == 1:
        return theta[:, None]
    return np.stack([theta, rng.uniform(0.0, 2 * np.pi, count)], axis=-1)


class HarmonicEigenvalueTest(SimpleTestCase):
    """Laplace–Beltrami eigenvalues"""

    def test_values(self):
        self.assertEqual(SBO.harmonic_eigenvalue(0, 2), 0.0)
        self.assertEqual(SBO.harmonic_eigenvalue(1, 2), -2.0)
        self.assertEqual(SBO.harmonic_eigenvalue(2, 2), -6.0)
        self.assertEqual(SBO.harmonic_eigenvalue(3, 1), -9.0)

    def test_negative_degree(self):
        with self.assertRaises(ArgumentError):
            SBO.harmonic_eigenvalue(-1, 2)


class SphericalFunctionTest(SimpleTestCase):
    """Coefficient storage"""

    def test_coefficient_count(self):
        self.assertEqual(SphericalFunction.zeros(1, 4).coeffs.size, 9)
        self.assertEqual(SphericalFunction.zeros(2, 4).coeffs.size, 25)

    def test_wrong_count_rejected(self):
        with self.assertRaises(ArgumentError):
            SphericalFunction(2, 2, np.zeros(8))

    def test_unsupported_dimension(self):
        with self.assertRaises(ArgumentError):
            SphericalFunction.zeros(3, 2)

    def test_coefficients_are_read_only(self):
        f = SphericalFunction.zeros(2, 2)
        with self.assertRaises(ValueError):
            f.coeffs[0] = 1.0

    def test_index_order_matches_degree_orders(self):
        for n in (1, 2):
            pairs = SBO.degree_orders(n, 5)
            for index, (ell, m) in enumerate(pairs):
                self.assertEqual(SBO.coefficient_index(n, ell, m), index)


class GridTest(SimpleTestCase):
    """Quadrature grids"""

    def test_weights_sum_to_area(self):
        self.assertAlmostEqual(SBO.make_grid(1, 16).weights.sum(), 2 * np.pi, delta=1e-13)
        self.assertAlmostEqual(SBO.make_grid(2, 16).weights.sum(), 4 * np.pi, delta=1e-13)
        self.assertTrue(np.all(SBO.make_grid(2, 16).weights > 0))

    def test_resolution_too_small(self):
        with self.assertRaises(ArgumentError):
            SBO.make_grid(2, 3)

    def test_orthonormality(self):
        L = 8
        for n, resolution in ((1, 2 * L + 1), (2, L + 1)):
            grid = SBO.make_grid(n, resolution)
            B = SBO.basis_matrix(n, L, grid.nodes)
            gram = B.T @ (grid.weights[:, None] * B)
            np.testing.assert_allclose(gram, np.eye(B.shape[1]), atol=1e-12)

    def test_frames_are_orthonormal_and_tangent(self):
        grid = SBO.make_grid(2, 12)
        for i in range(2):
            np.testing.assert_allclose(np.einsum('nk,nk->n', grid.frames[:, i], grid.points), 0.0, atol=1e-14)
            np.testing.assert_allclose(np.linalg.norm(grid.frames[:, i], axis=-1), 1.0, atol=1e-14)
        np.testing.assert_allclose(np.einsum('nk,nk->n', grid.frames[:, 0], grid.frames[:, 1]), 0.0, atol=1e-14)

    def test_doubling_resolution_keeps_integrals(self):
        f = random_function(2, 6, seed=1)
        coarse = SBO.make_grid(2, 20)
        fine = SBO.make_grid(2, 40)
        delta = coarse.integrate(SBO.evaluate(f, coarse.nodes)) - fine.integrate(SBO.evaluate(f, fine.nodes))
        self.assertLess(abs(delta), 1e-12)

    def test_grid_is_cached(self):
        self.assertIs(SBO.make_grid(2, 10), SBO.make_grid(2, 10))


class EvaluateJetTest(SimpleTestCase):
    """Analytic jets"""

    def test_constant(self):
        for n in (1, 2):
            f = SphericalFunction.constant(n, 3, 0.25)
            jet = SBO.evaluate_jet(f, interior_nodes(n, 5, 0))
            np.testing.assert_allclose(jet.value, 0.25, atol=1e-14)
            np.testing.assert_allclose(jet.gradient, 0.0, atol=1e-13)
            np.testing.assert_allclose(jet.hessian, 0.0, atol=1e-13)

    def test_laplacian_of_harmonics(self):
        nodes = interior_nodes(2, 20, 1)
        for ell, m in SBO.degree_orders(2, 6):
            jet = SBO.evaluate_jet(harmonic(2, 6, ell, m), nodes)
            np.testing.assert_allclose(
                jet.laplacian(), SBO.harmonic_eigenvalue(ell, 2) * jet.value, atol=1e-10
            )
            np.testing.assert_allclose(jet.hessian, np.swapaxes(jet.hessian, -1, -2), atol=1e-12)
        nodes = interior_nodes(1, 20, 1)
        for ell, m in SBO.degree_orders(1, 6):
            jet = SBO.evaluate_jet(harmonic(1, 6, ell, m), nodes)
            np.testing.assert_allclose(jet.laplacian(), SBO.harmonic_eigenvalue(ell, 1) * jet.value, atol=1e-10)

    def test_degree_one_hessian(self):
        nodes = interior_nodes(2, 20, 2)
        for m in (-1, 0, 1):
            jet = SBO.evaluate_jet(harmonic(2, 3, 1, m, 0.7), nodes)
            expected = -jet.value[:, None, None] * np.eye(2)
            np.testing.assert_allclose(jet.hessian, expected, atol=1e-10)

    def test_first_derivatives_match_finite_differences(self):
        f = random_function(2, 6, seed=3)
        nodes = interior_nodes(2, 100, 3)
        d = SBO.chart_derivatives(f, nodes)
        h = 1e-5
        for axis, key in ((0, 'u_t'), (1, 'u_p')):
            step = np.zeros(2)
            step[axis] = h
            fd = (SBO.evaluate(f, nodes + step) - SBO.evaluate(f, nodes - step)) / (2 * h)
            np.testing.assert_allclose(d[key], fd, atol=1e-6)

    def test_second_derivatives_match_finite_differences(self):
        f = random_function(2, 6, seed=4)
        nodes = interior_nodes(2, 100, 4)
        d = SBO.chart_derivatives(f, nodes)
        h = 1e-5
        plus = SBO.chart_derivatives(f, nodes + [h, 0.0])
        minus = SBO.chart_derivatives(f, nodes - [h, 0.0])
        np.testing.assert_allclose(d['u_tt'], (plus['u_t'] - minus['u_t']) / (2 * h), atol=1e-6)
        np.testing.assert_allclose(d['u_tp'], (plus['u_p'] - minus['u_p']) / (2 * h), atol=1e-6)
        plus = SBO.chart_derivatives(f, nodes + [0.0, h])
        minus = SBO.chart_derivatives(f, nodes - [0.0, h])
        np.testing.assert_allclose(d['u_pp'], (plus['u_p'] - minus['u_p']) / (2 * h), atol=1e-6)

    def test_circle_derivatives_match_finite_differences(self):
        f = random_function(1, 6, seed=5)
        nodes = interior_nodes(1, 100, 5)
        jet = SBO.evaluate_jet(f, nodes)
        h = 1e-5
        fd = (SBO.evaluate(f, nodes + h) - SBO.evaluate(f, nodes - h)) / (2 * h)
        np.testing.assert_allclose(jet.gradient[:, 0], fd, atol=1e-6)
        fd2 = (SBO.evaluate_jet(f, nodes + h).gradient[:, 0] - SBO.evaluate_jet(f, nodes - h).gradient[:, 0]) / (2 * h)
        np.testing.assert_allclose(jet.hessian[:, 0, 0], fd2, atol=1e-6)

    def test_pole_rejected(self):
        with self.assertRaises(DomainError):
            SBO.evaluate_jet(random_function(2, 3, seed=6), np.array([[0.0, 1.0]]))

    def test_jet_indexing(self):
        jet = SBO.evaluate_jet(random_function(2, 3, seed=7), interior_nodes(2, 4, 7))
        single = jet[2]
        self.assertIsInstance(single, JetSample)
        self.assertEqual(single.hessian.shape, (2, 2))


class ProjectTest(SimpleTestCase):
    """Projection onto the basis"""

    def test_single_harmonic(self):
        grid = SBO.make_grid(2, 12)
        f = harmonic(2, 4, 2, -1)
        coeffs = SBO.project(SBO.evaluate(f, grid.nodes), grid, 4).coeffs
        np.testing.assert_allclose(coeffs, f.coeffs, atol=1e-12)

    def test_zero_samples(self):
        grid = SBO.make_grid(1, 16)
        np.testing.assert_array_equal(SBO.project(np.zeros(grid.size), grid, 5).coeffs, 0.0)

    def test_round_trip(self):
        for n in (1, 2):
            f = random_function(n, 8, seed=8)
            grid = SBO.make_grid(n, SBO.default_resolution(n, 8))
            g = SBO.project(SBO.evaluate(f, grid.nodes), grid, 8)
            self.assertTrue(g.accurate)
            np.testing.assert_allclose(g.coeffs, f.coeffs, atol=1e-12)

    def test_parseval(self):
        f = random_function(2, 8, seed=9)
        grid = SBO.make_grid(2, 24)
        l2 = grid.integrate(SBO.evaluate(f, grid.nodes) ** 2)
        self.assertAlmostEqual(SBO.l2_norm_squared(f), l2, delta=1e-10)

    def test_coarse_grid_is_flagged(self):
        grid = SBO.make_grid(2, 4)
        with self.assertLogs('sphere_basis.operations', level='WARNING'):
            g = SBO.project(np.ones(grid.size), grid, 6)
        self.assertFalse(g.accurate)


class NormTest(SimpleTestCase):
    """Spectral norms"""

    @settings(max_examples=10, deadline=None)
    @given(n=st.sampled_from([1, 2]), seed=st.integers(0, 1000))
    def test_gradient_norm_matches_quadrature(self, n, seed):
        f = random_function(n, 6, seed)
        grid = SBO.make_grid(n, SBO.default_resolution(n, 6))
        jet = SBO.evaluate_jet(f, grid.nodes)
        quadrature = grid.integrate(np.sum(jet.gradient ** 2, axis=-1))
        spectral = SBO.gradient_norm_squared(f)
        self.assertLess(abs(quadrature - spectral), 1e-8 * max(1.0, spectral))

    def test_rotation_preserves_norms(self):
        f = random_function(2, 5, seed=10)
        g = SBO.rotate_about_axis(f, 0.37)
        self.assertAlmostEqual(SBO.l2_norm_squared(g), SBO.l2_norm_squared(f), places=12)
        node = np.array([[1.1, 2.0]])
        self.assertAlmostEqual(SBO.evaluate(g, node)[0], SBO.evaluate(f, node - [0.0, 0.37])[0], places=12)
