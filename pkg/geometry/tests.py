# apps/geometry/tests.py
from math import comb

import numpy as np
from django.test import SimpleTestCase

from sphere_basis.models import JetSample, SphericalFunction, coefficient_count
from sphere_basis.operations import SphereBasisOperations as SBO
from symfunc.operations import SymmetricFunctionOperations as SFO
from utils.exceptions import GeometryError
from .models import NearlySphericalSet
from .operations import GeometryOperations as GO


def scaled_random_function(n, L, seed, w2_target):
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(coefficient_count(n, L))
    coeffs[0] = 0.0
    f = SphericalFunction(n, L, coeffs)
    w2 = max(NearlySphericalSet(SphericalFunction(n, L, 1e-3 * coeffs)).sup_norms) / 1e-3
    return f.with_coeffs(coeffs * w2_target / w2)


def random_nodes(count, rng):
    return np.stack([rng.uniform(0.1, np.pi - 0.1, count), rng.uniform(0, 2 * np.pi, count)], axis=-1)


class ShapeOperatorTest(SimpleTestCase):
    """Shape operator and principal curvatures"""

    def test_unit_sphere(self):
        np.testing.assert_allclose(GO.shape_operator(JetSample.constant(0.0, 2)), np.eye(2))

    def test_concentric_sphere(self):
        np.testing.assert_allclose(GO.shape_operator(JetSample.constant(0.3, 2)), np.eye(2) / 1.3)

    def test_degenerate_graph_rejected(self):
        with self.assertRaises(GeometryError):
            GO.shape_operator(JetSample.constant(-0.97, 2))

    def test_eigenvalues_match_oracle(self):
        u = scaled_random_function(2, 5, seed=1, w2_target=0.3)
        jet = SBO.evaluate_jet(u, random_nodes(200, np.random.default_rng(1)))
        eig = np.sort(np.linalg.eigvals(GO.shape_operator(jet)).real, axis=-1)
        np.testing.assert_allclose(eig, GO.principal_curvatures(jet), atol=1e-10)

    def test_polar_curve_curvature(self):
        u = scaled_random_function(1, 6, seed=2, w2_target=0.2)
        nodes = np.linspace(0, 2 * np.pi, 50, endpoint=False)[:, None]
        d = SBO.chart_derivatives(u, nodes)
        r, dr, ddr = 1 + d['u'], d['u_t'], d['u_tt']
        expected = (r ** 2 + 2 * dr ** 2 - r * ddr) / (r ** 2 + dr ** 2) ** 1.5
        jet = SBO.evaluate_jet(u, nodes)
        np.testing.assert_allclose(GO.shape_operator(jet)[:, 0, 0], expected, atol=1e-12)


class SigmaClosedFormTest(SimpleTestCase):
    """Closed form of σ_k against the eigenvalue route"""

    def test_spheres(self):
        for n in (1, 2):
            for c in (0.0, 0.2, -0.3):
                for k in range(n + 1):
                    self.assertAlmostEqual(
                        GO.sigma_k_closed(JetSample.constant(c, n), k), comb(n, k) / (1 + c) ** k, places=12
                    )

    def test_scaling_of_sphere_family(self):
        values = [GO.sigma_k_closed(JetSample.constant(c, 2), 2) * (1 + c) ** 2 for c in (-0.5, 0.0, 0.7)]
        np.testing.assert_allclose(values, values[0], rtol=1e-13)

    def test_random_draws_match_oracle(self):
        rng = np.random.default_rng(11)
        for draw in range(50):
            u = scaled_random_function(2, 4, seed=100 + draw, w2_target=0.3)
            jet = SBO.evaluate_jet(u, random_nodes(20, rng))
            shape = GO.shape_operator(jet)
            curvatures = GO.principal_curvatures(jet)
            for k in range(3):
                closed = GO.sigma_k_closed(jet, k)
                via_matrix = SFO.sigma_of_matrix(shape, k)
                via_spectrum = SFO.sigma_of_eigenvalues(curvatures, k)
                bound = 1e-10 * np.maximum(1.0, np.abs(via_spectrum))
                self.assertTrue(np.all(np.abs(closed - via_matrix) <= bound))
                self.assertTrue(np.all(np.abs(closed - via_spectrum) <= bound))

    def test_mean_curvature_formula(self):
        u = scaled_random_function(2, 5, seed=3, w2_target=0.25)
        jet = SBO.evaluate_jet(u, random_nodes(100, np.random.default_rng(3)))
        r, g, H = 1 + jet.value, jet.gradient, jet.hessian
        D = np.sqrt(np.sum(g ** 2, axis=-1) + r ** 2)
        gHg = np.einsum('ni,nij,nj->n', g, H, g)
        expected = -jet.laplacian() / (D * r) + 2 / D + gHg / (D ** 3 * r) + np.sum(g ** 2, axis=-1) / D ** 3
        np.testing.assert_allclose(GO.sigma_k_closed(jet, 1), expected, atol=1e-12)

    def test_circle_case(self):
        u = scaled_random_function(1, 5, seed=4, w2_target=0.3)
        jet = SBO.evaluate_jet(u, np.linspace(0.1, 6.0, 30)[:, None])
        np.testing.assert_allclose(GO.sigma_k_closed(jet, 1), GO.shape_operator(jet)[:, 0, 0], atol=1e-12)

    def test_curvature_sample_package(self):
        sample = GO.curvature_sample(JetSample.constant(0.0, 2, count=3))
        np.testing.assert_allclose(sample.sigma, [[1, 2, 1]] * 3)
        np.testing.assert_allclose(sample.area_density, 1.0)
        np.testing.assert_allclose(sample.D, 1.0)


class AreaElementTest(SimpleTestCase):
    """Area element against an embedding-based area"""

    def test_spheres(self):
        self.assertAlmostEqual(GO.area_element(JetSample.constant(0.0, 2)), 1.0)
        self.assertAlmostEqual(GO.area_element(JetSample.constant(0.4, 2)), 1.4 ** 2)
        self.assertAlmostEqual(GO.area_element(JetSample.constant(0.4, 1)), 1.4)

    def test_matches_cross_product_area(self):
        u = scaled_random_function(2, 6, seed=5, w2_target=0.2)
        grid = SBO.make_grid(2, 64)
        jet = SBO.evaluate_jet(u, grid.nodes)
        area = grid.integrate(GO.area_element(jet))

        d = SBO.chart_derivatives(u, grid.nodes)
        theta = grid.nodes[:, 0]
        r = (1 + d['u'])[:, None]
        x = grid.points
        x_theta = grid.frames[:, 0]
        x_phi = np.sin(theta)[:, None] * grid.frames[:, 1]
        X_theta = d['u_t'][:, None] * x + r * x_theta
        X_phi = d['u_p'][:, None] * x + r * x_phi
        jacobian = np.linalg.norm(np.cross(X_theta, X_phi), axis=-1)
        oracle = np.sum(grid.weights / np.sin(theta) * jacobian)
        self.assertLess(abs(area - oracle), 1e-8 * oracle)


class OutwardNormalTest(SimpleTestCase):
    """Outward unit normal"""

    def test_sphere_normal_is_radial(self):
        grid = SBO.make_grid(2, 8)
        for c in (0.0, 0.3):
            jet = SBO.evaluate_jet(SphericalFunction.constant(2, 2, c), grid.nodes)
            np.testing.assert_allclose(GO.outward_normal(jet), grid.points, atol=1e-12)

    def test_unit_and_tangent_orthogonal(self):
        u = scaled_random_function(2, 6, seed=6, w2_target=0.3)
        nodes = random_nodes(100, np.random.default_rng(6))
        jet = SBO.evaluate_jet(u, nodes)
        normal = GO.outward_normal(jet)
        np.testing.assert_allclose(np.linalg.norm(normal, axis=-1), 1.0, atol=1e-12)
        points, frames = SBO.embed(2, nodes)
        r = 1 + jet.value
        for i in range(2):
            tangent = jet.gradient[:, i, None] * points + r[:, None] * frames[:, i]
            np.testing.assert_allclose(np.einsum('nk,nk->n', normal, tangent), 0.0, atol=1e-10)
        self.assertTrue(np.all(np.einsum('nk,nk->n', normal, points) > 0))


class NearlySphericalSetTest(SimpleTestCase):
    """Radial-graph domains"""

    def test_invalid_graph_rejected(self):
        coeffs = np.zeros(9)
        coeffs[0] = -2.0 * np.sqrt(4 * np.pi)
        with self.assertRaises(GeometryError):
            NearlySphericalSet(SphericalFunction(2, 2, coeffs))

    def test_dip_between_quadrature_nodes_rejected(self):
        # 1 + u dips below zero around θ = π/128, halfway between two default-grid nodes
        shift = 2.0 * (np.pi / 128 - np.pi / 2)
        amplitude = 1.0005 * np.sqrt(np.pi)
        coeffs = np.zeros(coefficient_count(1, 2))
        coeffs[SBO.coefficient_index(1, 2, 2)] = amplitude * np.cos(shift)
        coeffs[SBO.coefficient_index(1, 2, -2)] = amplitude * np.sin(shift)
        u = SphericalFunction(1, 2, coeffs)
        default = SBO.make_grid(1, SBO.default_resolution(1, 2))
        self.assertGreater(np.min(1.0 + SBO.evaluate(u, default.nodes)), 0.0)
        with self.assertRaises(GeometryError):
            NearlySphericalSet(u)

    def test_sup_norms_of_constant(self):
        norms = NearlySphericalSet(SphericalFunction.constant(2, 3, 0.1)).sup_norms
        self.assertAlmostEqual(norms[0], 0.1, places=12)
        self.assertAlmostEqual(norms[1], 0.0, places=12)
        self.assertAlmostEqual(norms[2], 0.0, places=12)

    def test_scaled_set(self):
        omega = NearlySphericalSet(scaled_random_function(2, 3, seed=7, w2_target=0.1))
        node = np.array([[0.7, 1.3]])
        self.assertAlmostEqual(
            1 + SBO.evaluate(omega.scaled(2.0).u, node)[0], 2 * (1 + SBO.evaluate(omega.u, node)[0]), places=12
        )

    def test_k_convexity(self):
        self.assertTrue(GO.is_k_convex(NearlySphericalSet.ball(2, 2), 2))
        coeffs = np.zeros(49)
        coeffs[SBO.coefficient_index(2, 6, 0)] = 0.4
        self.assertFalse(GO.is_k_convex(NearlySphericalSet(SphericalFunction(2, 6, coeffs)), 1))
