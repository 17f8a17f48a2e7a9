# apps/asymmetry/tests.py
import numpy as np
from django.test import SimpleTestCase

from functionals.operations import FunctionalOperations as FO
from functionals.tests import degree_two_set, random_set, shell_fraction
from geometry.models import NearlySphericalSet
from sphere_basis.operations import SphereBasisOperations as SBO
from utils.exceptions import ArgumentError, GeometryError, IterationError
from .models import TranslatedBall
from .operations import AsymmetryOperations as AO


def unit_directions(count, dim, seed):
    v = np.random.default_rng(seed).standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


class BallRadialTest(SimpleTestCase):
    """Radial function of an off-center ball"""

    def test_centered_ball(self):
        np.testing.assert_allclose(AO.ball_radial(TranslatedBall(np.zeros(3), 1.7), unit_directions(10, 3, 0)), 1.7)

    def test_collinear_direction(self):
        x = np.array([0.3, 0.4, 0.0])
        t = AO.ball_radial(TranslatedBall(x, 1.0), (x / 0.5)[None, :])
        self.assertAlmostEqual(t[0], 1.5, places=14)

    def test_defining_equation(self):
        rng = np.random.default_rng(1)
        for dim in (2, 3):
            r = rng.uniform(0.5, 2.0)
            x = rng.standard_normal(dim)
            x *= 0.8 * r * rng.uniform() / np.linalg.norm(x)
            theta = unit_directions(50, dim, 2)
            t = AO.ball_radial(TranslatedBall(x, r), theta)
            self.assertTrue(np.all(t > 0))
            np.testing.assert_allclose(np.linalg.norm(t[:, None] * theta - x, axis=-1), r, atol=1e-12)

    def test_center_outside_rejected(self):
        with self.assertRaises(ArgumentError):
            TranslatedBall([1.0, 0.0], 1.0)
        with self.assertRaises(ArgumentError):
            TranslatedBall([0.0, 0.0], 0.0)


class SymdiffRadialTest(SimpleTestCase):
    """Symmetric difference of star-shaped sets"""

    def test_identical(self):
        grid = SBO.make_grid(2, 8)
        rho = 1.0 + 0.01 * np.cos(grid.nodes[:, 0])
        self.assertEqual(AO.symdiff_radial(rho, rho, grid), 0.0)

    def test_concentric_spheres(self):
        for n in (1, 2):
            grid = SBO.make_grid(n, 16)
            value = AO.symdiff_radial(np.ones(grid.size), np.full(grid.size, 1.2), grid)
            self.assertAlmostEqual(value, FO.unit_ball_volume(n) * (1.2 ** (n + 1) - 1.0), places=12)

    def test_matches_sampling_oracle(self):
        omega = degree_two_set(0.05)
        grid = SBO.make_grid(2, 48)
        exact = AO.symdiff_radial(omega.radial_values(grid), np.ones(grid.size), grid)
        oracle = shell_fraction(omega.u, 0.965, 1.035, lambda r, rho: (r < rho) != (r < 1.0), m=22)
        self.assertLess(abs(oracle / exact - 1.0), 1e-3)

    def test_non_positive_radius(self):
        grid = SBO.make_grid(1, 8)
        with self.assertRaises(GeometryError):
            AO.symdiff_radial(np.zeros(grid.size), np.ones(grid.size), grid)


class FraenkelAsymmetryTest(SimpleTestCase):
    """Fraenkel asymmetry search"""

    def test_ball(self):
        result = AO.fraenkel_asymmetry(NearlySphericalSet.ball(2, 2))
        self.assertLess(result.alpha, 1e-12)
        self.assertLess(np.linalg.norm(result.center), 1e-8)

    def test_translated_ball(self):
        for n, c in ((2, [0.05, 0.0, 0.0]), (2, [0.02, -0.03, 0.03]), (1, [0.0, 0.05])):
            omega = AO.translated_ball(n, c, L=10)
            result = AO.fraenkel_asymmetry(omega)
            self.assertLessEqual(result.alpha, 1e-5)
            np.testing.assert_allclose(result.center, c, atol=1e-4)

    def test_bounded_by_centered_value(self):
        for n in (1, 2):
            omega = FO.recenter(FO.normalize(random_set(n, 5, 3, 0.05), 'volume'))
            alpha = AO.fraenkel_asymmetry(omega).alpha
            centered = FO.symmetric_difference_with_ball(omega) / FO.unit_ball_volume(n)
            self.assertLessEqual(alpha, centered + 1e-12)
            self.assertGreaterEqual(alpha, 0.0)
            self.assertLessEqual(alpha, 2.0)

    def test_scale_invariance(self):
        omega = random_set(2, 4, 4, 0.05, lowest_degree=1)
        alpha = AO.fraenkel_asymmetry(omega).alpha
        for r in (0.5, 2.0):
            self.assertAlmostEqual(AO.fraenkel_asymmetry(omega.scaled(r)).alpha, alpha, delta=1e-6)

    def test_rotation_invariance(self):
        omega = random_set(2, 4, 5, 0.05)
        grid = SBO.make_grid(2, 64)
        # off the azimuth lattice, so the rotated set samples different points
        angle = 0.37
        self.assertNotAlmostEqual(angle * grid.resolution / np.pi % 1.0, 0.0, places=2)
        rotated = NearlySphericalSet(SBO.rotate_about_axis(omega.u, angle))
        alpha = AO.fraenkel_asymmetry(omega, grid).alpha
        self.assertGreater(alpha, 0.0)
        self.assertAlmostEqual(AO.fraenkel_asymmetry(rotated, grid).alpha, alpha, delta=0.02 * alpha)

    def test_non_convergence_reports_best(self):
        omega = random_set(2, 3, 6, 0.05)
        with self.assertRaises(IterationError) as ctx:
            AO.fraenkel_asymmetry(omega, max_evaluations=5)
        self.assertIsNotNone(ctx.exception.best)
        self.assertGreaterEqual(ctx.exception.best.alpha, 0.0)
