# apps/functionals/tests.py
from math import comb
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase
from scipy.optimize import brentq
from scipy.stats import qmc

from asymmetry.operations import AsymmetryOperations
from geometry.models import NearlySphericalSet
from sphere_basis.models import SphericalFunction, coefficient_count
from sphere_basis.operations import SphereBasisOperations as SBO
from utils.exceptions import ArgumentError, GeometryError
from .models import DeficitSpec
from .operations import FunctionalOperations as FO


def random_set(n, L, seed, w2_target, lowest_degree=2):
    """Set with random harmonic content of degrees lowest_degree..L scaled to a W^{2,∞} target."""
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(coefficient_count(n, L))
    degrees = SphericalFunction.zeros(n, L).degrees
    coeffs[degrees < lowest_degree] = 0.0
    base = NearlySphericalSet(SphericalFunction(n, L, 1e-3 * coeffs))
    return NearlySphericalSet(SphericalFunction(n, L, coeffs * w2_target / (base.w2_norm / 1e-3)))


def shell_fraction(u, r0, r1, inside, m=20, seed=0):
    """Scrambled-Sobol estimate of the share of the shell r0 < |p| < r1 where ``inside`` holds.

    ``inside(r, rho)`` receives the sample radius and 1 + u along its direction.
    """
    a, b, c = qmc.Sobol(d=3, scramble=True, seed=seed).random_base2(m=m).T
    z = 2.0 * a - 1.0
    theta = np.arccos(z)
    phi = 2.0 * np.pi * b
    r = (r0 ** 3 + c * (r1 ** 3 - r0 ** 3)) ** (1.0 / 3.0)
    rho = 1.0 + SBO.evaluate(u, np.stack([theta, phi], axis=-1))
    shell = 4.0 * np.pi / 3.0 * (r1 ** 3 - r0 ** 3)
    return shell * np.mean(inside(r, rho))


def degree_two_set(amplitude, L=2):
    coeffs = np.zeros(coefficient_count(2, L))
    coeffs[SBO.coefficient_index(2, 2, 0)] = amplitude
    return NearlySphericalSet(SphericalFunction(2, L, coeffs))


class CurvatureIntegralTest(SimpleTestCase):
    """Curvature integrals I_k"""

    def test_ball_values(self):
        for n in (1, 2):
            area = 2 * np.pi if n == 1 else 4 * np.pi
            for k in range(n + 1):
                value = FO.curvature_integral(NearlySphericalSet.ball(n, 4), k)
                self.assertLess(abs(value / (comb(n, k) * area) - 1.0), 1e-12)

    def test_top_order_is_topological(self):
        for seed in range(10):
            omega = random_set(2, 6, seed, 0.1)
            self.assertAlmostEqual(FO.curvature_integral(omega, 2), 4 * np.pi, delta=1e-8)
        self.assertAlmostEqual(FO.curvature_integral(random_set(1, 8, 0, 0.2), 1), 2 * np.pi, delta=1e-10)

    def test_scaling_law(self):
        for n in (1, 2):
            omega = random_set(n, 5, 1, 0.1)
            for r in (0.5, 2.0):
                scaled = omega.scaled(r)
                for k in range(n + 1):
                    self.assertAlmostEqual(
                        FO.curvature_integral(scaled, k), r ** (n - k) * FO.curvature_integral(omega, k), delta=1e-10
                    )

    def test_volume_route(self):
        omega = random_set(2, 4, 2, 0.1)
        self.assertEqual(FO.curvature_integral(omega, -1), FO.volume(omega))

    def test_order_out_of_range(self):
        with self.assertRaises(ArgumentError):
            FO.curvature_integral(NearlySphericalSet.ball(2), 3)

    def test_resolution_warning(self):
        omega = random_set(2, 8, 3, 0.2)
        with self.assertLogs('functionals.operations', level='WARNING') as logs:
            FO.curvature_integral(omega, 1, grid=SBO.make_grid(2, 6), check_resolution=True)
        self.assertTrue(any('Resolution warning' in line for line in logs.output))


class VolumeAndBarycenterTest(SimpleTestCase):
    """Volume, barycenter and symmetric difference"""

    def test_ball_and_sphere_volumes(self):
        self.assertAlmostEqual(FO.volume(NearlySphericalSet.ball(2)), 4 * np.pi / 3, places=13)
        self.assertAlmostEqual(FO.volume(NearlySphericalSet.ball(1, radius=1.2)), np.pi * 1.44, places=13)

    def test_volume_matches_sampling_oracle(self):
        omega = degree_two_set(0.1)
        r0, r1 = 0.9, 1.1
        estimate = 4 * np.pi / 3 * r0 ** 3 + shell_fraction(omega.u, r0, r1, lambda r, rho: r < rho, m=21)
        self.assertLess(abs(estimate / FO.volume(omega) - 1.0), 1e-3)

    def test_barycenter_of_even_set(self):
        self.assertLess(np.linalg.norm(FO.barycenter(NearlySphericalSet.ball(2))), 1e-15)
        rng = np.random.default_rng(4)
        coeffs = np.zeros(coefficient_count(2, 6))
        degrees = SphericalFunction.zeros(2, 6).degrees
        even = (degrees % 2 == 0) & (degrees > 0)
        coeffs[even] = 0.02 * rng.standard_normal(even.sum())
        omega = NearlySphericalSet(SphericalFunction(2, 6, coeffs))
        self.assertLess(np.linalg.norm(FO.barycenter(omega)), 1e-12)

    def test_barycenter_of_translated_ball(self):
        c = np.array([0.05, 0.0, 0.0])
        omega = AsymmetryOperations.translated_ball(2, c, L=10)
        np.testing.assert_allclose(FO.barycenter(omega), c, atol=1e-6)

    def test_symmetric_difference(self):
        omega = degree_two_set(0.05)
        exact = FO.symmetric_difference_with_ball(omega)
        oracle = shell_fraction(omega.u, 0.965, 1.035, lambda r, rho: (r < rho) != (r < 1.0), m=22)
        self.assertLess(abs(oracle / exact - 1.0), 1e-3)
        self.assertGreaterEqual(FO.symmetric_difference_surrogate(omega), exact - 1e-15)

    def test_surrogate_exact_for_sign_definite(self):
        omega = NearlySphericalSet.ball(2, 2, radius=1.1)
        self.assertAlmostEqual(
            FO.symmetric_difference_surrogate(omega), FO.symmetric_difference_with_ball(omega), places=12
        )

    def test_holder_chain(self):
        for seed in range(5):
            omega = FO.normalize(random_set(2, 6, 10 + seed, 0.05), 'volume')
            eps = omega.w2_norm
            ball = FO.unit_ball_volume(2)
            lhs = (FO.symmetric_difference_with_ball(omega) / ball) ** 2
            rhs = 9 / (4 * np.pi) * SBO.l2_norm_squared(omega.u) * (1 + 5 * eps)
            self.assertLessEqual(lhs, rhs)


class MatchingRadiusAndDeficitTest(SimpleTestCase):
    """Matching balls and deficits"""

    def test_ball_radius(self):
        for m in (-1, 0, 1):
            self.assertAlmostEqual(FO.matching_ball_radius(NearlySphericalSet.ball(2), m), 1.0, places=13)

    def test_sphere_radius(self):
        for n in (1, 2):
            omega = NearlySphericalSet.ball(n, 3, radius=1.3)
            for m in range(-1, n):
                self.assertAlmostEqual(FO.matching_ball_radius(omega, m), 1.3, delta=1e-12)

    def test_area_radius_cross_check(self):
        omega = random_set(2, 5, 5, 0.1)
        area = FO.area(omega)
        direct = brentq(lambda r: r ** 2 * 4 * np.pi - area, 0.5, 2.0, xtol=1e-15)
        self.assertAlmostEqual(FO.matching_ball_radius(omega, 0), direct, places=12)

    def test_deficits_vanish_on_spheres(self):
        for n in (1, 2):
            for c in (0.0, 0.25):
                omega = NearlySphericalSet.ball(n, 2, radius=1 + c)
                for k in range(n + 1):
                    for m in range(-1, k):
                        self.assertAlmostEqual(FO.deficit(omega, DeficitSpec(k, m)), 0.0, delta=1e-12)

    def test_deficit_scale_invariant(self):
        omega = random_set(2, 5, 6, 0.1)
        for spec in (DeficitSpec(1, -1), DeficitSpec(1, 0), DeficitSpec(2, 1)):
            base = FO.deficit(omega, spec)
            for r in (0.5, 2.0):
                self.assertAlmostEqual(FO.deficit(omega.scaled(r), spec), base, delta=1e-8)

    def test_deficit_translation_invariant(self):
        omega = random_set(2, 5, 7, 0.05, lowest_degree=1)
        centered = FO.recenter(omega)
        for spec in (DeficitSpec(1, -1), DeficitSpec(0, -1)):
            self.assertAlmostEqual(FO.deficit(centered, spec), FO.deficit(omega, spec), delta=1e-6)

    def test_invalid_specs(self):
        with self.assertRaises(ArgumentError):
            DeficitSpec(1, 1)
        with self.assertRaises(ArgumentError):
            DeficitSpec(2, -2)
        with self.assertRaises(ArgumentError):
            FO.deficit(NearlySphericalSet.ball(1), DeficitSpec(2, 0))

    def test_non_positive_functional(self):
        with patch.object(FO, 'curvature_integral', return_value=-1.0):
            with self.assertRaises(GeometryError):
                FO.matching_ball_radius(NearlySphericalSet.ball(2), 1)


class NormalizeTest(SimpleTestCase):
    """Normalization by scaling"""

    def test_sphere_becomes_unit_ball(self):
        omega = FO.normalize(NearlySphericalSet.ball(2, 3, radius=1.2), 'volume')
        np.testing.assert_allclose(omega.u.coeffs, 0.0, atol=1e-12)

    def test_normalized_set_is_fixed(self):
        omega = FO.normalize(random_set(2, 4, 8, 0.1), 'volume')
        again = FO.normalize(omega, 'volume')
        np.testing.assert_allclose(again.u.coeffs, omega.u.coeffs, atol=1e-12)

    def test_area_mode(self):
        omega = FO.normalize(random_set(2, 4, 9, 0.1), 0)
        self.assertAlmostEqual(FO.area(omega), 4 * np.pi, delta=1e-9)

    def test_bad_mode(self):
        with self.assertRaises(ArgumentError):
            FO.normalize(NearlySphericalSet.ball(2), 2)
        with self.assertRaises(ArgumentError):
            FO.normalize(NearlySphericalSet.ball(2), 'area')


class RecenterTest(SimpleTestCase):
    """Translation and recentering"""

    def test_centered_set_unchanged(self):
        omega = NearlySphericalSet.ball(2, 2)
        self.assertIs(FO.recenter(omega), omega)

    def test_translated_ball_recovers_unit_ball(self):
        omega = AsymmetryOperations.translated_ball(2, [0.05, 0.0, 0.0], L=10)
        centered = FO.recenter(omega)
        grid = SBO.make_grid(2, 40)
        self.assertLess(np.max(np.abs(SBO.evaluate(centered.u, grid.nodes))), 1e-6)

    def test_random_set_is_centered(self):
        for n in (1, 2):
            omega = random_set(n, 5, 11, 0.1, lowest_degree=1)
            centered = FO.recenter(omega, tol=1e-9)
            self.assertLess(np.linalg.norm(FO.barycenter(centered)), 1e-9)

    def test_translation_residual_is_small(self):
        omega = random_set(2, 4, 12, 0.05)
        result = FO.translate(omega, [0.01, -0.02, 0.005])
        self.assertEqual(result.omega.max_degree, 8)
        self.assertLess(result.residual, 1e-6)

    def test_translation_outside_bracket(self):
        with self.assertRaises(GeometryError):
            FO.translate(NearlySphericalSet.ball(2, 2), [1.5, 0.0, 0.0])


class SupNormsTest(SimpleTestCase):
    """Sup-norm scans"""

    def test_constant(self):
        norms = FO.sup_norms(NearlySphericalSet.ball(2, 2, radius=0.8))
        np.testing.assert_allclose(norms, (0.2, 0.0, 0.0), atol=1e-12)

    def test_degree_one_hessian(self):
        coeffs = np.zeros(coefficient_count(2, 1))
        coeffs[SBO.coefficient_index(2, 1, 1)] = 0.1
        norms = FO.sup_norms(NearlySphericalSet(SphericalFunction(2, 1, coeffs)))
        self.assertAlmostEqual(norms[2], norms[0], places=10)

    def test_scan_convergence(self):
        omega = random_set(2, 4, 13, 0.01)
        coarse = FO.sup_norms(omega)
        doubled = SBO.scan_resolution(2, 4) * 2
        with patch.object(SBO, 'scan_resolution', return_value=doubled):
            fine = FO.sup_norms(NearlySphericalSet(omega.u))
        np.testing.assert_allclose(fine, coarse, atol=1e-4)

    def test_spherical_deviation_of_translated_ball(self):
        omega = AsymmetryOperations.translated_ball(2, [0.0, 0.03, 0.0], L=10)
        self.assertLess(FO.spherical_deviation(omega), 1e-6)
