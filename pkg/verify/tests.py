# apps/verify/tests.py
from unittest.mock import patch

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from functionals.operations import FunctionalOperations as FO
from geometry.models import NearlySphericalSet
from sphere_basis.models import SphericalFunction, coefficient_count
from sphere_basis.operations import SphereBasisOperations as SBO
from utils.exceptions import AccuracyError, ArgumentError, IterationError, VerificationFailure
from .models import SampleRow, SampleSpec
from .operations import VerificationOperations as VO, run_in_pool, sample_rng


def zonal_set(n, ell, amplitude, L=None):
    """1 + a Y_ℓ with Y_ℓ zonal on S^2 or cos(ℓθ) on S^1."""
    L = ell if L is None else L
    coeffs = np.zeros(coefficient_count(n, L))
    order = 0 if n == 2 else ell
    coeffs[SBO.coefficient_index(n, ell, order)] = amplitude
    return NearlySphericalSet(SphericalFunction(n, L, coeffs))


def fake_row(index, delta, alpha, excess=None):
    return SampleRow(
        index=index, seed=5, epsilon=0.05, w2_norm=0.05, delta=delta, alpha=alpha,
        u_l2_sq=1e-3, grad_l2_sq=1e-2, u_sup=0.05, excess=1e-3 + index * 1e-4 if excess is None else excess,
    )


class SampleSpecTest(SimpleTestCase):
    """Sample recipes"""

    def test_rejects_bad_epsilon(self):
        for eps in (0.0, -0.1, 0.31):
            with self.assertRaises(ArgumentError):
                SampleSpec(n=2, L=4, epsilon=eps)

    def test_rejects_bad_modes(self):
        with self.assertRaises(ArgumentError):
            SampleSpec(n=2, L=4, epsilon=0.05, mode='area')
        with self.assertRaises(ArgumentError):
            SampleSpec(n=2, L=4, epsilon=0.05, mode='quermass')
        with self.assertRaises(ArgumentError):
            SampleSpec(n=2, L=4, epsilon=0.05, mode='quermass', j=2)

    def test_rejects_bad_degree_range(self):
        with self.assertRaises(ArgumentError):
            SampleSpec(n=2, L=4, epsilon=0.05, degree_min=1)
        with self.assertRaises(ArgumentError):
            SampleSpec(n=2, L=4, epsilon=0.05, degree_max=5)
        with self.assertRaises(ArgumentError):
            SampleSpec(n=3, L=4, epsilon=0.05)

    def test_constraint_and_epsilon(self):
        spec = SampleSpec(n=2, L=4, epsilon=0.05, mode='quermass', j=1)
        self.assertEqual(spec.constraint, 1)
        self.assertEqual(spec.with_epsilon(0.01).epsilon, 0.01)
        self.assertEqual(SampleSpec(n=1, L=3, epsilon=0.1).constraint, 'volume')


class ConstantsTest(SimpleTestCase):
    """Stability and expansion constants"""

    def test_known_values(self):
        self.assertAlmostEqual(VO.volume_stability_constant(2, 0), 1 / 18, places=15)
        self.assertAlmostEqual(VO.volume_stability_constant(2, 1), 1 / 18, places=15)
        self.assertAlmostEqual(VO.volume_stability_constant(1, 0), 1 / 8, places=15)
        self.assertAlmostEqual(VO.quermass_stability_constant(2, 1, 0), 1 / 18, places=15)
        self.assertAlmostEqual(VO.expansion_constant(2, 0), 0.5, places=15)
        self.assertAlmostEqual(VO.expansion_constant(2, 1, 0), 0.5, places=15)

    def test_order_errors(self):
        with self.assertRaises(ArgumentError):
            VO.volume_stability_constant(2, 2)
        with self.assertRaises(ArgumentError):
            VO.quermass_stability_constant(2, 1, 1)


class SamplingTest(SimpleTestCase):
    """Random constrained samples"""

    def test_volume_sample_meets_constraints(self):
        spec = SampleSpec(n=2, L=6, epsilon=0.05, seed=7)
        omega = VO.sample_set(spec, sample_rng(spec, 0))
        self.assertGreaterEqual(omega.w2_norm, 0.045)
        self.assertLessEqual(omega.w2_norm, 0.05)
        self.assertLess(abs(FO.volume(omega) / FO.ball_functional(2, -1) - 1.0), 1e-9)
        self.assertLess(np.linalg.norm(FO.barycenter(omega)), 1e-8)

    def test_quermass_sample_meets_constraints(self):
        spec = SampleSpec(n=2, L=4, epsilon=0.05, mode='quermass', j=1, seed=2)
        omega = VO.sample_set(spec, sample_rng(spec, 0))
        self.assertLess(abs(FO.curvature_integral(omega, 1) / FO.ball_functional(2, 1) - 1.0), 1e-9)
        self.assertLessEqual(omega.w2_norm, 0.05)

    def test_circle_sample(self):
        spec = SampleSpec(n=1, L=6, epsilon=0.1, seed=1)
        omega = VO.sample_set(spec, sample_rng(spec, 3))
        self.assertGreaterEqual(omega.w2_norm, 0.09)
        self.assertLessEqual(omega.w2_norm, 0.1)

    def test_deterministic_per_index(self):
        spec = SampleSpec(n=1, L=4, epsilon=0.05, seed=11)
        first = VO.sample_set(spec, sample_rng(spec, 0))
        again = VO.sample_set(spec, sample_rng(spec, 0))
        other = VO.sample_set(spec, sample_rng(spec, 1))
        np.testing.assert_array_equal(first.u.coeffs, again.u.coeffs)
        self.assertFalse(np.array_equal(first.u.coeffs[: other.u.coeffs.size], other.u.coeffs))

    def test_gives_up_after_redraws(self):
        spec = SampleSpec(n=1, L=3, epsilon=0.05)
        with patch.object(VO, '_check_constraints', side_effect=AccuracyError("drift")):
            with self.assertLogs('verify.operations', level='WARNING'):
                with self.assertRaises(IterationError):
                    VO.sample_set(spec, sample_rng(spec, 0))

    @override_settings(QUERMASS={**settings.QUERMASS, 'WORKERS': 3})
    def test_pool_keeps_index_order(self):
        self.assertEqual(run_in_pool(7, lambda i: i * i), [i * i for i in range(7)])


class SampleWiseCheckTest(SimpleTestCase):
    """Spectral gap, quadratic lower bound and integral identities"""

    def test_spectral_gap_on_degree_two(self):
        omega = FO.normalize(zonal_set(2, 2, 0.02), 'volume')
        tight = VO.check_spectral_gap(omega, c=0.0)
        self.assertLess(abs(tight), 1e-3 * SBO.gradient_norm_squared(omega.u))
        self.assertGreater(VO.check_spectral_gap(omega), 0.0)

    def test_spectral_gap_on_degree_three(self):
        omega = zonal_set(2, 3, 0.02)
        margin = VO.check_spectral_gap(omega, c=0.0)
        self.assertAlmostEqual(margin, 6 * 0.02 ** 2, delta=1e-12)

    def test_spectral_gap_on_samples(self):
        spec = SampleSpec(n=2, L=5, epsilon=0.03, seed=4)
        for index in range(2):
            self.assertGreaterEqual(VO.check_spectral_gap(VO.sample_set(spec, sample_rng(spec, index))), 0.0)

    def test_spectral_gap_on_surface_area_samples(self):
        spec = SampleSpec(n=2, L=6, epsilon=0.02, seed=4, mode='quermass', j=0)
        for index in range(2):
            self.assertGreaterEqual(VO.check_spectral_gap(VO.sample_set(spec, sample_rng(spec, index))), 0.0)

    def test_sphere_margins_vanish(self):
        ball = NearlySphericalSet.ball(2, 4)
        self.assertAlmostEqual(VO.check_quadratic_lower_bound(ball, 0), 0.0, delta=1e-12)
        self.assertAlmostEqual(VO.check_spectral_gap(ball), 0.0, delta=1e-15)
        self.assertAlmostEqual(VO.predicted_excess(ball, 1), 0.0, delta=1e-15)

    def test_quadratic_lower_bound_on_samples(self):
        spec = SampleSpec(n=2, L=4, epsilon=0.05, seed=9)
        omega = VO.sample_set(spec, sample_rng(spec, 0))
        for k in (0, 1):
            self.assertGreaterEqual(VO.check_quadratic_lower_bound(omega, k), 0.0)
        spec = SampleSpec(n=2, L=4, epsilon=0.05, seed=9, mode='quermass', j=0)
        omega = VO.sample_set(spec, sample_rng(spec, 0))
        self.assertGreaterEqual(VO.check_quadratic_lower_bound(omega, 1, 0), 0.0)

    def test_predicted_excess_on_degree_two(self):
        omega = FO.normalize(zonal_set(2, 2, 0.005), 'volume')
        for k in (0, 1):
            actual = FO.curvature_integral(omega, k) - FO.ball_functional(2, k)
            self.assertLess(abs(VO.predicted_excess(omega, k) / actual - 1.0), 0.05)

    def test_taylor_remainder_constant_is_stable(self):
        rng = np.random.default_rng(0)
        base = VO.random_perturbation(2, 4, rng, 0.08)
        small = NearlySphericalSet(base.u.with_coeffs(base.u.coeffs * 0.01 / base.w2_norm))
        for m in (1, 2, 3):
            coarse, fine = VO.taylor_remainder_constant(base, m), VO.taylor_remainder_constant(small, m)
            self.assertLess(max(coarse, fine) / min(coarse, fine), 2.0)

    def test_divergence_identity(self):
        omega = VO.random_perturbation(2, 5, np.random.default_rng(1), 0.1)
        self.assertLess(VO.divergence_identity_error(omega, 1), 1e-8)
        self.assertLess(VO.divergence_identity_error(omega, 2), 1e-12)
        with self.assertRaises(ArgumentError):
            VO.divergence_identity_error(omega, 0)

    def test_ibp_remainder(self):
        omega = VO.random_perturbation(2, 5, np.random.default_rng(2), 0.1)
        for m in (0, 1):
            remainder, _ = VO.ibp_remainder(omega, m)
            self.assertLess(abs(remainder), 1e-10)
        remainder, constant = VO.ibp_remainder(omega, 2)
        self.assertTrue(np.isfinite(constant))
        with self.assertRaises(ArgumentError):
            VO.ibp_remainder(omega, 3)

    def test_asymmetry_gradient_bound(self):
        spec = SampleSpec(n=2, L=4, epsilon=0.05, seed=6)
        omega = VO.sample_set(spec, sample_rng(spec, 0))
        self.assertGreaterEqual(VO.check_asymmetry_gradient_bound(omega), 0.0)

    def test_asymmetry_gradient_bound_without_volume_normalization(self):
        spec = SampleSpec(n=2, L=6, epsilon=0.02, seed=6, mode='quermass', j=0)
        for index in range(2):
            omega = VO.sample_set(spec, sample_rng(spec, index))
            self.assertGreater(abs(FO.volume(omega) / FO.ball_functional(2, -1) - 1.0), 0.0)
            self.assertGreaterEqual(VO.check_asymmetry_gradient_bound(omega), 0.0)

    def test_sup_bound(self):
        for n, L in ((1, 6), (2, 4)):
            omega = FO.normalize(VO.random_perturbation(n, L, np.random.default_rng(n), 0.1), 'volume')
            self.assertGreaterEqual(VO.check_sup_bound(omega), 0.0)


class QuadraticFitTest(SimpleTestCase):
    """Second-order coefficients of I_k(Ω) − I_k(B)"""

    def test_designed_family(self):
        omegas = [
            FO.normalize(zonal_set(2, ell, amplitude, L=4), 'volume')
            for ell, amplitude in ((2, 0.002), (4, 0.0005), (2, 0.001))
        ]
        for k in (0, 1):
            rows = [
                SampleRow(
                    index=i, seed=0, epsilon=0.005, w2_norm=omega.w2_norm, delta=0.0, alpha=0.0,
                    u_l2_sq=SBO.l2_norm_squared(omega.u), grad_l2_sq=SBO.gradient_norm_squared(omega.u),
                    u_sup=omega.sup_norms[0],
                    excess=FO.curvature_integral(omega, k) - FO.ball_functional(2, k),
                )
                for i, omega in enumerate(omegas)
            ]
            c_u, c_g = VO.fit_quadratic_form(rows)
            K = VO.expansion_constant(2, k)
            self.assertLess(abs(c_g / K - 1.0), 0.05)
            self.assertLess(abs(c_u / (-2 * K) - 1.0), 0.05)


class StabilityCheckTest(SimpleTestCase):
    """Deficit versus asymmetry on random samples"""

    def test_volume_constrained_surface(self):
        report = VO.check_volume_constrained_stability(SampleSpec(n=2, L=4, epsilon=0.05, count=2, seed=3), 0)
        self.assertTrue(report.passed)
        self.assertEqual([row.index for row in report.rows], [0, 1])
        self.assertGreaterEqual(report.min_margin, 0.0)
        self.assertAlmostEqual(report.eta, 0.2 / 18, places=15)
        self.assertGreaterEqual(report.fitted['quadratic_bound_min_margin'], 0.0)

    def test_volume_constrained_curve(self):
        report = VO.check_volume_constrained_stability(SampleSpec(n=1, L=6, epsilon=0.05, count=2, seed=1), 0)
        self.assertTrue(report.passed)
        for row in report.rows:
            self.assertGreater(row.delta, 0.0)
            self.assertGreaterEqual(row.alpha, 0.0)

    def test_quermass_constrained(self):
        spec = SampleSpec(n=2, L=4, epsilon=0.05, count=2, seed=2, mode='quermass', j=0)
        report = VO.check_quermass_constrained_stability(spec, 0, 1)
        self.assertTrue(report.passed)
        self.assertGreaterEqual(report.fitted['gradient_coefficient'], report.fitted['gradient_coefficient_lower_constant'])

    def test_sphere_sample_has_zero_margin(self):
        spec = SampleSpec(n=2, L=4, epsilon=0.05, count=1)
        with patch.object(VO, 'sample_set', return_value=NearlySphericalSet.ball(2, 4)):
            report = VO.check_volume_constrained_stability(spec, 1)
        row = report.rows[0]
        self.assertTrue(report.passed)
        self.assertLess(abs(row.delta), 1e-12)
        self.assertLess(row.alpha, 1e-8)
        self.assertLess(abs(row.margin), 1e-12)

    def test_mode_mismatch(self):
        with self.assertRaises(ArgumentError):
            VO.check_volume_constrained_stability(SampleSpec(n=2, L=4, epsilon=0.05, mode='quermass', j=0), 1)
        with self.assertRaises(ArgumentError):
            VO.check_quermass_constrained_stability(SampleSpec(n=2, L=4, epsilon=0.05), 0, 1)

    def test_failure_names_samples(self):
        spec = SampleSpec(n=2, L=4, epsilon=0.05, count=2, seed=5)
        with patch.object(VO, 'evaluate_sample', side_effect=lambda s, i, k, m: fake_row(i, 0.0, 0.5)):
            with self.assertRaises(VerificationFailure) as caught:
                VO.check_volume_constrained_stability(spec, 0)
            self.assertEqual(caught.exception.seeds, [(5, 0), (5, 1)])
            report = VO.check_volume_constrained_stability(spec, 0, raise_on_failure=False)
        self.assertFalse(report.passed)
        self.assertLess(report.min_margin, 0.0)

    def test_quadratic_bound_gates_the_report(self):
        spec = SampleSpec(n=2, L=4, epsilon=0.05, count=2, seed=5)
        with patch.object(VO, 'evaluate_sample', side_effect=lambda s, i, k, m: fake_row(i, 1e-4, 1e-3, excess=-1e-3)):
            with self.assertLogs('verify.operations', level='ERROR') as logs:
                report = VO.check_volume_constrained_stability(spec, 1, raise_on_failure=False)
        self.assertGreater(report.min_margin, 0.0)
        self.assertLess(report.fitted['quadratic_bound_min_margin'], 0.0)
        self.assertFalse(report.passed)
        self.assertEqual(report.failures, [(5, 0), (5, 1)])
        self.assertTrue(any('quadratic lower bound' in line for line in logs.output))

    def test_deficit_ratio_gates_the_report(self):
        spec = SampleSpec(n=2, L=4, epsilon=0.05, count=2, seed=5)
        with patch.object(VO, 'evaluate_sample', side_effect=lambda s, i, k, m: fake_row(i, 1e-6, 1e-4, excess=1e-2)):
            report = VO.check_volume_constrained_stability(spec, 1, raise_on_failure=False)
        self.assertGreater(report.min_margin, 0.0)
        self.assertGreaterEqual(report.fitted['quadratic_bound_min_margin'], 0.0)
        self.assertLess(report.fitted['delta_over_u_l2_min'], report.fitted['delta_over_u_l2_lower_constant'])
        self.assertFalse(report.passed)
        self.assertEqual(report.failures, [(5, 0), (5, 1)])

    def test_volume_constrained_surface_small_epsilon(self):
        report = VO.check_volume_constrained_stability(SampleSpec(n=2, L=6, epsilon=0.01, count=3, seed=1), 1)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.constant, 1 / 18, places=15)
        self.assertGreaterEqual(report.min_margin, 0.0)
        self.assertGreaterEqual(report.fitted['delta_over_u_l2_min'], report.fitted['delta_over_u_l2_lower_constant'] * 0.9)


class SupNormControlTest(SimpleTestCase):
    """Sup norm against the deficit as ε shrinks"""

    def test_curve_degree_two_family(self):
        spec = SampleSpec(n=1, L=2, epsilon=0.04, count=2, seed=1)
        report = VO.check_sup_norm_control(spec, 0, epsilons=(0.04, 0.02, 0.01))
        self.assertTrue(report.passed)
        self.assertEqual(report.epsilons, [0.04, 0.02, 0.01])
        self.assertIsNone(report.log_constant)
        self.assertEqual(report.excluded, 0)

    def test_surface(self):
        spec = SampleSpec(n=2, L=3, epsilon=0.04, count=1, seed=2)
        report = VO.check_sup_norm_control(spec, 0, epsilons=(0.02, 0.04))
        self.assertTrue(report.passed)
        self.assertEqual(report.epsilons, [0.04, 0.02])
        self.assertGreater(report.log_constant, 0.0)

    def test_rejects_quermass_mode(self):
        with self.assertRaises(ArgumentError):
            VO.check_sup_norm_control(SampleSpec(n=2, L=3, epsilon=0.04, mode='quermass', j=0), 0)


class PropertySuiteTest(SimpleTestCase):
    """Named property checks"""

    def test_all_pass(self):
        results = VO.run_property_suite(n_values=(1, 2), L=4, count=2, seed=0)
        names = [result.name for result in results]
        self.assertIn('ball_values_n1', names)
        self.assertIn('divergence_identity', names)
        self.assertIn('spectral_gap_i0_n2', names)
        failed = [(r.name, r.detail) for r in results if not r.passed]
        self.assertEqual(failed, [])
