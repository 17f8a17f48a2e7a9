# apps/verify/operations.py
from concurrent.futures import ThreadPoolExecutor
from math import comb, e as EULER
import logging
import traceback

import numpy as np
from django.conf import settings
from scipy.optimize import brentq

from asymmetry.operations import AsymmetryOperations
from functionals.models import DeficitSpec
from functionals.operations import FunctionalOperations, default_grid
from geometry.models import NearlySphericalSet
from geometry.operations import GeometryOperations
from sphere_basis.models import SphericalFunction, area_of_unit_sphere, coefficient_count
from sphere_basis.operations import SphereBasisOperations
from symfunc.operations import SymmetricFunctionOperations
from utils.exceptions import (
    AccuracyError,
    ArgumentError,
    IterationError,
    QuermassError,
    VerificationFailure,
)
from .models import CheckResult, DeficitReport, SampleRow, SampleSpec, SupNormReport

logger = logging.getLogger(__name__)

MAX_REDRAWS = 20
TARGET_FRACTION = 0.95
HIDDEN_CONSTANT = 10.0
ETA_FRACTION = 0.2
MARGIN_TOLERANCE = 1e-12
SWEEP_EPSILONS = (0.08, 0.04, 0.02, 0.01)
ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


def sample_rng(spec, index):
    """Generator for sample ``index``; independent of scheduling order."""
    return np.random.default_rng([spec.seed, index])


def run_in_pool(count, task):
    """Evaluate task(0..count−1) on the worker pool, results in index order."""
    workers = max(1, int(settings.QUERMASS['WORKERS']))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, range(count)))


class VerificationOperations:
    """Random sampling and empirical checks of the stability inequalities."""

    # -- constants -------------------------------------------------------

    @staticmethod
    def volume_stability_constant(n, k):
        """Leading constant of δ_{k,−1} ≥ C α² under volume and barycenter constraints."""
        if not 0 <= k < n:
            raise ArgumentError(f"Need 0 ≤ k < n, got k={k}, n={n}")
        return (n - k) * (k + 1) / (2.0 * n * (n + 1) ** 2)

    @staticmethod
    def quermass_stability_constant(n, k, j):
        """Leading constant of δ_{k,j} ≥ C α² under I_j and barycenter constraints."""
        if not 0 <= j < k < n:
            raise ArgumentError(f"Need 0 ≤ j < k < n, got j={j}, k={k}, n={n}")
        return n * (n - k) * (k - j) / (4.0 * (n + 1) ** 2)

    @staticmethod
    def expansion_constant(n, k, j=-1):
        """K with I_k(Ω) − I_k(B) ≈ K (‖∇u‖² − n‖u‖²) when I_j(Ω) = I_j(B)."""
        return comb(n, k) * (n - k) * (k - j) / (2.0 * n)

    # -- sampling --------------------------------------------------------

    @staticmethod
    def random_perturbation(n, L, rng, w2_target, degree_min=2):
        """Unconstrained set with i.i.d. normal coefficients of degrees ≥ degree_min."""
        degrees = SphericalFunction.zeros(n, L).degrees
        coeffs = np.where(degrees >= degree_min, rng.standard_normal(degrees.size), 0.0)
        probe = SphericalFunction(n, L, 1e-3 * coeffs / np.linalg.norm(coeffs))
        scale = w2_target / max(GeometryOperations.scan_norms(probe))
        return NearlySphericalSet(probe.with_coeffs(scale * probe.coeffs))

    @staticmethod
    def constrain(spec, u):
        """Normalize, recenter, then normalize once more."""
        omega = FunctionalOperations.normalize(NearlySphericalSet(u), spec.constraint)
        omega = FunctionalOperations.recenter(omega)
        return FunctionalOperations.normalize(omega, spec.constraint)

    @staticmethod
    def _check_constraints(spec, omega):
        n = spec.n
        j = -1 if spec.mode == 'volume' else spec.j
        drift = FunctionalOperations.curvature_integral(omega, j) / FunctionalOperations.ball_functional(n, j) - 1.0
        if abs(drift) >= 1e-9:
            raise AccuracyError(f"Constraint drift {drift:.3e} after projection")
        bar = np.linalg.norm(FunctionalOperations.barycenter(omega))
        if bar >= 1e-8:
            raise AccuracyError(f"Barycenter {bar:.3e} after projection")
        if not 0.9 * spec.epsilon <= omega.w2_norm <= spec.epsilon:
            raise AccuracyError(f"W^{{2,∞}} norm {omega.w2_norm:.4e} misses [{0.9 * spec.epsilon}, {spec.epsilon}]")

    @staticmethod
    def sample_set(spec, rng):
        """Random constrained set whose W^{2,∞} norm lands in [0.9ε, ε]."""
        n, L = spec.n, spec.L
        degrees = SphericalFunction.zeros(n, L).degrees
        mask = (degrees >= spec.degree_min) & (degrees <= spec.top_degree)
        target = TARGET_FRACTION * spec.epsilon
        for attempt in range(MAX_REDRAWS):
            coeffs = np.zeros(coefficient_count(n, L))
            coeffs[mask] = rng.standard_normal(int(mask.sum()))
            direction = coeffs / np.linalg.norm(coeffs)
            try:
                probe = 1e-3
                base = max(GeometryOperations.scan_norms(SphericalFunction(n, L, probe * direction))) / probe
                s0 = target / base
                cache = {}

                def constrained(s):
                    if s not in cache:
                        cache[s] = VerificationOperations.constrain(spec, SphericalFunction(n, L, s * direction))
                    return cache[s]

                def excess(s):
                    return constrained(s).w2_norm - target

                lo, hi = 0.9 * s0, 1.1 * s0
                for _ in range(5):
                    if excess(lo) >= 0.0:
                        lo *= 0.8
                    elif excess(hi) <= 0.0:
                        hi *= 1.25
                    else:
                        break
                s = brentq(excess, lo, hi, xtol=1e-6 * s0)
                omega = constrained(s)
                VerificationOperations._check_constraints(spec, omega)
                return omega
            except (QuermassError, ValueError) as e:
                logger.warning(f"Sample draw {attempt + 1} rejected: {str(e)}")
        raise IterationError(f"No admissible sample after {MAX_REDRAWS} draws for {spec}")

    # -- sample-wise checks ----------------------------------------------

    @staticmethod
    def check_spectral_gap(omega, eps=None, c=HIDDEN_CONSTANT):
        """‖∇u‖² − 2(n+1)(1 − cε)‖u‖²; non-negative for constrained, centered sets."""
        n = omega.sphere_dim
        eps = omega.w2_norm if eps is None else eps
        u2 = SphereBasisOperations.l2_norm_squared(omega.u)
        g2 = SphereBasisOperations.gradient_norm_squared(omega.u)
        return g2 - 2.0 * (n + 1) * (1.0 - c * eps) * u2

    @staticmethod
    def predicted_excess(omega, k, j=-1):
        """Second-order prediction of I_k(Ω) − I_k(B) under the I_j constraint."""
        n = omega.sphere_dim
        u2 = SphereBasisOperations.l2_norm_squared(omega.u)
        g2 = SphereBasisOperations.gradient_norm_squared(omega.u)
        return VerificationOperations.expansion_constant(n, k, j) * (g2 - n * u2)

    @staticmethod
    def check_quadratic_lower_bound(omega, k, j=-1, eps=None):
        """Margin of the quadratic lower bound on I_k(Ω) − I_k(B).

        j = −1: K((1 − 10ε)‖u‖² + (1/2 − 10ε)‖∇u‖²).
        j ≥ 0: (K/2)(1 − 10ε)‖∇u‖².
        """
        n = omega.sphere_dim
        eps = omega.w2_norm if eps is None else eps
        K = VerificationOperations.expansion_constant(n, k, j)
        u2 = SphereBasisOperations.l2_norm_squared(omega.u)
        g2 = SphereBasisOperations.gradient_norm_squared(omega.u)
        excess = FunctionalOperations.curvature_integral(omega, k) - FunctionalOperations.ball_functional(n, k)
        c = HIDDEN_CONSTANT
        if j == -1:
            bound = K * ((1.0 - c * eps) * u2 + (0.5 - c * eps) * g2)
        else:
            bound = 0.5 * K * (1.0 - c * eps) * g2
        return excess - bound

    @staticmethod
    def fit_quadratic_form(rows):
        """Least-squares (c_u, c_g) in excess ≈ c_u ‖u‖² + c_g ‖∇u‖²."""
        X = np.array([[row.u_l2_sq, row.grad_l2_sq] for row in rows])
        y = np.array([row.excess for row in rows])
        coeffs, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
        if rank < 2:
            logger.warning("Quadratic-form fit is rank deficient; samples share one norm ratio")
        return float(coeffs[0]), float(coeffs[1])

    @staticmethod
    def taylor_remainder_constant(omega, m):
        """Smallest C with |D^{−m} − (1 − mu + m(m+1)u²/2 − m|∇u|²/2)| ≤ Cε(u² + |∇u|²) on the scan grid."""
        n, L = omega.sphere_dim, omega.max_degree
        grid = SphereBasisOperations.make_grid(n, SphereBasisOperations.scan_resolution(n, L))
        jet = SphereBasisOperations.evaluate_jet(omega.u, grid.nodes)
        u = jet.value
        g2 = np.sum(jet.gradient ** 2, axis=-1)
        D = np.sqrt(g2 + (1.0 + u) ** 2)
        approx = 1.0 - m * u + 0.5 * m * (m + 1) * u ** 2 - 0.5 * m * g2
        remainder = np.abs(D ** (-m) - approx)
        eps = max(np.max(np.abs(u)), np.sqrt(np.max(g2)))
        denom = u ** 2 + g2
        mask = denom > 1e-8 * np.max(denom)
        return float(np.max(remainder[mask] / (eps * denom[mask])))

    @staticmethod
    def ibp_remainder(omega, m, grid=None):
        """R = ∫ uᵢuⱼ[T_m]ʲᵢ(D²u) − ((m+2)/2)∫|∇u|²σ_m(D²u), and |R|/(ε‖∇u‖²)."""
        n = omega.sphere_dim
        if not 0 <= m <= n:
            raise ArgumentError(f"Order m={m} outside 0..{n}")
        grid = grid or default_grid(omega)
        jet = SphereBasisOperations.evaluate_jet(omega.u, grid.nodes)
        g, H = jet.gradient, jet.hessian
        T = SymmetricFunctionOperations.newton_tensor(H, m)
        sigma = SymmetricFunctionOperations.sigma_of_matrix(H, m)
        lhs = grid.integrate(np.einsum('ni,nji,nj->n', g, T, g))
        rhs = 0.5 * (m + 2) * grid.integrate(np.sum(g ** 2, axis=-1) * sigma)
        remainder = float(lhs - rhs)
        scale = omega.w2_norm * SphereBasisOperations.gradient_norm_squared(omega.u)
        return remainder, (abs(remainder) / scale if scale > 0 else 0.0)

    @staticmethod
    def divergence_identity_error(omega, m=1, max_test_degree=4, grid=None):
        """Largest gap in ∫(∇ⱼφⁱ)[T_m]ʲᵢ = (n−m)∫φⁱuⱼ[T_{m−1}]ʲᵢ over harmonic test fields."""
        n = omega.sphere_dim
        if not 1 <= m <= n:
            raise ArgumentError(f"Order m={m} outside 1..{n}")
        grid = grid or default_grid(omega)
        jet = SphereBasisOperations.evaluate_jet(omega.u, grid.nodes)
        T = SymmetricFunctionOperations.newton_tensor(jet.hessian, m)
        T_prev = SymmetricFunctionOperations.newton_tensor(jet.hessian, m - 1)
        worst = 0.0
        for index, (ell, _) in enumerate(SphereBasisOperations.degree_orders(n, max_test_degree)):
            if ell == 0:
                continue
            coeffs = np.zeros(coefficient_count(n, max_test_degree))
            coeffs[index] = 1.0
            test = SphereBasisOperations.evaluate_jet(SphericalFunction(n, max_test_degree, coeffs), grid.nodes)
            fields = [(test.gradient, test.hessian)]
            if n == 2:
                fields.append((test.gradient @ ROTATION.T, ROTATION @ test.hessian))
            for phi, P in fields:
                lhs = grid.integrate(np.einsum('nij,nji->n', P, T))
                rhs = (n - m) * grid.integrate(np.einsum('ni,nj,nji->n', phi, jet.gradient, T_prev))
                worst = max(worst, abs(lhs - rhs))
        return float(worst)

    @staticmethod
    def check_asymmetry_gradient_bound(omega, grid=None):
        """((n+1)²/(n²A))‖∇u‖²(1 + 10ε) − (|Ω Δ B_Ω| / |B_Ω|)², B_Ω the centered ball of equal volume."""
        n = omega.sphere_dim
        grid = grid or default_grid(omega)
        r = FunctionalOperations.matching_ball_radius(omega, -1, grid)
        rho = omega.radial_values(grid)
        ratio = AsymmetryOperations.symdiff_radial(rho, np.full(grid.size, r), grid) / FunctionalOperations.ball_functional(n, -1, r)
        eps = max(omega.sup_norms[0], omega.sup_norms[1])
        bound = (n + 1) ** 2 / (n * n * area_of_unit_sphere(n)) * SphereBasisOperations.gradient_norm_squared(omega.u)
        return bound * (1.0 + HIDDEN_CONSTANT * eps) - ratio ** 2

    @staticmethod
    def check_sup_bound(omega):
        """Zero-mean sup control of w = ((1+u)^{n+1} − 1)/(n+1); needs Vol(Ω) = Vol(B)."""
        n, L = omega.sphere_dim, omega.max_degree
        scan = SphereBasisOperations.make_grid(n, SphereBasisOperations.scan_resolution(n, L))
        grid = default_grid(omega)

        def w_and_gradient(nodes):
            jet = SphereBasisOperations.evaluate_jet(omega.u, nodes)
            rho = 1.0 + jet.value
            w = (rho ** (n + 1) - 1.0) / (n + 1)
            return w, np.linalg.norm(jet.gradient, axis=-1) * rho ** n

        w_scan, grad_scan = w_and_gradient(scan.nodes)
        _, grad = w_and_gradient(grid.nodes)
        sup_w = np.max(np.abs(w_scan))
        if n == 1:
            return float(np.pi * grid.integrate(grad) - sup_w)
        l2 = grid.integrate(grad ** 2)
        if l2 == 0.0:
            return 0.0
        return float(4.0 * l2 * np.log(8.0 * EULER * np.max(grad_scan) ** 2 / l2) - sup_w ** 2)

    # -- sample evaluation and stability checks ---------------------------

    @staticmethod
    def evaluate_sample(spec, index, k, m, with_alpha=True):
        rng = sample_rng(spec, index)
        omega = VerificationOperations.sample_set(spec, rng)
        n = spec.n
        delta = FunctionalOperations.deficit(omega, DeficitSpec(k, m))
        alpha = float('nan')
        if with_alpha:
            try:
                alpha = AsymmetryOperations.fraenkel_asymmetry(omega, seed=index).alpha
            except IterationError as e:
                logger.warning(f"Sample {index}: using best-so-far asymmetry {e.best.alpha:.3e}")
                alpha = e.best.alpha
        excess = FunctionalOperations.curvature_integral(omega, k) - FunctionalOperations.ball_functional(n, k)
        return SampleRow(
            index=index,
            seed=spec.seed,
            epsilon=spec.epsilon,
            w2_norm=omega.w2_norm,
            delta=delta,
            alpha=alpha,
            u_l2_sq=SphereBasisOperations.l2_norm_squared(omega.u),
            grad_l2_sq=SphereBasisOperations.gradient_norm_squared(omega.u),
            u_sup=omega.sup_norms[0],
            excess=excess,
        )

    @staticmethod
    def _stability_check(name, spec, k, m, constant, raise_on_failure):
        n = spec.n
        eta = ETA_FRACTION * constant
        try:
            rows = run_in_pool(spec.count, lambda i: VerificationOperations.evaluate_sample(spec, i, k, m))
        except Exception as e:
            logger.error(f"Error running {name} for {spec}: {str(e)}")
            logger.error(traceback.format_exc())
            raise
        for row in rows:
            row.margin = row.delta - (constant - eta) * row.alpha ** 2

        K = VerificationOperations.expansion_constant(n, k, m)
        area = area_of_unit_sphere(n)
        q = np.array([row.grad_l2_sq - n * row.u_l2_sq for row in rows])
        excess = np.array([row.excess for row in rows])
        gradient_coefficient = float(excess @ q / (q @ q)) if q @ q > 0 else float('nan')
        c_u, c_g = VerificationOperations.fit_quadratic_form(rows) if len(rows) >= 2 else (float('nan'),) * 2
        c = HIDDEN_CONSTANT
        if m == -1:
            quadratic = [
                row.excess - K * ((1 - c * row.w2_norm) * row.u_l2_sq + (0.5 - c * row.w2_norm) * row.grad_l2_sq)
                for row in rows
            ]
        else:
            quadratic = [row.excess - 0.5 * K * (1 - c * row.w2_norm) * row.grad_l2_sq for row in rows]
        ratios = [row.delta / row.u_l2_sq for row in rows if row.u_l2_sq > 0]
        lower_constant = K / (comb(n, k) * area)
        ratio_floor = lower_constant * max(0.0, 1.0 - c * spec.epsilon)
        fitted = {
            'delta_over_u_l2_min': min(ratios) if ratios else float('nan'),
            'delta_over_u_l2_lower_constant': lower_constant,
            'gradient_coefficient': gradient_coefficient,
            'gradient_coefficient_expected': K,
            'gradient_coefficient_lower_constant': 0.5 * K,
            'u_l2_coefficient_lsq': c_u,
            'grad_l2_coefficient_lsq': c_g,
            'u_l2_coefficient_expected': -n * K,
            'quadratic_bound_min_margin': float(min(quadratic)),
        }
        below_quadratic = [row.index for row, q in zip(rows, quadratic) if q < -MARGIN_TOLERANCE]
        below_ratio = [
            row.index for row in rows
            if row.u_l2_sq > 0 and row.delta < ratio_floor * row.u_l2_sq - MARGIN_TOLERANCE
        ]
        if below_quadratic:
            logger.error(f"{name}: quadratic lower bound violated by samples {below_quadratic}")
        if below_ratio:
            logger.error(f"{name}: δ/‖u‖² below {ratio_floor:.4e} for samples {below_ratio}")
        failures = [
            (row.seed, row.index) for row in rows
            if row.margin < -MARGIN_TOLERANCE or row.index in below_quadratic or row.index in below_ratio
        ]
        gradient_ok = m < 0 or not gradient_coefficient < 0.5 * K
        if not gradient_ok:
            logger.error(f"{name}: gradient coefficient {gradient_coefficient:.4e} below {0.5 * K:.4e}")
        report = DeficitReport(
            check=name,
            n=n,
            k=k,
            m=m,
            epsilon=spec.epsilon,
            constant=constant,
            eta=eta,
            rows=rows,
            min_margin=float(min(row.margin for row in rows)),
            fitted=fitted,
            passed=not failures and gradient_ok,
            failures=failures,
        )
        logger.info(
            f"{name}: n={n} k={k} m={m} eps={spec.epsilon} samples={len(rows)} "
            f"min margin={report.min_margin:.3e} passed={report.passed}"
        )
        if not report.passed and raise_on_failure:
            raise VerificationFailure(f"{name} failed for samples {failures}", seeds=failures, report=report)
        return report

    @staticmethod
    def check_volume_constrained_stability(spec, k, raise_on_failure=True):
        """δ_{k,−1} ≥ (C − η)α² for volume-normalized, centered samples."""
        if spec.mode != 'volume':
            raise ArgumentError("Volume stability needs sample mode 'volume'")
        constant = VerificationOperations.volume_stability_constant(spec.n, k)
        return VerificationOperations._stability_check('volume_constrained_stability', spec, k, -1, constant, raise_on_failure)

    @staticmethod
    def check_quermass_constrained_stability(spec, j, k, raise_on_failure=True):
        """δ_{k,j} ≥ (C − η)α² for I_j-normalized, centered samples."""
        if spec.mode != 'quermass' or spec.j != j:
            raise ArgumentError(f"Quermass stability needs sample mode 'quermass' with j={j}")
        constant = VerificationOperations.quermass_stability_constant(spec.n, k, j)
        return VerificationOperations._stability_check('quermass_constrained_stability', spec, k, j, constant, raise_on_failure)

    @staticmethod
    def sup_norm_report(n, k, epsilons, levels, growth_limit=1.5):
        """Reduce per-level sample rows (coarsest ε first) to a SupNormReport."""
        log_constant = None
        if n == 2:
            positive = [row.delta for row in levels[0] if row.delta > 0.0]
            log_constant = EULER * max(positive) if positive else float('nan')

        def branch(delta):
            return np.sqrt(delta) if n == 1 else delta * np.log(log_constant / delta)

        max_ratios, excluded = [], 0
        for rows in levels:
            ratios = []
            for row in rows:
                if row.delta <= 0.0:
                    excluded += 1
                    continue
                ratios.append(row.u_sup ** n / branch(row.delta))
            max_ratios.append(float(max(ratios)) if ratios else float('nan'))
        passed = all(
            later <= growth_limit * earlier for earlier, later in zip(max_ratios, max_ratios[1:])
        )
        if excluded:
            logger.warning(f"{excluded} samples with non-positive deficit left out of the sup-norm ratios")
        logger.info(f"sup_norm_control: n={n} k={k} max ratios {np.round(max_ratios, 6)} passed={passed}")
        return SupNormReport(n, k, list(epsilons), max_ratios, log_constant, growth_limit, passed, excluded)

    @staticmethod
    def check_sup_norm_control(spec, k, epsilons=SWEEP_EPSILONS, growth_limit=1.5, raise_on_failure=True):
        """‖u‖_∞^n / branch(δ_{k,−1}) stays bounded as ε shrinks.

        branch(δ) = δ^{1/2} for n = 1 and δ log(A/δ) for n = 2, with A fixed
        at e times the largest deficit of the coarsest level.
        """
        n = spec.n
        if spec.mode != 'volume' or not 0 <= k < n:
            raise ArgumentError("Sup-norm control needs volume mode and 0 ≤ k < n")
        epsilons = sorted(epsilons, reverse=True)
        levels = []
        for eps in epsilons:
            level_spec = spec.with_epsilon(eps)
            levels.append(run_in_pool(
                level_spec.count,
                lambda i, s=level_spec: VerificationOperations.evaluate_sample(s, i, k, -1, with_alpha=False),
            ))
        report = VerificationOperations.sup_norm_report(n, k, epsilons, levels, growth_limit)
        if not report.passed and raise_on_failure:
            raise VerificationFailure(
                f"Sup-norm ratio grows across epsilon levels: {report.max_ratios}", report=report
            )
        return report

    # -- property suite ----------------------------------------------------

    @staticmethod
    def run_property_suite(n_values=(1, 2), L=6, count=5, seed=0, resolution=None):
        """Named identity and accuracy checks; returns CheckResult records."""
        results = []

        def record(name, passed, detail):
            results.append(CheckResult(name, bool(passed), detail))
            log = logger.info if passed else logger.error
            log(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")

        rng = np.random.default_rng(seed)
        for n in n_values:
            grid = None if resolution is None else SphereBasisOperations.make_grid(n, resolution)
            area = area_of_unit_sphere(n)
            ball = NearlySphericalSet.ball(n, L)
            worst = max(
                abs(FunctionalOperations.curvature_integral(ball, k, grid) / (comb(n, k) * area) - 1.0)
                for k in range(n + 1)
            )
            record(f'ball_values_n{n}', worst <= 1e-12, f"max relative error {worst:.2e}")

            worst = 0.0
            for c in (-0.2, 0.3):
                sphere = NearlySphericalSet.ball(n, L, radius=1.0 + c)
                for k in range(n + 1):
                    for m in range(-1, k):
                        worst = max(worst, abs(FunctionalOperations.deficit(sphere, DeficitSpec(k, m), grid)))
            record(f'sphere_deficits_n{n}', worst <= 1e-12, f"max |δ| {worst:.2e}")

            samples = [VerificationOperations.random_perturbation(n, L, rng, 0.1) for _ in range(count)]
            worst = max(
                abs(FunctionalOperations.curvature_integral(s, n, grid, check_resolution=grid is not None) - area)
                for s in samples
            )
            record(f'topological_top_integral_n{n}', worst <= 1e-8, f"max |I_n − Area| {worst:.2e}")

            worst_integral, worst_deficit = 0.0, 0.0
            for s in samples[:2]:
                for r in (0.5, 2.0):
                    scaled = s.scaled(r)
                    for k in range(n + 1):
                        worst_integral = max(worst_integral, abs(
                            FunctionalOperations.curvature_integral(scaled, k, grid)
                            - r ** (n - k) * FunctionalOperations.curvature_integral(s, k, grid)
                        ))
                    worst_deficit = max(worst_deficit, abs(
                        FunctionalOperations.deficit(scaled, DeficitSpec(n, -1), grid)
                        - FunctionalOperations.deficit(s, DeficitSpec(n, -1), grid)
                    ))
            record(
                f'scaling_laws_n{n}',
                worst_integral <= 1e-10 and worst_deficit <= 1e-8,
                f"I_k error {worst_integral:.2e}, δ error {worst_deficit:.2e}",
            )

            constants = []
            for eps in (0.08, 0.01):
                base = samples[0]
                scaled = NearlySphericalSet(base.u.with_coeffs(base.u.coeffs * eps / base.w2_norm))
                constants.append(max(VerificationOperations.taylor_remainder_constant(scaled, m) for m in range(1, n + 3)))
            ratio = max(constants) / min(constants)
            record(f'taylor_remainder_n{n}', ratio <= 2.0, f"constants {constants[0]:.3f} → {constants[1]:.3f}")

            spec = SampleSpec(n=n, L=L, epsilon=0.02, count=count, seed=seed)
            margins = run_in_pool(count, lambda i, s=spec: VerificationOperations.check_spectral_gap(
                VerificationOperations.sample_set(s, sample_rng(s, i))))
            record(f'spectral_gap_n{n}', min(margins) >= 0.0, f"min margin {min(margins):.3e}")

            if n == 2:
                spec = SampleSpec(n=n, L=L, epsilon=0.02, count=count, seed=seed, mode='quermass', j=0)
                margins = run_in_pool(count, lambda i, s=spec: VerificationOperations.check_spectral_gap(
                    VerificationOperations.sample_set(s, sample_rng(s, i))))
                record('spectral_gap_i0_n2', min(margins) >= 0.0, f"min margin {min(margins):.3e}")

                closed_worst = 0.0
                for s in samples:
                    scaled = NearlySphericalSet(s.u.with_coeffs(s.u.coeffs * 3.0))
                    nodes = np.stack([rng.uniform(0.1, np.pi - 0.1, 20), rng.uniform(0, 2 * np.pi, 20)], axis=-1)
                    jet = SphereBasisOperations.evaluate_jet(scaled.u, nodes)
                    curvatures = GeometryOperations.principal_curvatures(jet)
                    for k in range(3):
                        expected = SymmetricFunctionOperations.sigma_of_eigenvalues(curvatures, k)
                        gap = np.abs(GeometryOperations.sigma_k_closed(jet, k) - expected) / np.maximum(1.0, np.abs(expected))
                        closed_worst = max(closed_worst, float(np.max(gap)))
                record('closed_form_vs_oracle', closed_worst <= 1e-10, f"max scaled gap {closed_worst:.2e}")

                worst = max(VerificationOperations.divergence_identity_error(s, 1, grid=grid) for s in samples)
                record('divergence_identity', worst <= 1e-8, f"max error {worst:.2e}")

                worst = max(abs(VerificationOperations.ibp_remainder(s, m, grid)[0]) for s in samples for m in (0, 1))
                record('ibp_remainder_exact_orders', worst <= 1e-10, f"max |R| {worst:.2e}")
        return results
