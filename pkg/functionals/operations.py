# apps/functionals/operations.py
from math import comb
import logging
import traceback

import numpy as np
from django.conf import settings

from geometry.models import NearlySphericalSet
from geometry.operations import GeometryOperations
from sphere_basis.models import area_of_unit_sphere
from sphere_basis.operations import SphereBasisOperations
from utils.exceptions import AccuracyError, ArgumentError, GeometryError, IterationError
from .models import DeficitSpec, TranslationResult

logger = logging.getLogger(__name__)

BRACKET = (0.1, 3.0)
ROOT_TOLERANCE = 1e-12
DEGREE_INFLATION = 4


def default_grid(omega, degree=None):
    n = omega.sphere_dim
    L = omega.max_degree if degree is None else degree
    return SphereBasisOperations.make_grid(n, SphereBasisOperations.default_resolution(n, L))


class FunctionalOperations:
    """Global functionals of nearly spherical sets."""

    @staticmethod
    def unit_ball_volume(n):
        return area_of_unit_sphere(n) / (n + 1)

    @staticmethod
    def ball_functional(n, k, radius=1.0):
        """I_k of the ball of the given radius; k = −1 gives its volume."""
        if k == -1:
            return FunctionalOperations.unit_ball_volume(n) * radius ** (n + 1)
        if not 0 <= k <= n:
            raise ArgumentError(f"Order k={k} outside −1..{n}")
        return comb(n, k) * area_of_unit_sphere(n) * radius ** (n - k)

    @staticmethod
    def _integral(omega, k, grid):
        if omega.max_degree > 0 and not SphereBasisOperations.supports_degree(grid, omega.max_degree):
            logger.warning(f"Grid resolution {grid.resolution} is below the degree of {omega}")
        jet = SphereBasisOperations.evaluate_jet(omega.u, grid.nodes)
        integrand = GeometryOperations.sigma_k_closed(jet, k) * GeometryOperations.area_element(jet)
        return float(grid.integrate(integrand))

    @staticmethod
    def curvature_integral(omega, k, grid=None, check_resolution=False):
        """I_k(Ω) = ∫_M σ_k dA; k = −1 is routed to the volume."""
        n = omega.sphere_dim
        if k == -1:
            return FunctionalOperations.volume(omega, grid)
        if not 0 <= k <= n:
            raise ArgumentError(f"Order k={k} outside −1..{n}")
        grid = grid or default_grid(omega)
        value = FunctionalOperations._integral(omega, k, grid)
        if check_resolution:
            finer = SphereBasisOperations.make_grid(n, 2 * grid.resolution)
            change = abs(FunctionalOperations._integral(omega, k, finer) - value)
            if change > settings.QUERMASS['RESOLUTION_TOLERANCE']:
                logger.warning(
                    f"Resolution warning: I_{k} changes by {change:.3e} when the grid "
                    f"resolution doubles from {grid.resolution}"
                )
        return value

    @staticmethod
    def area(omega, grid=None):
        return FunctionalOperations.curvature_integral(omega, 0, grid)

    @staticmethod
    def volume(omega, grid=None):
        """|Ω| = (1/(n+1)) ∫ (1 + u)^{n+1} dA."""
        grid = grid or default_grid(omega)
        n = omega.sphere_dim
        return float(grid.integrate(omega.radial_values(grid) ** (n + 1)) / (n + 1))

    @staticmethod
    def barycenter(omega, grid=None):
        """Volumetric barycenter (1/|Ω|)(1/(n+2)) ∫ (1 + u)^{n+2} x dA."""
        grid = grid or default_grid(omega)
        n = omega.sphere_dim
        rho = omega.radial_values(grid)
        moment = grid.integrate((rho ** (n + 2))[:, None] * grid.points) / (n + 2)
        return moment / (grid.integrate(rho ** (n + 1)) / (n + 1))

    @staticmethod
    def matching_ball_radius(omega, m, grid=None):
        """Radius of the ball whose I_m equals that of Ω (m = −1: volume)."""
        n = omega.sphere_dim
        if not -1 <= m < n:
            raise ArgumentError(f"Matching order m={m} outside −1..{n - 1}")
        value = FunctionalOperations.curvature_integral(omega, m, grid)
        if value <= 0.0:
            raise GeometryError(f"I_{m}(Ω) = {value:.3e} is not positive; set is outside the k-convex regime")
        return (value / FunctionalOperations.ball_functional(n, m)) ** (1.0 / (n - m))

    @staticmethod
    def deficit(omega, spec, grid=None):
        """δ_{k,m}(Ω) = (I_k(Ω) − I_k(B_{Ω,m})) / I_k(B_{Ω,m})."""
        if not isinstance(spec, DeficitSpec):
            spec = DeficitSpec(*spec)
        n = omega.sphere_dim
        spec.check_dimension(n)
        try:
            radius = FunctionalOperations.matching_ball_radius(omega, spec.m, grid)
            reference = FunctionalOperations.ball_functional(n, spec.k, radius)
            value = FunctionalOperations.curvature_integral(omega, spec.k, grid)
            return (value - reference) / reference
        except GeometryError as e:
            logger.error(f"Error computing deficit ({spec.k}, {spec.m}) of {omega}: {str(e)}")
            logger.error(traceback.format_exc())
            raise

    @staticmethod
    def normalize(omega, mode='volume', grid=None):
        """Scale Ω so that its volume (mode 'volume') or I_j (mode j ≥ 0) matches the unit ball."""
        n = omega.sphere_dim
        j = -1 if mode == 'volume' else mode
        if not isinstance(j, (int, np.integer)) or not -1 <= j < n:
            raise ArgumentError(f"Normalization mode {mode!r} is neither 'volume' nor an order 0..{n - 1}")
        target = FunctionalOperations.ball_functional(n, j)
        current = FunctionalOperations.curvature_integral(omega, j, grid)
        if current <= 0.0:
            raise GeometryError(f"I_{j}(Ω) = {current:.3e} is not positive; cannot normalize")
        s = (target / current) ** (1.0 / (n - j))
        normalized = omega.scaled(s)
        achieved = FunctionalOperations.curvature_integral(normalized, j, grid)
        if abs(achieved / target - 1.0) > 1e-10:
            raise AccuracyError(f"Normalization missed its target: relative error {achieved / target - 1.0:.3e}")
        logger.debug(f"Normalized {omega} in mode {mode!r} with scale {s:.15f}")
        return normalized

    @staticmethod
    def translate(omega, center, grid=None):
        """Re-express Ω − c as a radial graph of degree L + 4.

        For every grid direction θ, solves |tθ + c| = ρ(direction of tθ + c)
        by safeguarded Newton iteration, then projects t − 1.
        """
        n = omega.sphere_dim
        center = np.asarray(center, dtype=float)
        degree = min(omega.max_degree + DEGREE_INFLATION, settings.QUERMASS['MAX_DEGREE'])
        grid = grid or default_grid(omega, degree)
        theta = grid.points
        mean_radius = float(np.mean(omega.radial_values(grid)))
        lo = np.full(grid.size, BRACKET[0] * mean_radius)
        hi = np.full(grid.size, BRACKET[1] * mean_radius)

        def residual_and_slope(t):
            p = t[:, None] * theta + center
            dist = np.linalg.norm(p, axis=-1)
            direction = p / dist[:, None]
            nodes = SphereBasisOperations.chart_coordinates(n, direction)
            jet = SphereBasisOperations.evaluate_jet(omega.u, nodes)
            _, frames = SphereBasisOperations.embed(n, nodes)
            grad = np.einsum('ni,nik->nk', jet.gradient, frames)
            along = np.einsum('nk,nk->n', theta, direction)
            transverse = theta - along[:, None] * direction
            F = dist - (1.0 + jet.value)
            dF = along - np.einsum('nk,nk->n', grad, transverse) / dist
            return F, dF

        F_lo, _ = residual_and_slope(lo)
        F_hi, _ = residual_and_slope(hi)
        if np.any(F_lo >= 0.0) or np.any(F_hi <= 0.0):
            raise GeometryError(f"Translation by {center} leaves the root bracket; set is not star-shaped about c")

        t = np.clip(omega.radial_values(grid) - theta @ center, lo, hi)
        for iteration in range(100):
            F, dF = residual_and_slope(t)
            lo = np.where(F < 0.0, t, lo)
            hi = np.where(F > 0.0, t, hi)
            with np.errstate(divide='ignore', invalid='ignore'):
                t_new = t - F / dF
            bad = ~np.isfinite(t_new) | (t_new <= lo) | (t_new >= hi)
            t_new = np.where(bad, 0.5 * (lo + hi), t_new)
            step = np.max(np.abs(t_new - t))
            t = t_new
            if step < ROOT_TOLERANCE:
                break
        else:
            raise IterationError(f"Radial root-finding for translation by {center} did not converge")

        _, dF = residual_and_slope(t)
        if np.any(dF <= 0.0):
            raise GeometryError(f"Translation by {center} is not star-shaped: a ray meets the boundary tangentially")

        u_new = SphereBasisOperations.project(t - 1.0, grid, degree)
        residual = float(np.max(np.abs(SphereBasisOperations.evaluate(u_new, grid.nodes) - (t - 1.0))))
        if residual > 1e-8:
            logger.warning(f"Translation re-projection residual {residual:.3e} at degree {degree}")
        return TranslationResult(NearlySphericalSet(u_new), tuple(center), residual)

    @staticmethod
    def recenter(omega, tol=1e-9, max_iter=50):
        """Translate Ω so that its barycenter vanishes, via c ← c + bar(Ω − c)."""
        try:
            bar = FunctionalOperations.barycenter(omega)
            if np.linalg.norm(bar) < tol:
                return omega
            center = np.zeros(omega.ambient_dim)
            for iteration in range(max_iter):
                center = center + bar
                result = FunctionalOperations.translate(omega, center)
                bar = FunctionalOperations.barycenter(result.omega)
                logger.debug(f"Recenter iteration {iteration}: |bar| = {np.linalg.norm(bar):.3e}")
                if np.linalg.norm(bar) < tol:
                    logger.info(
                        f"Recentered {omega} by {np.round(center, 12)} in {iteration + 1} steps "
                        f"(re-projection residual {result.residual:.2e})"
                    )
                    return result.omega
            raise IterationError(
                f"Recentering did not reach |bar| < {tol} in {max_iter} iterations",
                best=result.omega,
            )
        except Exception as e:
            logger.error(f"Error recentering {omega}: {str(e)}")
            logger.error(traceback.format_exc())
            raise

    @staticmethod
    def sup_norms(omega):
        return omega.sup_norms

    @staticmethod
    def symmetric_difference_with_ball(omega, grid=None):
        """|Ω Δ B| = (1/(n+1)) ∫ |(1 + u)^{n+1} − 1| dA."""
        grid = grid or default_grid(omega)
        n = omega.sphere_dim
        return float(grid.integrate(np.abs(omega.radial_values(grid) ** (n + 1) - 1.0)) / (n + 1))

    @staticmethod
    def symmetric_difference_surrogate(omega, grid=None):
        """Σ_k (1/(n+1)) C(n+1, k) ∫ |u|^k dA, exact only when u has one sign."""
        grid = grid or default_grid(omega)
        n = omega.sphere_dim
        u = np.abs(omega.radial_values(grid) - 1.0)
        total = sum(comb(n + 1, k) * grid.integrate(u ** k) for k in range(1, n + 2))
        return float(total / (n + 1))

    @staticmethod
    def spherical_deviation(omega):
        """‖u‖_∞ of the volume-normalized, recentered set."""
        normalized = FunctionalOperations.normalize(omega, 'volume')
        centered = FunctionalOperations.recenter(normalized)
        return centered.sup_norms[0]
