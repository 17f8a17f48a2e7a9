# apps/asymmetry/operations.py
import logging
import traceback

import numpy as np
from scipy.optimize import minimize

from functionals.operations import FunctionalOperations, default_grid
from geometry.models import NearlySphericalSet
from sphere_basis.operations import SphereBasisOperations
from utils.exceptions import ArgumentError, GeometryError, IterationError
from .models import AsymmetryResult, TranslatedBall

logger = logging.getLogger(__name__)

SEARCH_FRACTION = 0.9
SIMPLEX_FRACTION = 0.05
MAX_EVALUATIONS = 10_000


class AsymmetryOperations:
    """Fraenkel asymmetry by derivative-free search over ball centers."""

    @staticmethod
    def ball_radial(ball, directions):
        """Distance t > 0 along each unit direction to the boundary of x + B_r."""
        if not isinstance(ball, TranslatedBall):
            ball = TranslatedBall(*ball)
        directions = np.asarray(directions, dtype=float)
        x = ball.center
        along = directions @ x
        return along + np.sqrt(ball.radius ** 2 - x @ x + along ** 2)

    @staticmethod
    def symdiff_radial(rho1, rho2, grid):
        """Volume of the symmetric difference of two origin-star-shaped sets."""
        rho1, rho2 = np.asarray(rho1, dtype=float), np.asarray(rho2, dtype=float)
        if np.any(rho1 <= 0.0) or np.any(rho2 <= 0.0):
            raise GeometryError("Radial functions must be positive")
        n = grid.sphere_dim
        return float(grid.integrate(np.abs(rho1 ** (n + 1) - rho2 ** (n + 1))) / (n + 1))

    @staticmethod
    def translated_ball(n, center, radius=1.0, L=8):
        """x + B_r re-expressed as a radial graph of degree L."""
        ball = TranslatedBall(center, radius)
        if ball.center.shape != (n + 1,):
            raise ArgumentError(f"Center must have {n + 1} components, got {ball.center.shape}")
        grid = SphereBasisOperations.make_grid(n, SphereBasisOperations.default_resolution(n, L))
        t = AsymmetryOperations.ball_radial(ball, grid.points)
        return NearlySphericalSet(SphereBasisOperations.project(t - 1.0, grid, L))

    @staticmethod
    def fraenkel_asymmetry(omega, grid=None, seed=0, max_evaluations=MAX_EVALUATIONS, xatol=1e-10):
        """α(Ω) = min over |x| < 0.9r of |Ω Δ (x + B_r)| / |B_r|, with r matching the volume.

        Nelder–Mead runs from x = 0, from the barycenter and from one seeded
        random point; the best run is returned.
        """
        try:
            grid = grid or default_grid(omega)
            n = omega.sphere_dim
            rho = omega.radial_values(grid)
            r = FunctionalOperations.matching_ball_radius(omega, -1, grid)
            ball_volume = FunctionalOperations.ball_functional(n, -1, r)
            limit = SEARCH_FRACTION * r

            def objective(x):
                distance = np.linalg.norm(x)
                if distance >= limit:
                    return 2.0 + (distance - limit) / r
                t = AsymmetryOperations.ball_radial(TranslatedBall(x, r), grid.points)
                return AsymmetryOperations.symdiff_radial(rho, t, grid) / ball_volume

            rng = np.random.default_rng(seed)
            random_start = rng.standard_normal(n + 1)
            random_start *= 0.1 * r * rng.uniform() / np.linalg.norm(random_start)
            barycenter = FunctionalOperations.barycenter(omega, grid)
            if np.linalg.norm(barycenter) > 0.5 * r:
                barycenter = barycenter * (0.5 * r / np.linalg.norm(barycenter))
            starts = [np.zeros(n + 1), barycenter, random_start]

            step = SIMPLEX_FRACTION * r
            best, evaluations, runs = None, 0, []
            for start in starts:
                simplex = np.vstack([start, start + step * np.eye(n + 1)])
                res = minimize(
                    objective,
                    start,
                    method='Nelder-Mead',
                    options={
                        'initial_simplex': simplex,
                        'xatol': xatol,
                        'fatol': 1e-12,
                        'maxfev': max_evaluations,
                        'maxiter': max_evaluations,
                    },
                )
                evaluations += res.nfev
                runs.append({'start': start.tolist(), 'alpha': float(res.fun), 'success': bool(res.success)})
                if not res.success:
                    logger.warning(f"Nelder–Mead start {start} stopped without converging: {res.message}")
                if best is None or res.fun < best.fun:
                    best = res

            result = AsymmetryResult(float(best.fun), np.array(best.x), r, evaluations, runs)
            if not best.success:
                raise IterationError(
                    f"Asymmetry search did not converge within {max_evaluations} evaluations",
                    best=result,
                )
            logger.debug(f"α({omega}) = {result.alpha:.6e} at {result.center} after {evaluations} evaluations")
            return result
        except Exception as e:
            logger.error(f"Error computing Fraenkel asymmetry of {omega}: {str(e)}")
            logger.error(traceback.format_exc())
            raise
