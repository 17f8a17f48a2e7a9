# apps/geometry/operations.py
from math import comb
import logging

import numpy as np
from django.conf import settings

from sphere_basis.operations import SphereBasisOperations
from symfunc.operations import SymmetricFunctionOperations
from utils.exceptions import ArgumentError, GeometryError
from .models import CurvatureSample

logger = logging.getLogger(__name__)


def _radius(jet):
    r = 1.0 + jet.value
    guard = settings.QUERMASS['MIN_RADIUS']
    if np.any(r < guard):
        raise GeometryError(f"1 + u = {np.min(r):.3e} is below the degenerate-graph guard {guard}")
    return r


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


class GeometryOperations:
    """Extrinsic geometry of radial graphs over S^n, node by node."""

    @staticmethod
    def support_function_d(jet):
        """D = √(|∇u|² + (1 + u)²)."""
        r = _radius(jet)
        return np.sqrt(np.sum(jet.gradient ** 2, axis=-1) + r * r)

    @staticmethod
    def shape_operator(jet):
        """h^i_j in the orthonormal frame; similar to a symmetric matrix."""
        r = _radius(jet)
        g, H = jet.gradient, jet.hessian
        D = np.sqrt(np.sum(g ** 2, axis=-1) + r * r)
        Hg = np.einsum('...ij,...j->...i', H, g)
        eye = np.eye(jet.dim)
        r_, D_ = r[..., None, None], D[..., None, None]
        return (
            eye / D_
            - H / (r_ * D_)
            + _outer(g, Hg) / (r_ * D_ ** 3)
            + _outer(g, g) / D_ ** 3
        )

    @staticmethod
    def principal_curvatures(jet):
        """Eigenvalues of the pair (h_ij, g_ij), whitened by the Cholesky factor of g."""
        r = _radius(jet)
        g, H = jet.gradient, jet.hessian
        D = np.sqrt(np.sum(g ** 2, axis=-1) + r * r)
        eye = np.eye(jet.dim)
        r_ = r[..., None, None]
        metric = r_ ** 2 * eye + _outer(g, g)
        second = (2.0 * _outer(g, g) + r_ ** 2 * eye - r_ * H) / D[..., None, None]
        chol = np.linalg.cholesky(metric)
        half = np.linalg.solve(chol, second)
        whitened = np.linalg.solve(chol, np.swapaxes(half, -1, -2))
        whitened = 0.5 * (whitened + np.swapaxes(whitened, -1, -2))
        return np.linalg.eigvalsh(whitened)

    @staticmethod
    def sigma_k_closed(jet, k):
        """σ_k of the principal curvatures from u, ∇u and D²u directly."""
        n = jet.dim
        if not 0 <= k <= n:
            raise ArgumentError(f"Order k={k} outside 0..{n}")
        r = _radius(jet)
        g, H = jet.gradient, jet.hessian
        D = np.sqrt(np.sum(g ** 2, axis=-1) + r * r)
        sigma = SymmetricFunctionOperations.sigma_sequence(H, k)
        total = np.zeros_like(r)
        for m in range(k + 1):
            term = r * r * sigma[..., m]
            if m < n:
                T = SymmetricFunctionOperations.newton_tensor(H, m)
                term = term + (n + k - 2.0 * m) / (n - m) * np.einsum('...i,...ji,...j->...', g, T, g)
            total = total + (-1) ** m * comb(n - m, k - m) * r ** (-m) * term
        return total * D ** (-(k + 2.0))

    @staticmethod
    def area_element(jet):
        """(1 + u)^n √(1 + |∇u|²/(1 + u)²)."""
        r = _radius(jet)
        n = jet.dim
        return r ** (n - 1) * np.sqrt(r * r + np.sum(jet.gradient ** 2, axis=-1))

    @staticmethod
    def outward_normal(jet, nodes=None):
        """Unit outward normal ((1 + u) x − Σ u_i e_i)/D in ambient coordinates."""
        nodes = jet.nodes if nodes is None else nodes
        if nodes is None:
            raise ArgumentError("outward_normal needs the chart nodes of the jet")
        points, frames = SphereBasisOperations.embed(jet.dim, nodes)
        r = _radius(jet)
        D = np.sqrt(np.sum(jet.gradient ** 2, axis=-1) + r * r)
        tangential = np.einsum('ni,nik->nk', jet.gradient, frames)
        return (r[:, None] * points - tangential) / D[:, None]

    @staticmethod
    def curvature_sample(jet):
        shape = GeometryOperations.shape_operator(jet)
        return CurvatureSample(
            jet=jet,
            D=GeometryOperations.support_function_d(jet),
            shape=shape,
            sigma=SymmetricFunctionOperations.sigma_sequence(shape),
            area_density=GeometryOperations.area_element(jet),
        )

    @staticmethod
    def scan_norms(u):
        """Sup-norms of u, |∇u| and the Hessian's spectral norm on the scan grid.

        These are lower bounds for the true suprema, converging with the
        scan resolution.
        """
        n, L = u.sphere_dim, u.max_degree
        grid = SphereBasisOperations.make_grid(n, SphereBasisOperations.scan_resolution(n, L))
        jet = SphereBasisOperations.evaluate_jet(u, grid.nodes)
        if np.min(1.0 + jet.value) <= 0.0:
            raise GeometryError("1 + u is not positive on the scan grid")
        hessian_norm = np.max(np.abs(np.linalg.eigvalsh(jet.hessian)), axis=-1)
        return (
            float(np.max(np.abs(jet.value))),
            float(np.max(np.linalg.norm(jet.gradient, axis=-1))),
            float(np.max(hessian_norm)),
        )

    @staticmethod
    def is_k_convex(omega, k, grid=None):
        """σ_j ≥ 0 for 1 ≤ j ≤ k at every grid node."""
        n, L = omega.sphere_dim, omega.max_degree
        if not 1 <= k <= n:
            raise ArgumentError(f"Order k={k} outside 1..{n}")
        grid = grid or SphereBasisOperations.make_grid(n, SphereBasisOperations.default_resolution(n, L))
        jet = SphereBasisOperations.evaluate_jet(omega.u, grid.nodes)
        return all(np.all(GeometryOperations.sigma_k_closed(jet, j) >= 0.0) for j in range(1, k + 1))
