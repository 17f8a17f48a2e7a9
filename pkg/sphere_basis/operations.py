# apps/sphere_basis/operations.py
from functools import lru_cache
import logging

import numpy as np
from django.conf import settings

from utils.exceptions import ArgumentError, DomainError
from .models import (
    JetSample,
    QuadratureGrid,
    SphericalFunction,
    coefficient_count,
)

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)


def _check_sphere_dim(n):
    if n not in (1, 2):
        raise ArgumentError(f"Only sphere dimensions 1 and 2 are supported, got n={n}")


def _check_degree(L):
    max_degree = settings.QUERMASS['MAX_DEGREE']
    if not 0 <= L <= max_degree:
        raise ArgumentError(f"Degree L={L} outside 0..{max_degree}")


def _as_nodes(n, nodes):
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim == 1 and n == 1:
        nodes = nodes[:, None]
    if nodes.ndim != 2 or nodes.shape[1] != n:
        raise ArgumentError(f"Expected chart nodes of shape (N, {n}), got {nodes.shape}")
    return nodes


def _legendre_columns(L, x, s, order):
    """Yield (m, Λ, dΛ/dθ, d²Λ/dθ²) with rows ℓ = m..L of the normalized
    associated Legendre functions, so that Λ_ℓm(θ)·{1, √2 cos mφ, √2 sin mφ}
    is orthonormal on S^2."""
    pmm = np.full_like(x, 1.0 / np.sqrt(4.0 * np.pi))
    for m in range(L + 1):
        if m > 0:
            pmm = pmm * np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s
        rows = np.zeros((L + 1 - m,) + x.shape)
        rows[0] = pmm
        if m + 1 <= L:
            rows[1] = np.sqrt(2.0 * m + 3.0) * x * pmm
        for l in range(m + 2, L + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = -np.sqrt(
                (2.0 * l + 1.0) * ((l - 1.0) ** 2 - m * m) / ((2.0 * l - 3.0) * (l * l - m * m))
            )
            rows[l - m] = a * x * rows[l - m - 1] + b * rows[l - m - 2]
        if order == 0:
            yield m, rows, None, None
            continue
        ell = np.arange(m, L + 1, dtype=float).reshape((-1,) + (1,) * x.ndim)
        c = np.sqrt(np.maximum((2.0 * ell + 1.0) * (ell * ell - m * m) / np.abs(2.0 * ell - 1.0), 0.0))
        previous = np.zeros_like(rows)
        previous[1:] = rows[:-1]
        d_rows = (ell * x * rows - c * previous) / s
        d2_rows = -(x / s) * d_rows - (ell * (ell + 1.0) - m * m / (s * s)) * rows
        yield m, rows, d_rows, d2_rows


class SphereBasisOperations:
    """Orthonormal bases, quadrature and jets on S^1 and S^2."""

    @staticmethod
    def harmonic_eigenvalue(ell, n):
        """Laplace–Beltrami eigenvalue of degree-ℓ harmonics on S^n."""
        if ell < 0:
            raise ArgumentError(f"Degree must be non-negative, got {ell}")
        return float(-ell * (ell + n - 1))

    @staticmethod
    def coefficient_index(n, ell, m):
        _check_sphere_dim(n)
        if ell < 0 or abs(m) > ell:
            raise ArgumentError(f"Invalid (degree, order) = ({ell}, {m})")
        if n == 1:
            if ell == 0:
                return 0
            if abs(m) != ell:
                raise ArgumentError(f"On S^1 the order must be ±degree, got ({ell}, {m})")
            return 2 * ell - 1 if m > 0 else 2 * ell
        return ell * ell + ell + m

    @staticmethod
    def degree_orders(n, L):
        """(ℓ, m) of every coefficient, in index order."""
        _check_sphere_dim(n)
        if n == 1:
            pairs = [(0, 0)]
            for l in range(1, L + 1):
                pairs += [(l, l), (l, -l)]
            return pairs
        return [(l, m) for l in range(L + 1) for m in range(-l, l + 1)]

    @staticmethod
    def default_resolution(n, L):
        """Quadrature resolution used when a caller does not pass a grid."""
        _check_sphere_dim(n)
        if n == 1:
            return max(8 * L + 32, 128)
        return max(2 * L + 16, 32)

    @staticmethod
    def scan_resolution(n, L):
        return 4 * SphereBasisOperations.default_resolution(n, L)

    @staticmethod
    def supports_degree(grid, L):
        """True when products of degree-L functions integrate exactly."""
        if grid.sphere_dim == 1:
            return grid.resolution >= 2 * L + 1
        return grid.resolution >= L + 1

    @staticmethod
    def embed(n, nodes):
        """Unit vectors and orthonormal tangent frames at chart nodes."""
        _check_sphere_dim(n)
        nodes = _as_nodes(n, nodes)
        if n == 1:
            theta = nodes[:, 0]
            c, s = np.cos(theta), np.sin(theta)
            points = np.stack([c, s], axis=-1)
            frames = np.stack([-s, c], axis=-1)[:, None, :]
            return points, frames
        theta, phi = nodes[:, 0], nodes[:, 1]
        ct, st = np.cos(theta), np.sin(theta)
        cp, sp = np.cos(phi), np.sin(phi)
        points = np.stack([st * cp, st * sp, ct], axis=-1)
        e_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
        e_phi = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
        return points, np.stack([e_theta, e_phi], axis=1)

    @staticmethod
    def chart_coordinates(n, points):
        """Chart nodes of (not necessarily unit) ambient directions."""
        points = np.asarray(points, dtype=float)
        phi = np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * np.pi)
        if n == 1:
            return phi[:, None]
        radius = np.linalg.norm(points, axis=-1)
        theta = np.arccos(np.clip(points[:, 2] / radius, -1.0, 1.0))
        return np.stack([theta, phi], axis=-1)

    @staticmethod
    @lru_cache(maxsize=64)
    def make_grid(n, resolution):
        """Trapezoid nodes on S^1, Gauss–Legendre × uniform azimuth on S^2."""
        _check_sphere_dim(n)
        if resolution < 4:
            raise ArgumentError(f"Grid resolution must be at least 4, got {resolution}")
        if n == 1:
            nodes = (2.0 * np.pi * np.arange(resolution) / resolution)[:, None]
            weights = np.full(resolution, 2.0 * np.pi / resolution)
        else:
            x, w = np.polynomial.legendre.leggauss(resolution)
            azimuth_count = 2 * resolution
            phi = 2.0 * np.pi * np.arange(azimuth_count) / azimuth_count
            theta = np.arccos(x)
            tt, pp = np.meshgrid(theta, phi, indexing='ij')
            nodes = np.stack([tt.ravel(), pp.ravel()], axis=-1)
            weights = np.repeat(w, azimuth_count) * (2.0 * np.pi / azimuth_count)
        points, frames = SphereBasisOperations.embed(n, nodes)
        logger.debug(f"Built S^{n} grid with resolution {resolution} ({weights.size} nodes)")
        return QuadratureGrid(n, resolution, nodes, weights, points, frames)

    @staticmethod
    def chart_derivatives(f, nodes, order=2):
        """Chart partials of f at nodes.

        Returns a dict with 'u' and, for order ≥ 1, 'u_t', 'u_tt' and for
        n = 2 also 'u_p', 'u_pp', 'u_tp' (t = θ, p = φ).
        """
        n, L, a = f.sphere_dim, f.max_degree, f.coeffs
        nodes = _as_nodes(n, nodes)
        theta = nodes[:, 0]
        if n == 1:
            ell = np.arange(1, L + 1, dtype=float)[:, None]
            cos, sin = np.cos(ell * theta), np.sin(ell * theta)
            ac, as_ = a[1::2][:, None], a[2::2][:, None]
            out = {'u': a[0] / np.sqrt(2.0 * np.pi) + ((ac * cos + as_ * sin).sum(axis=0)) / np.sqrt(np.pi)}
            if order >= 1:
                out['u_t'] = (ell * (as_ * cos - ac * sin)).sum(axis=0) / np.sqrt(np.pi)
                out['u_tt'] = -(ell ** 2 * (ac * cos + as_ * sin)).sum(axis=0) / np.sqrt(np.pi)
            return out

        phi = nodes[:, 1]
        x, s = np.cos(theta), np.sin(theta)
        if order >= 1 and np.any(s < 1e-14):
            raise DomainError("Chart derivatives are undefined at the poles")
        keys = ('u',) if order == 0 else ('u', 'u_t', 'u_tt', 'u_p', 'u_pp', 'u_tp')
        out = {key: np.zeros_like(theta) for key in keys}
        for m, rows, d_rows, d2_rows in _legendre_columns(L, x, s, order):
            ell = np.arange(m, L + 1)
            ac = a[ell * ell + ell + m]
            R = ac @ rows
            if m == 0:
                out['u'] += R
                if order >= 1:
                    out['u_t'] += ac @ d_rows
                    out['u_tt'] += ac @ d2_rows
                continue
            as_ = a[ell * ell + ell - m]
            C, S = SQRT2 * np.cos(m * phi), SQRT2 * np.sin(m * phi)
            Rs = as_ @ rows
            out['u'] += R * C + Rs * S
            if order >= 1:
                Rt, Rst = ac @ d_rows, as_ @ d_rows
                out['u_t'] += Rt * C + Rst * S
                out['u_tt'] += (ac @ d2_rows) * C + (as_ @ d2_rows) * S
                out['u_p'] += m * (Rs * C - R * S)
                out['u_pp'] -= m * m * (R * C + Rs * S)
                out['u_tp'] += m * (Rst * C - Rt * S)
        return out

    @staticmethod
    def evaluate(f, nodes):
        return SphereBasisOperations.chart_derivatives(f, nodes, order=0)['u']

    @staticmethod
    def evaluate_jet(f, nodes):
        """Value, orthonormal-frame gradient and covariant Hessian at nodes.

        On S^2 the frame is (∂_θ, ∂_φ/sinθ).
        """
        n = f.sphere_dim
        nodes = _as_nodes(n, nodes)
        d = SphereBasisOperations.chart_derivatives(f, nodes, order=2)
        if n == 1:
            return JetSample(d['u'], d['u_t'][:, None], d['u_tt'][:, None, None], nodes)
        theta = nodes[:, 0]
        x, s = np.cos(theta), np.sin(theta)
        gradient = np.stack([d['u_t'], d['u_p'] / s], axis=-1)
        h11 = d['u_tt']
        h12 = (d['u_tp'] - (x / s) * d['u_p']) / s
        h22 = (d['u_pp'] + s * x * d['u_t']) / (s * s)
        hessian = np.stack([np.stack([h11, h12], axis=-1), np.stack([h12, h22], axis=-1)], axis=-2)
        return JetSample(d['u'], gradient, hessian, nodes)

    @staticmethod
    def basis_matrix(n, L, nodes):
        """Values of every basis function at nodes, shape (N, coefficient count)."""
        _check_sphere_dim(n)
        nodes = _as_nodes(n, nodes)
        theta = nodes[:, 0]
        B = np.zeros((theta.size, coefficient_count(n, L)))
        if n == 1:
            B[:, 0] = 1.0 / np.sqrt(2.0 * np.pi)
            for l in range(1, L + 1):
                B[:, 2 * l - 1] = np.cos(l * theta) / np.sqrt(np.pi)
                B[:, 2 * l] = np.sin(l * theta) / np.sqrt(np.pi)
            return B
        phi = nodes[:, 1]
        for m, rows, _, _ in _legendre_columns(L, np.cos(theta), np.sin(theta), 0):
            ell = np.arange(m, L + 1)
            if m == 0:
                B[:, ell * ell + ell] = rows.T
            else:
                B[:, ell * ell + ell + m] = (rows * (SQRT2 * np.cos(m * phi))).T
                B[:, ell * ell + ell - m] = (rows * (SQRT2 * np.sin(m * phi))).T
        return B

    @staticmethod
    def project(samples, grid, L):
        """Quadrature coefficients a_k = ∫ u Y_k dA up to degree L."""
        _check_degree(L)
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (grid.size,):
            raise ArgumentError(f"Expected {grid.size} samples, got shape {samples.shape}")
        accurate = SphereBasisOperations.supports_degree(grid, L)
        if not accurate:
            logger.warning(
                f"Grid resolution {grid.resolution} is too coarse to project S^{grid.sphere_dim} "
                f"functions of degree {L}; coefficients are not exact"
            )
        B = SphereBasisOperations.basis_matrix(grid.sphere_dim, L, grid.nodes)
        coeffs = B.T @ (grid.weights * samples)
        return SphericalFunction(grid.sphere_dim, L, coeffs, accurate=accurate)

    @staticmethod
    def eigenvalues(f):
        """λ_ℓ for every coefficient of f."""
        return -f.degrees * (f.degrees + f.sphere_dim - 1.0)

    @staticmethod
    def l2_norm_squared(f):
        return float(np.sum(f.coeffs ** 2))

    @staticmethod
    def gradient_norm_squared(f):
        """‖∇f‖²_{L²} = Σ |λ_ℓ| a² (integration by parts)."""
        return float(np.sum(-SphereBasisOperations.eigenvalues(f) * f.coeffs ** 2))

    @staticmethod
    def rotate_about_axis(f, angle):
        """f composed with the rotation by ``angle`` about the polar axis."""
        a = np.array(f.coeffs)
        rotated = a.copy()
        for ell, m in SphereBasisOperations.degree_orders(f.sphere_dim, f.max_degree):
            if m <= 0:
                continue
            order = m if f.sphere_dim == 2 else ell
            i_c = SphereBasisOperations.coefficient_index(f.sphere_dim, ell, m)
            i_s = SphereBasisOperations.coefficient_index(f.sphere_dim, ell, -m)
            c, s = np.cos(order * angle), np.sin(order * angle)
            rotated[i_c] = a[i_c] * c - a[i_s] * s
            rotated[i_s] = a[i_c] * s + a[i_s] * c
        return f.with_coeffs(rotated)
