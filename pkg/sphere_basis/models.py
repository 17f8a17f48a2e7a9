# apps/sphere_basis/models.py
from dataclasses import dataclass, field

import numpy as np

from utils.exceptions import ArgumentError


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def coefficient_count(n, L):
    if n == 1:
        return 2 * L + 1
    if n == 2:
        return (L + 1) ** 2
    raise ArgumentError(f"Only sphere dimensions 1 and 2 have a basis, got n={n}")


@dataclass(frozen=True, eq=False)
class SphericalFunction:
    """Band-limited function on S^n stored as orthonormal basis coefficients.

    n = 1: index 0 is the constant, 2ℓ−1 is cos(ℓθ), 2ℓ is sin(ℓθ).
    n = 2: index ℓ²+ℓ+m is the real harmonic Y_ℓm, −ℓ ≤ m ≤ ℓ.
    ``accurate`` is False when the coefficients came from a projection on
    a grid too coarse for the requested degree.
    """

    sphere_dim: int
    max_degree: int
    coeffs: np.ndarray
    accurate: bool = True

    def __post_init__(self):
        if self.max_degree < 0:
            raise ArgumentError(f"max_degree must be non-negative, got {self.max_degree}")
        coeffs = _frozen_array(self.coeffs)
        expected = coefficient_count(self.sphere_dim, self.max_degree)
        if coeffs.shape != (expected,):
            raise ArgumentError(
                f"Expected {expected} coefficients for n={self.sphere_dim}, "
                f"L={self.max_degree}, got shape {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ArgumentError("Coefficients must be finite")
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def zeros(cls, n, L):
        return cls(n, L, np.zeros(coefficient_count(n, L)))

    @classmethod
    def constant(cls, n, L, c):
        """The constant function c (the sphere of radius 1 + c as a graph)."""
        coeffs = np.zeros(coefficient_count(n, L))
        coeffs[0] = c * np.sqrt(area_of_unit_sphere(n))
        return cls(n, L, coeffs)

    @property
    def degrees(self):
        """Degree ℓ of every coefficient, in index order."""
        if self.sphere_dim == 1:
            return np.concatenate([[0], np.repeat(np.arange(1, self.max_degree + 1), 2)])
        return np.concatenate([np.full(2 * l + 1, l) for l in range(self.max_degree + 1)])

    def with_coeffs(self, coeffs, max_degree=None):
        return SphericalFunction(
            self.sphere_dim, self.max_degree if max_degree is None else max_degree, coeffs
        )

    def __str__(self):
        return f"SphericalFunction(n={self.sphere_dim}, L={self.max_degree})"


def area_of_unit_sphere(n):
    if n == 1:
        return 2.0 * np.pi
    if n == 2:
        return 4.0 * np.pi
    raise ArgumentError(f"Only sphere dimensions 1 and 2 are supported, got n={n}")


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Quadrature nodes on S^n with per-node embedding and orthonormal frame.

    nodes: (N, n) chart coordinates, θ for n = 1 and (θ, φ) for n = 2.
    points: (N, n+1) unit vectors. frames: (N, n, n+1) tangent frame.
    """

    sphere_dim: int
    resolution: int
    nodes: np.ndarray
    weights: np.ndarray
    points: np.ndarray
    frames: np.ndarray

    def __post_init__(self):
        for name in ('nodes', 'weights', 'points', 'frames'):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))

    @property
    def size(self):
        return self.weights.size

    def integrate(self, values):
        """∫ values dA; integrates over the first axis of ``values``."""
        return np.tensordot(self.weights, np.asarray(values, dtype=float), axes=(0, 0))


@dataclass(frozen=True, eq=False)
class JetSample:
    """Value, frame gradient and covariant frame Hessian of u.

    Fields carry a leading node axis when the jet covers several nodes:
    value (N,), gradient (N, n), hessian (N, n, n).
    """

    value: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray
    nodes: np.ndarray = field(default=None)

    def __post_init__(self):
        value = np.asarray(self.value, dtype=float)
        gradient = np.asarray(self.gradient, dtype=float)
        hessian = np.asarray(self.hessian, dtype=float)
        if gradient.shape != value.shape + gradient.shape[-1:] or hessian.shape != gradient.shape + gradient.shape[-1:]:
            raise ArgumentError(
                f"Inconsistent jet shapes {value.shape}, {gradient.shape}, {hessian.shape}"
            )
        object.__setattr__(self, 'value', value)
        object.__setattr__(self, 'gradient', gradient)
        object.__setattr__(self, 'hessian', hessian)

    @property
    def dim(self):
        return self.gradient.shape[-1]

    @classmethod
    def constant(cls, c, n, count=None):
        shape = () if count is None else (count,)
        return cls(np.full(shape, float(c)), np.zeros(shape + (n,)), np.zeros(shape + (n, n)))

    def laplacian(self):
        return np.trace(self.hessian, axis1=-2, axis2=-1)

    def __getitem__(self, index):
        nodes = None if self.nodes is None else self.nodes[index]
        return JetSample(self.value[index], self.gradient[index], self.hessian[index], nodes)
