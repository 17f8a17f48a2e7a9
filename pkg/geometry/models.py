# apps/geometry/models.py
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from sphere_basis.models import JetSample, SphericalFunction, area_of_unit_sphere
from sphere_basis.operations import SphereBasisOperations
from utils.exceptions import GeometryError


@dataclass(frozen=True, eq=False)
class NearlySphericalSet:
    """The body bounded by M = {(1 + u(x)) x : x ∈ S^n} in R^{n+1}."""

    u: SphericalFunction

    def __post_init__(self):
        n, L = self.u.sphere_dim, self.u.max_degree
        scan = SphereBasisOperations.make_grid(n, SphereBasisOperations.scan_resolution(n, L))
        smallest = float(np.min(1.0 + SphereBasisOperations.evaluate(self.u, scan.nodes)))
        if smallest <= 0.0:
            raise GeometryError(f"1 + u reaches {smallest:.3e} on the scan grid; not a radial graph")

    @property
    def sphere_dim(self):
        return self.u.sphere_dim

    @property
    def ambient_dim(self):
        return self.u.sphere_dim + 1

    @property
    def max_degree(self):
        return self.u.max_degree

    @cached_property
    def sup_norms(self):
        """(‖u‖_∞, ‖∇u‖_∞, ‖D²u‖_∞) maximized over the scan grid."""
        from .operations import GeometryOperations
        return GeometryOperations.scan_norms(self.u)

    @property
    def w2_norm(self):
        return max(self.sup_norms)

    def radial_values(self, grid):
        return 1.0 + SphereBasisOperations.evaluate(self.u, grid.nodes)

    def scaled(self, s):
        """The set sΩ, whose graph function is s(1 + u) − 1."""
        coeffs = s * np.array(self.u.coeffs)
        coeffs[0] += (s - 1.0) * np.sqrt(area_of_unit_sphere(self.sphere_dim))
        return NearlySphericalSet(self.u.with_coeffs(coeffs))

    @classmethod
    def ball(cls, n, L=0, radius=1.0):
        return cls(SphericalFunction.constant(n, L, radius - 1.0))

    def __str__(self):
        return f"NearlySphericalSet(n={self.sphere_dim}, L={self.max_degree})"


@dataclass(frozen=True, eq=False)
class CurvatureSample:
    """Per-node geometry of M: D, shape operator h^i_j, σ_0..σ_n and area density."""

    jet: JetSample
    D: np.ndarray
    shape: np.ndarray
    sigma: np.ndarray
    area_density: np.ndarray
