# apps/functionals/models.py
from dataclasses import dataclass

from utils.exceptions import ArgumentError


@dataclass(frozen=True)
class DeficitSpec:
    """Orders (k, m) of the deficit δ_{k,m}; m = −1 stands for volume."""

    k: int
    m: int

    def __post_init__(self):
        if self.k < 0:
            raise ArgumentError(f"Deficit order k={self.k} must be non-negative")
        if not -1 <= self.m < self.k:
            raise ArgumentError(f"Deficit needs −1 ≤ m < k, got (k, m) = ({self.k}, {self.m})")

    def check_dimension(self, n):
        if self.k > n:
            raise ArgumentError(f"Deficit order k={self.k} exceeds n={n}")


@dataclass(frozen=True)
class TranslationResult:
    """Outcome of re-expressing Ω − c as a radial graph."""

    omega: object
    center: tuple
    residual: float
