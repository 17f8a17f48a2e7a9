# apps/asymmetry/models.py
from dataclasses import dataclass, field

import numpy as np

from utils.exceptions import ArgumentError


@dataclass(frozen=True, eq=False)
class TranslatedBall:
    """The ball x + B_r; |x| < r keeps it star-shaped about the origin."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.array(self.center, dtype=float)
        center.setflags(write=False)
        object.__setattr__(self, 'center', center)
        if self.radius <= 0.0:
            raise ArgumentError(f"Ball radius must be positive, got {self.radius}")
        if np.linalg.norm(center) >= self.radius:
            raise ArgumentError(
                f"Ball center {center} is not inside the radius {self.radius}; "
                "the ball would not contain the origin"
            )


@dataclass(frozen=True, eq=False)
class AsymmetryResult:
    alpha: float
    center: np.ndarray
    radius: float
    evaluations: int
    starts: list = field(default_factory=list)
