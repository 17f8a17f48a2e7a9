# apps/verify/models.py
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

from utils.exceptions import ArgumentError

MODES = ('volume', 'quermass')


@dataclass(frozen=True)
class SampleSpec:
    """Recipe for random constrained nearly spherical sets.

    mode 'volume': volume-normalized and centered.
    mode 'quermass': I_j-normalized (j ≥ 0) and centered.
    """

    n: int
    L: int
    epsilon: float
    count: int = 1
    seed: int = 0
    mode: str = 'volume'
    j: Optional[int] = None
    degree_min: int = 2
    degree_max: Optional[int] = None

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ArgumentError(f"Sampling supports n in {{1, 2}}, got {self.n}")
        if not 0.0 < self.epsilon <= 0.3:
            raise ArgumentError(f"epsilon must lie in (0, 0.3], got {self.epsilon}")
        if self.count < 1:
            raise ArgumentError(f"count must be at least 1, got {self.count}")
        if self.mode not in MODES:
            raise ArgumentError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == 'quermass' and (self.j is None or not 0 <= self.j < self.n):
            raise ArgumentError(f"mode 'quermass' needs 0 ≤ j < n, got j={self.j}")
        top = self.L if self.degree_max is None else self.degree_max
        if self.degree_min < 2 or top > self.L or self.degree_min > top:
            raise ArgumentError(
                f"Degree range {self.degree_min}..{top} must lie in 2..L={self.L}"
            )

    @property
    def top_degree(self):
        return self.L if self.degree_max is None else self.degree_max

    @property
    def constraint(self):
        """Normalization argument for FunctionalOperations.normalize."""
        return 'volume' if self.mode == 'volume' else self.j

    def with_epsilon(self, epsilon):
        return replace(self, epsilon=epsilon)


@dataclass
class SampleRow:
    """One evaluated sample; margin = δ − (C − η) α²."""

    index: int
    seed: int
    epsilon: float
    w2_norm: float
    delta: float
    alpha: float
    u_l2_sq: float
    grad_l2_sq: float
    u_sup: float
    excess: float
    margin: float = 0.0

    def as_dict(self):
        return asdict(self)


@dataclass
class DeficitReport:
    check: str
    n: int
    k: int
    m: int
    epsilon: float
    constant: float
    eta: float
    rows: list = field(default_factory=list)
    min_margin: float = 0.0
    fitted: dict = field(default_factory=dict)
    passed: bool = True
    failures: list = field(default_factory=list)


@dataclass
class SupNormReport:
    """Ratios ‖u‖_∞^n / branch(δ) across an epsilon sweep."""

    n: int
    k: int
    epsilons: list
    max_ratios: list
    log_constant: Optional[float]
    growth_limit: float
    passed: bool
    excluded: int = 0


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ''
