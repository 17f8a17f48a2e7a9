# apps/symfunc/models.py
from dataclasses import dataclass

import numpy as np

from utils.exceptions import ArgumentError


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Small dense matrix A^i_j (row = upper index i, column = lower index j).

    ``entries`` may carry leading batch axes, so one SymMatrix can hold the
    shape operators of every node of a grid at once.
    """

    entries: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim < 2 or entries.shape[-1] != entries.shape[-2]:
            raise ArgumentError(f"Expected square matrices, got shape {entries.shape}")
        if entries.shape[-1] < 1:
            raise ArgumentError("Matrix dimension must be at least 1")
        if not np.all(np.isfinite(entries)):
            raise ArgumentError("Matrix entries must be finite")
        if self.symmetric and not np.allclose(
            entries, np.swapaxes(entries, -1, -2), rtol=0.0, atol=1e-12
        ):
            raise ArgumentError("Matrix flagged symmetric is not symmetric to 1e-12")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def dim(self):
        return self.entries.shape[-1]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __str__(self):
        return f"SymMatrix(dim={self.dim}, batch={self.entries.shape[:-2]})"
