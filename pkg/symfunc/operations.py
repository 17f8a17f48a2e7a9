# apps/symfunc/operations.py
from itertools import combinations
from math import factorial
import logging

import numpy as np

from utils.exceptions import ArgumentError

logger = logging.getLogger(__name__)


def _as_matrices(A):
    A = np.asarray(A, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ArgumentError(f"Expected square matrices, got shape {A.shape}")
    return A


def _check_order(k, n, lower=0):
    if not isinstance(k, (int, np.integer)) or not lower <= k <= n:
        raise ArgumentError(f"Order k={k} outside {lower}..{n}")


class SymmetricFunctionOperations:
    """Elementary symmetric functions, Newton tensors and polarization.

    Every operation accepts stacks of matrices shaped (..., n, n) and
    works on all of them at once.
    """

    @staticmethod
    def sigma_of_eigenvalues(lam, k):
        """k-th elementary symmetric polynomial of the last axis of ``lam``."""
        lam = np.asarray(lam, dtype=float)
        n = lam.shape[-1]
        _check_order(k, n)
        e = np.zeros(lam.shape[:-1] + (k + 1,))
        e[..., 0] = 1.0
        for i in range(n):
            e[..., 1:] = e[..., 1:] + lam[..., i, None] * e[..., :-1]
        return e[..., k]

    @staticmethod
    def sigma_sequence(A, kmax=None):
        """σ_0..σ_kmax of A from Newton's identities on power traces."""
        A = _as_matrices(A)
        n = A.shape[-1]
        kmax = n if kmax is None else kmax
        _check_order(kmax, n)
        e = np.zeros(A.shape[:-2] + (kmax + 1,))
        e[..., 0] = 1.0
        power = np.broadcast_to(np.eye(n), A.shape)
        traces = [None]
        for i in range(1, kmax + 1):
            power = power @ A
            traces.append(np.trace(power, axis1=-2, axis2=-1))
        for j in range(1, kmax + 1):
            acc = np.zeros(A.shape[:-2])
            for i in range(1, j + 1):
                acc = acc + (-1) ** (i - 1) * e[..., j - i] * traces[i]
            e[..., j] = acc / j
        return e

    @staticmethod
    def sigma_of_matrix(A, k):
        A = _as_matrices(A)
        _check_order(k, A.shape[-1])
        return SymmetricFunctionOperations.sigma_sequence(A, k)[..., k]

    @staticmethod
    def newton_tensor(A, k):
        """[T_k](A) stored as T[..., j, i] = [T_k]^j_i, with [T_n] = 0.

        Built from the recursion T_0 = I, T_k = σ_k I − A T_{k−1}.
        """
        A = _as_matrices(A)
        n = A.shape[-1]
        _check_order(k, n)
        if k == n:
            return np.zeros_like(A)
        sigma = SymmetricFunctionOperations.sigma_sequence(A, k)
        eye = np.eye(n)
        T = np.broadcast_to(eye, A.shape).copy()
        for j in range(1, k + 1):
            T = sigma[..., j, None, None] * eye - A @ T
        return T

    @staticmethod
    def sigma_polarization(*matrices):
        """Σ_k(A_1, ..., A_k), normalized so that Σ_k(A, ..., A) = k σ_k(A).

        Evaluated by inclusion-exclusion over subsets of the arguments.
        """
        if not matrices:
            raise ArgumentError("sigma_polarization needs at least one matrix")
        mats = [_as_matrices(M) for M in matrices]
        shapes = {M.shape for M in mats}
        if len(shapes) != 1:
            raise ArgumentError(f"Mixed matrix shapes: {sorted(shapes)}")
        k = len(mats)
        n = mats[0].shape[-1]
        _check_order(k, n, lower=1)
        total = np.zeros(mats[0].shape[:-2])
        for size in range(1, k + 1):
            sign = (-1) ** (k - size)
            for subset in combinations(range(k), size):
                summed = sum(mats[i] for i in subset)
                total = total + sign * SymmetricFunctionOperations.sigma_of_matrix(summed, k)
        return total / factorial(k - 1)

    @staticmethod
    def spectrum(A):
        """Eigenvalues of symmetric matrices, ascending."""
        return np.linalg.eigvalsh(_as_matrices(A))

    @staticmethod
    def sigma_derivative(A, k):
        """∂σ_k/∂A^i_j returned as an (i, j) array: the transpose of T_{k−1}."""
        A = _as_matrices(A)
        _check_order(k, A.shape[-1], lower=1)
        return np.swapaxes(SymmetricFunctionOperations.newton_tensor(A, k - 1), -1, -2)
