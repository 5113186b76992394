"""The Toeplitz kernel that turns the functional into a quadratic form.

Under the conjectured optimal measurements the functional of a state with
Schmidt vector ``lam`` equals ``lam @ M @ lam`` with

    M[i, j] = 2*delta(i, j) - sec((i - j)*pi / (2*d)) / d.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import DimensionError
from .toeplitz import SymmetricToeplitz

#: Catalan's constant.
CATALAN = 0.915965594177219015054603514932384110774

#: Large-d limit of the functional for the maximally entangled state.
MAXENT_LIMIT = 2.0 - 16.0 * CATALAN / np.pi**2


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Symmetric Toeplitz kernel stored by its first column."""

    d: int
    first_col: np.ndarray

    @cached_property
    def operator(self) -> SymmetricToeplitz:
        return SymmetricToeplitz(self.first_col)

    def matvec(self, v) -> np.ndarray:
        return self.operator.matvec(v)

    def dense(self) -> np.ndarray:
        return self.operator.dense()


def kernel_first_col(d: int) -> np.ndarray:
    k = np.arange(d)
    col = -1.0 / (d * np.cos(k * np.pi / (2 * d)))
    col[0] += 2.0
    return col


def kernel_matrix(d: int) -> KernelMatrix:
    if d < 2:
        raise DimensionError("kernel requires d >= 2")
    col = kernel_first_col(d)
    col.setflags(write=False)
    return KernelMatrix(d, col)


def quadratic_form(K: KernelMatrix, lam) -> float:
    """``lam @ M @ lam`` without forming ``M``."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (K.d,):
        raise DimensionError(f"vector of length {lam.shape} does not match d={K.d}")
    return float(lam @ K.matvec(lam))


def maxent_value(d: int) -> float:
    """Functional of the maximally entangled state, in O(d).

    With ``lam_i = 1/sqrt(d)`` the quadratic form is the mean over all entries
    times ``d``; diagonal ``k`` of the Toeplitz matrix occurs ``d - k`` times
    on each side.
    """
    if d < 2:
        raise DimensionError("d must be >= 2")
    col = kernel_first_col(d)
    weights = 2.0 * (d - np.arange(d, dtype=float))
    weights[0] = d
    return float(weights @ col) / d
