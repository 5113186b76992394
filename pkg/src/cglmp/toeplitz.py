"""Fast products with symmetric Toeplitz matrices via circulant embedding."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError


def embedding_size(d: int) -> int:
    """Smallest power of two that is at least ``2*d``."""
    return 1 << max(1, (2 * d - 1).bit_length())


class SymmetricToeplitz:
    """Linear operator ``v -> T v`` where ``T[i, j] = first_col[|i - j|]``.

    The matrix is embedded in a circulant of size :func:`embedding_size`,
    whose eigenvalues are cached once; each product then costs two real FFTs.
    """

    def __init__(self, first_col):
        first_col = np.asarray(first_col, dtype=float)
        if first_col.ndim != 1 or first_col.size < 1:
            raise DimensionError("first column must be a nonempty vector")
        self.first_col = first_col
        self.d = first_col.size
        self.n = embedding_size(self.d)
        circ = np.zeros(self.n)
        circ[: self.d] = first_col
        if self.d > 1:
            circ[self.n - self.d + 1 :] = first_col[:0:-1]
        self._spectrum = np.fft.rfft(circ)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.d, self.d)

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.d,):
            raise DimensionError(f"vector of length {v.shape} does not match d={self.d}")
        return np.fft.irfft(np.fft.rfft(v, self.n) * self._spectrum, self.n)[: self.d]

    __matmul__ = matvec

    def row(self, i: int) -> np.ndarray:
        """Row ``i`` of the dense matrix, built directly from ``first_col``."""
        return self.first_col[np.abs(np.arange(self.d) - i)]

    def dense(self) -> np.ndarray:
        idx = np.arange(self.d)
        return self.first_col[np.abs(idx[:, None] - idx[None, :])]


def toeplitz_matvec(first_col, v) -> np.ndarray:
    """Product of the symmetric Toeplitz matrix defined by ``first_col`` with ``v``."""
    first_col = np.asarray(first_col, dtype=float)
    v = np.asarray(v, dtype=float)
    if first_col.shape != v.shape:
        raise DimensionError(f"length mismatch: first_col {first_col.shape} vs v {v.shape}")
    return SymmetricToeplitz(first_col).matvec(v)
