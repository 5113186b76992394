"""Minimal eigenpair of the kernel: dense for small d, Lanczos for large d."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, DimensionError, PerronViolation
from .kernel import KernelMatrix
from .toeplitz import toeplitz_matvec

logger = logging.getLogger(__name__)

DENSE_CAP = 2000
DIRECT_CHECK_CAP = 4096
PERRON_TOL = 1e-9


@dataclass(frozen=True)
class EigenResult:
    eigenvalue: float
    eigenvector: np.ndarray
    residual: float
    iterations: int
    method: str
    seed: int | None = None

    @property
    def d(self) -> int:
        return self.eigenvector.size


def default_tol(d: int) -> float:
    return 1e-8 if d <= 100_000 else 1e-6


def canonicalize_sign(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its largest-magnitude entry is positive, then require ``v >= 0``."""
    v = np.array(v, dtype=float)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    low = v.min()
    if low < -PERRON_TOL:
        raise PerronViolation(f"Perron violation: minimal eigenvector has entry {low!r} after sign fix")
    np.maximum(v, 0.0, out=v)
    v.setflags(write=False)
    return v


def _residual(K: KernelMatrix, theta: float, v: np.ndarray) -> float:
    return float(np.linalg.norm(K.matvec(v) - theta * v))


def dense_min_eig(K: KernelMatrix, cap: int = DENSE_CAP) -> EigenResult:
    if K.d > cap:
        raise DimensionError(f"d={K.d} exceeds the dense cap {cap}; use lanczos_min_eig")
    w, V = np.linalg.eigh(K.dense())
    theta = float(w[0])
    v = canonicalize_sign(V[:, 0] / np.linalg.norm(V[:, 0]))
    return EigenResult(theta, v, _residual(K, theta, v), 1, "dense")


def lanczos_min_eig(K: KernelMatrix, tol: float | None = None, max_iter: int = 500, seed: int = 42) -> EigenResult:
    """Lanczos with full reorthogonalization for the smallest eigenpair.

    The Ritz residual ``|beta_m * s_m|`` is used as a cheap convergence test;
    once it passes, the Ritz vector is formed and its true residual checked
    before returning.
    """
    if tol is None:
        tol = default_tol(K.d)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    d = K.d
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(d)
    q /= np.linalg.norm(q)

    n_steps = min(max_iter, d)
    # grown by doubling so large d does not reserve max_iter full vectors
    basis = np.empty((min(n_steps, 16), d))
    alphas, betas = [], []
    best = (np.nan, q, np.inf)
    for m in range(n_steps):
        if m == basis.shape[0]:
            basis = np.concatenate([basis, np.empty((min(m, n_steps - m), d))])
        basis[m] = q
        w = K.matvec(q)
        alpha = float(q @ w)
        alphas.append(alpha)
        # two passes of classical Gram-Schmidt against the whole basis
        for _ in range(2):
            w -= basis[: m + 1].T @ (basis[: m + 1] @ w)
        beta = float(np.linalg.norm(w))

        T = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        theta, S = np.linalg.eigh(T)
        estimate = abs(beta * S[-1, 0])
        invariant = beta <= 1e-14 * max(1.0, abs(alpha)) or m + 1 == d
        if estimate <= tol or invariant:
            v = basis[: m + 1].T @ S[:, 0]
            v /= np.linalg.norm(v)
            res = _residual(K, float(theta[0]), v)
            best = (float(theta[0]), v, res)
            if res <= tol:
                logger.debug("lanczos d=%d converged after %d steps, residual %.3g", d, m + 1, res)
                return EigenResult(float(theta[0]), canonicalize_sign(v), res, m + 1, "lanczos", seed)
            if invariant:
                break
        betas.append(beta)
        q = w / beta
    theta_best, v_best, res_best = best
    if np.isnan(theta_best):
        v_best = basis[: len(alphas)].T @ S[:, 0]
        theta_best = float(theta[0])
        res_best = _residual(K, theta_best, v_best)
    raise ConvergenceError(
        f"Lanczos did not reach tol={tol:g} within {len(alphas)} iterations (residual {res_best:.3g})",
        eigenvalue=theta_best,
        eigenvector=v_best,
        residual=res_best,
        iterations=len(alphas),
    )


def min_eig(K: KernelMatrix, method: str = "auto", tol: float | None = None, max_iter: int = 500, seed: int = 42) -> EigenResult:
    """Dispatch to the dense or Lanczos solver; ``auto`` picks by dimension."""
    if method == "auto":
        method = "dense" if K.d <= 500 else "lanczos"
    if method == "dense":
        return dense_min_eig(K)
    if method == "lanczos":
        return lanczos_min_eig(K, tol=tol, max_iter=max_iter, seed=seed)
    raise ValueError(f"unknown method {method!r}")


def verify_residual(K: KernelMatrix, result: EigenResult, seed: int = 0, block: int = 64) -> float:
    """Recompute the residual through a matvec independent of the solver's.

    Small kernels use the dense matrix. Larger ones use a freshly built FFT
    product, and a random block of rows is also checked against rows built
    directly from the first column.
    """
    v, theta = result.eigenvector, result.eigenvalue
    if K.d <= DIRECT_CHECK_CAP:
        return float(np.linalg.norm(K.dense() @ v - theta * v))
    r = toeplitz_matvec(np.array(K.first_col), v) - theta * v
    rng = np.random.default_rng(seed)
    rows = rng.choice(K.d, size=min(block, K.d), replace=False)
    direct = np.array([K.operator.row(i) @ v for i in rows]) - theta * v[rows]
    if not np.allclose(direct, r[rows], rtol=0, atol=1e-9):
        raise AssertionError("FFT residual disagrees with direct rows")
    return float(np.linalg.norm(r))
