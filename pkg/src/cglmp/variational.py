"""Free optimization of the functional over the state and all four measurements.

Each basis is charted as ``U = U_ref @ expm(1j * H)`` with ``H`` Hermitian and
built from ``d*d`` real numbers; the state is charted by hyperspherical
angles. The search is a multistart Nelder-Mead run followed by a
coordinate-wise parabolic polish. Restart 0 always starts at the conjectured
optimum, so the reported value can never be worse than the kernel's.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .eigensolver import dense_min_eig
from .exceptions import DimensionError
from .inequality import cglmp_functional, comparison_masks
from .kernel import kernel_matrix
from .quantum import (
    ALICE,
    BOB,
    MeasurementBasis,
    SchmidtState,
    best_bases,
    haar_unitary,
    joint_prob_table,
    make_schmidt_state,
)

logger = logging.getLogger(__name__)

MAX_D = 8
SETTINGS = ((ALICE, 1), (ALICE, 2), (BOB, 1), (BOB, 2))


@dataclass(frozen=True)
class OptimizationResult:
    d: int
    value: float
    state: SchmidtState
    bases: tuple[MeasurementBasis, MeasurementBasis, MeasurementBasis, MeasurementBasis]
    restarts_used: int
    best_restart_seed: int
    converged: bool
    trace: list[tuple[int, float]] = field(default_factory=list, repr=False)

    def to_dict(self, include_trace: bool = False) -> dict:
        out = {
            "d": self.d,
            "value": self.value,
            "schmidt": [float(x) for x in self.state.coeffs],
            "restarts_used": self.restarts_used,
            "best_restart_seed": self.best_restart_seed,
            "converged": self.converged,
            "bases": {
                f"{b.party[0]}{b.setting}": {
                    "real": np.real(b.vectors).tolist(),
                    "imag": np.imag(b.vectors).tolist(),
                }
                for b in self.bases
            },
        }
        if include_trace:
            out["trace"] = [[i, v] for i, v in self.trace]
        return out


# --- charts -----------------------------------------------------------------


def sphere_point(angles: np.ndarray) -> np.ndarray:
    """Unit vector from ``d - 1`` hyperspherical angles."""
    d = angles.size + 1
    out = np.ones(d)
    sines = np.concatenate(([1.0], np.cumprod(np.sin(angles))))
    out[:-1] = sines[:-1] * np.cos(angles)
    out[-1] = sines[-1]
    return out


def sphere_angles(lam: np.ndarray) -> np.ndarray:
    """Inverse of :func:`sphere_point` for a unit vector."""
    lam = np.asarray(lam, dtype=float)
    tails = np.sqrt(np.cumsum((lam**2)[::-1])[::-1])
    angles = np.arccos(np.clip(lam[:-2] / np.where(tails[:-2] > 0, tails[:-2], 1.0), -1, 1))
    last = np.arctan2(lam[-1], lam[-2])
    return np.concatenate((angles, [last]))


def hermitian(params: np.ndarray, d: int) -> np.ndarray:
    """Hermitian matrices from real parameters, shape ``(..., d*d) -> (..., d, d)``."""
    params = np.asarray(params)
    lead = params.shape[:-1]
    iu = np.triu_indices(d, 1)
    n_off = iu[0].size
    H = np.zeros(lead + (d, d), dtype=complex)
    H[..., np.arange(d), np.arange(d)] = params[..., :d]
    off = params[..., d : d + n_off] + 1j * params[..., d + n_off :]
    H[..., iu[0], iu[1]] = off
    H[..., iu[1], iu[0]] = off.conj()
    return H


def unitary_exp(params: np.ndarray, d: int) -> np.ndarray:
    """``expm(1j * H)`` for stacked Hermitian generators via eigendecomposition."""
    w, V = np.linalg.eigh(hermitian(params, d))
    return (V * np.exp(1j * w)[..., None, :]) @ np.swapaxes(V.conj(), -1, -2)


class Objective:
    """Functional as a function of the flattened chart parameters."""

    def __init__(self, d: int, refs: np.ndarray, signed_state: bool = False):
        self.d = d
        self.refs = refs  # (4, d, d): A1, A2, B1, B2
        self.signed_state = signed_state
        self.mask = comparison_masks(d)
        self.n_params = d - 1 + 4 * d * d
        self.nfev = 0

    def unpack(self, x):
        d = self.d
        lam = sphere_point(x[: d - 1])
        if not self.signed_state:
            lam = np.abs(lam)
        U = self.refs @ unitary_exp(x[d - 1 :].reshape(4, d * d), d)
        return lam, U

    def __call__(self, x) -> float:
        self.nfev += 1
        lam, U = self.unpack(x)
        Uc = U.conj()
        alice = np.swapaxes(Uc[:2], -1, -2) * lam  # (2, i, k)
        amp = alice[:, None] @ Uc[None, 2:]  # (2, 2, i, j)
        prob = amp.real**2 + amp.imag**2
        return float(prob[self.mask].sum())


# --- single restart ---------------------------------------------------------


def _parabolic_polish(f, x, fx, h=1e-3, sweeps=20, budget=20_000):
    """Coordinate-wise parabola fits; a move is kept only if it lowers ``f``."""
    x = x.copy()
    evals = 0
    for _ in range(sweeps):
        improved = False
        for i in range(x.size):
            if evals + 3 > budget:
                return x, fx
            e = np.zeros_like(x)
            e[i] = h
            candidates = [(f(x + e), x + e), (f(x - e), x - e)]
            evals += 2
            (fp, _), (fm, _) = candidates
            curv = fp - 2 * fx + fm
            if curv > 0:
                step = -0.5 * h * (fp - fm) / curv
                if 0 < abs(step) <= 4 * h:
                    trial = x.copy()
                    trial[i] += step
                    candidates.append((f(trial), trial))
                    evals += 1
            fc, xc = min(candidates, key=lambda c: c[0])
            if fc < fx:
                fx, x = fc, xc
                improved = True
        if not improved:
            h *= 0.25
            if h < 1e-9:
                break
    return x, fx


def _conjectured_start(d):
    lam = np.array(dense_min_eig(kernel_matrix(d)).eigenvector)
    refs = np.stack([b.vectors for b in best_bases(d)])
    return sphere_angles(lam), refs


def _run_restart(d, index, seed, tol, max_iter, signed_state):
    rng = np.random.default_rng(seed)
    if index == 0:
        angles, refs = _conjectured_start(d)
        step = 0.05
    else:
        angles = rng.uniform(0.0, np.pi / 2, d - 1)
        refs = np.stack([haar_unitary(d, rng) for _ in range(4)])
        step = 0.5
    f = Objective(d, refs, signed_state=signed_state)
    x0 = np.concatenate((angles, np.zeros(4 * d * d)))
    simplex = np.vstack((x0, x0 + step * np.eye(x0.size)))

    trace = []
    best = [np.inf]

    def record(intermediate_result):
        if intermediate_result.fun < best[0]:
            best[0] = intermediate_result.fun
            trace.append((f.nfev, float(intermediate_result.fun)))

    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        callback=record,
        options={
            "initial_simplex": simplex,
            "maxfev": max_iter,
            "maxiter": max_iter,
            "fatol": tol,
            "xatol": np.inf,
            "adaptive": True,
        },
    )
    converged = bool(res.status == 0)
    budget = max(0, max_iter - f.nfev)
    x, fx = _parabolic_polish(f, res.x, float(res.fun), budget=min(budget, 50 * x0.size))
    if fx < best[0]:
        trace.append((f.nfev, fx))
    logger.debug("restart %d (seed %d): value %.10f after %d evals", index, seed, fx, f.nfev)
    return fx, x, f, converged, trace


def _assemble(d, x, f, value, restarts, seed, converged, trace):
    lam, U = f.unpack(x)
    state = make_schmidt_state(lam)
    bases = tuple(MeasurementBasis(U[s], party=p, setting=k) for s, (p, k) in enumerate(SETTINGS))
    # recompute through the public pipeline for self-consistency
    value = cglmp_functional(joint_prob_table(state, *bases))
    return OptimizationResult(d, value, state, bases, restarts, seed, converged, trace)


def optimize_full(
    d: int,
    restarts: int = 8,
    seed: int = 42,
    tol: float = 1e-9,
    max_iter: int = 200_000,
    threads: int = 1,
    signed_state: bool = False,
) -> OptimizationResult:
    """Minimize the functional over states and nondegenerate projective measurements.

    Restart ``r`` uses seed ``seed + r``; restart 0 starts from the
    conjectured optimal bases and the kernel eigenvector. The best restart
    wins, ties going to the smaller seed.
    """
    if not 2 <= d <= MAX_D:
        raise DimensionError(f"variational search supports 2 <= d <= {MAX_D}, got {d}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    seeds = [seed + r for r in range(restarts)]
    args = [(d, r, s, tol, max_iter, signed_state) for r, s in enumerate(seeds)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(lambda a: _run_restart(*a), args))
    else:
        runs = [_run_restart(*a) for a in args]
    best = min(range(restarts), key=lambda r: (runs[r][0], seeds[r]))
    value, x, f, converged, trace = runs[best]
    return _assemble(d, x, f, value, restarts, seeds[best], converged, trace)


def measurement_gauge_distance(found, state: SchmidtState) -> float:
    """Max-norm distance between the tables of ``found`` and of the conjectured bases.

    Both tables use ``state``. The comparison is also made after reversing
    every outcome label on both sides, and the smaller distance is returned.
    """
    found = tuple(found)
    if any(b.d != state.d for b in found):
        raise DimensionError("bases and state dimensions differ")
    got = joint_prob_table(state, *found).values
    ref = joint_prob_table(state, *best_bases(state.d)).values
    direct = np.max(np.abs(got - ref))
    reversed_ = np.max(np.abs(got[:, :, ::-1, ::-1] - ref))
    return float(min(direct, reversed_))
