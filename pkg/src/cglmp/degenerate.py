"""Degenerate projective measurements: d outcomes on a D-dimensional system.

A degenerate measurement groups the columns of a D-dimensional orthonormal
basis into d nonempty blocks; block ``k`` spans the eigenspace of outcome
``k``. For fixed measurements the functional is a quadratic form in the real
Schmidt vector of the D-dimensional state, ``lam @ K @ lam``, so the best
state for a configuration is the minimal eigenvector of ``K``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .exceptions import CGLMPError, DimensionError
from .inequality import cglmp_functional, comparison_masks
from .quantum import (
    ALICE,
    BOB,
    MeasurementBasis,
    ProbTable,
    SchmidtState,
    best_basis,
    haar_unitary,
    make_schmidt_state,
)
from .variational import SETTINGS, unitary_exp

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_D = 12
MAX_BIG_D = 20
DEFAULT_MAX_CONFIGS = 2_000_000
COMPLETENESS_TOL = 1e-10


@dataclass(frozen=True)
class DegenerateMeasurement:
    """Basis of dimension D plus an outcome label for each column."""

    base: MeasurementBasis
    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if len(labels) != self.base.d:
            raise DimensionError(f"{len(labels)} labels for a basis of dimension {self.base.d}")
        d = max(labels) + 1
        if min(labels) < 0 or set(labels) != set(range(d)):
            raise CGLMPError(f"labels {labels} do not cover outcomes 0..{d - 1} with nonempty blocks")
        object.__setattr__(self, "labels", labels)
        err = np.max(np.abs(self.projectors().sum(axis=0) - np.eye(self.D)))
        if err > COMPLETENESS_TOL:
            raise CGLMPError(f"projectors do not sum to the identity (error {err:.3g})")

    @property
    def D(self) -> int:
        return self.base.d

    @property
    def d(self) -> int:
        return max(self.labels) + 1

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(c for c, lab in enumerate(self.labels) if lab == k) for k in range(self.d))

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def party(self) -> str:
        return self.base.party

    def projectors(self) -> np.ndarray:
        """Outcome projectors, shape ``(d, D, D)``."""
        rank_one = self.base.projectors()
        out = np.zeros((self.d, self.D, self.D), dtype=complex)
        np.add.at(out, np.asarray(self.labels), rank_one)
        return out


# --- groupings --------------------------------------------------------------


def enumerate_groupings(D: int, d: int, regime: str = "contiguous") -> list[tuple[int, ...]]:
    """Outcome labelings of ``D`` columns into ``d`` nonempty blocks.

    ``contiguous``: blocks are runs of consecutive columns (compositions of
    ``D`` into ``d`` parts). ``general``: every surjective labeling, i.e. all
    ordered set partitions.
    """
    if d >= D:
        raise DimensionError(f"not degenerate: need d < D, got d={d}, D={D}")
    if d < 2:
        raise DimensionError("need at least two outcomes")
    if regime == "contiguous":
        out = []
        for cuts in itertools.combinations(range(1, D), d - 1):
            bounds = (0,) + cuts + (D,)
            out.append(tuple(k for k in range(d) for _ in range(bounds[k], bounds[k + 1])))
        return out
    if regime == "general":
        return [lab for lab in itertools.product(range(d), repeat=D) if len(set(lab)) == d]
    raise ValueError(f"unknown regime {regime!r}")


def embedded_groupings(D: int, d: int) -> list[tuple[int, ...]]:
    """Labelings with columns ``0..d-1`` fixed to outcomes ``0..d-1``.

    The remaining ``D - d`` columns may join any block.
    """
    head = tuple(range(d))
    return [head + tail for tail in itertools.product(range(d), repeat=D - d)]


def embedded_best_basis(D: int, d: int, party: str, setting: int) -> MeasurementBasis:
    """The d-dimensional conjectured basis, padded by the identity on ``D - d`` levels."""
    U = np.eye(D, dtype=complex)
    U[:d, :d] = best_basis(d, party, setting=setting).vectors
    return MeasurementBasis(U, party=party, setting=setting)


# --- probabilities and kernels ---------------------------------------------


def _check_config(measurements):
    if len(measurements) != 4:
        raise CGLMPError("need four measurements (A1, A2, B1, B2)")
    D = {m.D for m in measurements}
    d = {m.d for m in measurements}
    if len(D) != 1 or len(d) != 1:
        raise DimensionError("all four measurements must share D and d")
    for m, (party, _) in zip(measurements, SETTINGS):
        if m.party != party:
            raise CGLMPError(f"expected a measurement for {party}, got {m.party}")
    return D.pop(), d.pop()


def degenerate_prob_table(state: SchmidtState, A1, A2, B1, B2) -> ProbTable:
    """Joint probabilities ``<psi| P_i (x) Q_j |psi>`` from explicit projectors."""
    D, d = _check_config((A1, A2, B1, B2))
    if state.d != D:
        raise DimensionError(f"state dimension {state.d} does not match D={D}")
    psi = state.vector()
    values = np.empty((2, 2, d, d))
    for a, alice in enumerate((A1, A2)):
        PA = alice.projectors()
        for b, bob in enumerate((B1, B2)):
            PB = bob.projectors()
            for i in range(d):
                for j in range(d):
                    values[a, b, i, j] = np.real(psi.conj() @ np.kron(PA[i], PB[j]) @ psi)
    return ProbTable(values)


def _outcome_forms(vectors, labels, d):
    """Per-outcome bilinear forms ``F[i, k, l] = sum_{c in block i} conj(V[k, c]) V[l, c]``."""
    rank_one = np.einsum("kc,lc->ckl", vectors.conj(), vectors)
    out = np.zeros((d,) + rank_one.shape[1:], dtype=complex)
    np.add.at(out, np.asarray(labels), rank_one)
    return out


def _pair_kernel(FA, FB, mask):
    # amplitude(c, e) = sum_k lam_k conj(V[k, c]) conj(W[k, e]), so
    # |amplitude|^2 = lam^T Re(FA[c] * FB[e]) lam elementwise in (k, l)
    return np.real(np.einsum("ij,ikl,jkl->kl", mask, FA, FB))


def config_kernel(A1, A2, B1, B2) -> np.ndarray:
    """Symmetric ``K`` with ``functional(lam) = lam @ K @ lam`` for this configuration."""
    D, d = _check_config((A1, A2, B1, B2))
    mask = comparison_masks(d).astype(float)
    forms = [_outcome_forms(m.base.vectors, m.labels, d) for m in (A1, A2, B1, B2)]
    K = np.zeros((D, D))
    for a in range(2):
        for b in range(2):
            K += _pair_kernel(forms[a], forms[2 + b], mask[a, b])
    return 0.5 * (K + K.T)


def configuration_min(measurements) -> tuple[float, np.ndarray]:
    """Minimal functional value over real unit Schmidt vectors, and its minimizer."""
    w, V = np.linalg.eigh(config_kernel(*measurements))
    return float(w[0]), V[:, 0]


# --- search -----------------------------------------------------------------


@dataclass(frozen=True)
class DegenerateResult:
    d: int
    D: int
    mode: str
    min_value: float
    measurements: tuple[DegenerateMeasurement, ...]
    state: SchmidtState
    seed: int
    samples: int
    n_configs: int
    family: str

    def grouping(self) -> dict[str, list[list[int]]]:
        return {
            f"{p[0]}{s}": [list(b) for b in m.blocks]
            for m, (p, s) in zip(self.measurements, SETTINGS)
        }

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "D": self.D,
            "mode": self.mode,
            "min_value": self.min_value,
            "grouping": self.grouping(),
            "seed": self.seed,
            "samples": self.samples,
        }


def _search_family(bases, groupings, d, max_configs):
    """Best 4-tuple of groupings for fixed bases, by batched eigenvalues.

    Returns ``(value, (g1, g2, h1, h2))`` with ties going to the
    lexicographically first index tuple.
    """
    n = len(groupings)
    if n**4 > max_configs:
        raise CGLMPError(f"{n**4} configurations exceed the cap {max_configs}")
    mask = comparison_masks(d).astype(float)
    forms = [[_outcome_forms(B.vectors, g, d) for g in groupings] for B in bases]
    # pair[a][b][g, h] is the (a, b) kernel for Alice grouping g and Bob grouping h
    pair = [
        [np.stack([np.stack([_pair_kernel(fa, fb, mask[a, b]) for fb in forms[2 + b]]) for fa in forms[a]])
         for b in range(2)]
        for a in range(2)
    ]
    best = (np.inf, None)
    for g1 in range(n):
        for g2 in range(n):
            # axes (h1, h2, k, l)
            K = (
                pair[1][1][g2][None, :]
                + pair[0][1][g1][None, :]
                + pair[0][0][g1][:, None]
                + pair[1][0][g2][:, None]
            )
            K = 0.5 * (K + np.swapaxes(K, -1, -2))
            low = np.linalg.eigvalsh(K)[..., 0]
            idx = int(np.argmin(low))
            if low.flat[idx] < best[0]:
                h1, h2 = np.unravel_index(idx, low.shape)
                best = (float(low.flat[idx]), (g1, g2, int(h1), int(h2)))
    return best[0], best[1], n**4


def _refine(measurements, evals):
    """Local search over the four bases with groupings held fixed."""
    D, _ = _check_config(measurements)
    refs = np.stack([m.base.vectors for m in measurements])
    labels = [m.labels for m in measurements]

    def build(x):
        U = refs @ unitary_exp(x.reshape(4, D * D), D)
        return tuple(
            DegenerateMeasurement(MeasurementBasis(U[s], party=p, setting=k, check=False), labels[s])
            for s, (p, k) in enumerate(SETTINGS)
        )

    def f(x):
        return configuration_min(build(x))[0]

    x0 = np.zeros(4 * D * D)
    simplex = np.vstack((x0, x0 + 0.05 * np.eye(x0.size)))
    res = minimize(f, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "maxfev": evals, "fatol": 1e-10, "xatol": np.inf})
    if res.fun < f(x0):
        U = refs @ unitary_exp(res.x.reshape(4, D * D), D)
        return tuple(
            DegenerateMeasurement(MeasurementBasis(U[s], party=p, setting=k), labels[s])
            for s, (p, k) in enumerate(SETTINGS)
        )
    return tuple(measurements)


def _random_labels(D, d, rng):
    perm = rng.permutation(D)
    labels = np.empty(D, dtype=int)
    labels[perm[:d]] = np.arange(d)
    labels[perm[d:]] = rng.integers(0, d, D - d)
    return tuple(int(x) for x in labels)


def degenerate_min(
    d: int,
    D: int,
    mode: str = "exhaustive",
    samples: int = 500,
    seed: int = 42,
    regime: str = "contiguous",
    refine_evals: int = 2000,
    max_configs: int = DEFAULT_MAX_CONFIGS,
) -> DegenerateResult:
    """Smallest functional value over degenerate configurations and D-dim states.

    ``exhaustive`` searches two basis families with every grouping of the
    chosen ``regime``: the D-dimensional conjectured bases, and the
    d-dimensional conjectured bases padded by the identity. The winning
    configuration is then locally refined over its bases (``refine_evals``
    objective evaluations; 0 disables). ``random`` draws ``samples``
    configurations, each basis a Haar-random rotation of the conjectured one
    with a random grouping.
    """
    if not 2 <= d < D:
        raise DimensionError(f"not degenerate: need 2 <= d < D, got d={d}, D={D}")
    if D > MAX_BIG_D:
        raise DimensionError(f"D={D} exceeds the supported maximum {MAX_BIG_D}")

    if mode == "exhaustive":
        if D > EXHAUSTIVE_MAX_D:
            raise DimensionError(f"exhaustive mode supports D <= {EXHAUSTIVE_MAX_D}")
        families = {
            "best": ([best_basis(D, p, setting=s) for p, s in SETTINGS], enumerate_groupings(D, d, regime)),
            "embedded": ([embedded_best_basis(D, d, p, s) for p, s in SETTINGS], embedded_groupings(D, d)),
        }
        best = None
        n_configs = 0
        for name, (bases, groupings) in families.items():
            value, idx, count = _search_family(bases, groupings, d, max_configs)
            n_configs += count
            logger.debug("family %s: %d configurations, min %.10f", name, count, value)
            if best is None or value < best[0]:
                best = (value, name, tuple(DegenerateMeasurement(B, groupings[g]) for B, g in zip(bases, idx)))
        _, family, measurements = best
        if refine_evals > 0:
            measurements = _refine(measurements, refine_evals)
        used_samples = 0
    elif mode == "random":
        if samples < 1:
            raise ValueError("samples must be >= 1 in random mode")
        rng = np.random.default_rng(seed)
        refs = [best_basis(D, p, setting=s).vectors for p, s in SETTINGS]
        best = None
        for sample in range(samples):
            measurements = tuple(
                DegenerateMeasurement(
                    MeasurementBasis(haar_unitary(D, rng) @ ref, party=p, setting=s),
                    _random_labels(D, d, rng),
                )
                for ref, (p, s) in zip(refs, SETTINGS)
            )
            value, _ = configuration_min(measurements)
            if best is None or value < best[0]:
                best = (value, measurements)
        measurements = best[1]
        family = "haar"
        n_configs = used_samples = samples
    else:
        raise ValueError(f"unknown mode {mode!r}")

    value, lam = configuration_min(measurements)
    if lam[np.argmax(np.abs(lam))] < 0:
        lam = -lam
    return DegenerateResult(
        d=d,
        D=D,
        mode=mode,
        min_value=value,
        measurements=measurements,
        state=make_schmidt_state(lam),
        seed=seed,
        samples=used_samples,
        n_configs=n_configs,
        family=family,
    )


def degenerate_functional(state: SchmidtState, measurements) -> float:
    """Functional evaluated through explicit projectors (independent of ``config_kernel``)."""
    return cglmp_functional(degenerate_prob_table(state, *measurements))

