"""States, projective measurements and joint outcome probabilities.

A bipartite pure state is kept in Schmidt form ``sum_i lam_i |ii>``, so it is
fully described by the real vector ``lam``. A nondegenerate projective
measurement is a unitary whose column ``k`` is the eigenvector for outcome
``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import CGLMPError, DimensionError

ALICE = "Alice"
BOB = "Bob"

#: Phases of the conjectured optimal settings, keyed by (party, setting).
BEST_PHASES = {
    (ALICE, 1): 0.0,
    (ALICE, 2): 0.5,
    (BOB, 1): 0.25,
    (BOB, 2): -0.25,
}

NORM_TOL = 1e-12
ORTHO_TOL = 1e-10
NEG_PROB_TOL = 1e-12
PROB_SUM_TOL = 1e-10


def _readonly(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SchmidtState:
    """Real Schmidt coefficients of ``sum_i coeffs[i] |ii>``.

    Entries may carry either sign; the squared entries are the Schmidt
    weights. Use :func:`make_schmidt_state` to build one from an
    unnormalized vector.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 1:
            raise DimensionError("Schmidt coefficients must be a 1-d vector")
        if coeffs.size < 2:
            raise DimensionError("dimension too small: need d >= 2")
        if not np.all(np.isfinite(coeffs)):
            raise CGLMPError("Schmidt coefficients must be finite")
        norm = np.linalg.norm(coeffs)
        if abs(norm - 1.0) > NORM_TOL:
            raise CGLMPError(f"Schmidt vector is not normalized (norm={norm!r})")
        object.__setattr__(self, "coeffs", _readonly(coeffs))

    @property
    def d(self) -> int:
        return self.coeffs.size

    def vector(self) -> np.ndarray:
        """Return the state as a length ``d*d`` vector in the product basis."""
        psi = np.zeros((self.d, self.d))
        psi[np.diag_indices(self.d)] = self.coeffs
        return psi.ravel()


def make_schmidt_state(coeffs) -> SchmidtState:
    """Normalize ``coeffs`` and wrap it as a :class:`SchmidtState`.

    >>> make_schmidt_state([1, 1]).coeffs
    array([0.70710678, 0.70710678])
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or coeffs.size < 2:
        raise DimensionError("dimension too small: need d >= 2")
    norm = np.linalg.norm(coeffs)
    if norm == 0.0:
        raise CGLMPError("degenerate state: all Schmidt coefficients are zero")
    return SchmidtState(coeffs / norm)


def maximally_entangled(d: int) -> SchmidtState:
    return make_schmidt_state(np.ones(d))


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal eigenbasis of one projective measurement.

    ``vectors[:, k]`` is the eigenvector for outcome ``k``.
    """

    vectors: np.ndarray
    party: str = ALICE
    setting: int = 1
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=complex)
        if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1]:
            raise DimensionError("basis must be a square matrix of column vectors")
        if self.party not in (ALICE, BOB):
            raise CGLMPError(f"unknown party {self.party!r}")
        if self.setting not in (1, 2):
            raise CGLMPError(f"setting must be 1 or 2, got {self.setting!r}")
        if self.check:
            gram = vectors.conj().T @ vectors
            err = np.max(np.abs(gram - np.eye(vectors.shape[0])))
            if err > ORTHO_TOL:
                raise CGLMPError(f"basis columns are not orthonormal (max error {err:.3g})")
        object.__setattr__(self, "vectors", _readonly(vectors))

    @property
    def d(self) -> int:
        return self.vectors.shape[0]

    def projectors(self) -> np.ndarray:
        """Rank-one projectors, shape ``(d, d, d)`` indexed by outcome first."""
        v = self.vectors
        return np.einsum("ik,jk->kij", v, v.conj())


def best_basis(d: int, party: str, phase: float | None = None, setting: int = 1) -> MeasurementBasis:
    """Fourier-type basis with a fractional phase offset.

    Alice's column ``i`` has entries ``exp(2j*pi*k*(i + phase)/d)/sqrt(d)``;
    Bob's column ``j`` has ``exp(2j*pi*l*(-j + phase)/d)/sqrt(d)``. With
    ``phase=None`` the conjectured optimal phase for ``(party, setting)`` is
    used.
    """
    if d < 1:
        raise DimensionError("d must be >= 1")
    if phase is None:
        phase = BEST_PHASES[(party, setting)]
    sign = {ALICE: 1.0, BOB: -1.0}.get(party)
    if sign is None:
        raise CGLMPError(f"unknown party {party!r}")
    k = np.arange(d)[:, None]
    out = np.arange(d)[None, :]
    vectors = np.exp(2j * np.pi * k * (sign * out + phase) / d) / np.sqrt(d)
    return MeasurementBasis(vectors, party=party, setting=setting)


def best_bases(d: int) -> tuple[MeasurementBasis, MeasurementBasis, MeasurementBasis, MeasurementBasis]:
    """The conjectured optimal settings ``(A1, A2, B1, B2)``."""
    return (
        best_basis(d, ALICE, setting=1),
        best_basis(d, ALICE, setting=2),
        best_basis(d, BOB, setting=1),
        best_basis(d, BOB, setting=2),
    )


@dataclass(frozen=True)
class ProbTable:
    """Joint outcome distribution ``values[a-1, b-1, i, j] = P(i, j | a, b)``."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 4 or values.shape[:2] != (2, 2) or values.shape[2] != values.shape[3]:
            raise DimensionError("probability table must have shape (2, 2, d, d)")
        low = values.min()
        if low < -NEG_PROB_TOL:
            raise CGLMPError(f"negative probability {low!r}")
        values[values < 0] = 0.0
        sums = values.sum(axis=(2, 3))
        err = np.max(np.abs(sums - 1.0))
        if err > PROB_SUM_TOL:
            raise CGLMPError(f"probability slices do not sum to one (max error {err:.3g})")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def d(self) -> int:
        return self.values.shape[2]

    def __getitem__(self, settings):
        a, b = settings
        return self.values[a - 1, b - 1]


def _amplitudes(coeffs, alice_vectors, bob_vectors):
    # <psi| (|i>_A (x) |j>_B) with psi = sum_k lam_k |kk>
    return (alice_vectors.conj().T * coeffs) @ bob_vectors.conj()


def _check_bases(d, A1, A2, B1, B2):
    for basis, party in ((A1, ALICE), (A2, ALICE), (B1, BOB), (B2, BOB)):
        if basis.d != d:
            raise DimensionError(f"basis dimension {basis.d} does not match state dimension {d}")
        if basis.party != party:
            raise CGLMPError(f"expected a basis for {party}, got one labeled {basis.party}")


def joint_prob_table(state: SchmidtState, A1, A2, B1, B2) -> ProbTable:
    """Quantum joint probabilities for the four setting pairs."""
    _check_bases(state.d, A1, A2, B1, B2)
    values = np.empty((2, 2, state.d, state.d))
    for a, alice in enumerate((A1, A2)):
        for b, bob in enumerate((B1, B2)):
            amp = _amplitudes(state.coeffs, alice.vectors, bob.vectors)
            values[a, b] = amp.real**2 + amp.imag**2
    return ProbTable(values)


def entanglement_entropy(state: SchmidtState) -> float:
    """Von Neumann entropy of the reduced state in bits."""
    p = state.coeffs**2
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def normalized_entropy(state: SchmidtState) -> float:
    """Entropy divided by ``log2(d)``; equals 1 for the maximally entangled state."""
    return entanglement_entropy(state) / np.log2(state.d)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))
