import numpy as np
import pytest

from cglmp.inequality import comparison_masks


def functional_by_projectors(lam, bases):
    """Reference functional through Kronecker products of explicit projectors.

    Deliberately shares nothing with the amplitude formula used by the
    library: the state is a full d*d vector and each probability is
    <psi| P_i (x) Q_j |psi>.
    """
    d = len(lam)
    psi = np.zeros(d * d, dtype=complex)
    for k in range(d):
        psi[k * d + k] = lam[k]
    A1, A2, B1, B2 = bases
    total = 0.0
    terms = [(A2, B2, lambda i, j: i < j), (A1, B2, lambda i, j: j < i),
             (A1, B1, lambda i, j: i < j), (A2, B1, lambda i, j: j <= i)]
    for A, B, rel in terms:
        for i in range(d):
            a = np.outer(A[:, i], A[:, i].conj())
            for j in range(d):
                if rel(i, j):
                    b = np.outer(B[:, j], B[:, j].conj())
                    total += np.real(psi.conj() @ np.kron(a, b) @ psi)
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def masks():
    return comparison_masks
