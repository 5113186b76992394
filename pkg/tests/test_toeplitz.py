import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cglmp.exceptions import DimensionError
from cglmp.toeplitz import SymmetricToeplitz, embedding_size, toeplitz_matvec


def naive_matvec(col, v):
    d = len(col)
    return np.array([sum(col[abs(i - j)] * v[j] for j in range(d)) for i in range(d)])


def test_identity():
    np.testing.assert_allclose(toeplitz_matvec([1.0, 0.0], [3.0, 4.0]), [3.0, 4.0], atol=1e-15)


def test_exchange():
    np.testing.assert_allclose(toeplitz_matvec([0.0, 1.0], [1.0, 2.0]), [2.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("d", [3, 17, 256, 4097])
def test_matches_direct(d, rng):
    col = rng.normal(size=d)
    v = rng.normal(size=d)
    direct = SymmetricToeplitz(col).dense() @ v
    fast = toeplitz_matvec(col, v)
    assert np.linalg.norm(fast - direct) <= 1e-10 * np.linalg.norm(direct)


def test_matches_pure_python(rng):
    col, v = rng.normal(size=9), rng.normal(size=9)
    np.testing.assert_allclose(toeplitz_matvec(col, v), naive_matvec(col, v), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("d,n", [(1, 2), (2, 4), (3, 8), (4, 8), (5, 16), (1024, 2048), (1025, 4096)])
def test_embedding_size(d, n):
    assert embedding_size(d) == n


def test_deterministic(rng):
    col, v = rng.normal(size=1000), rng.normal(size=1000)
    assert toeplitz_matvec(col, v).tobytes() == toeplitz_matvec(col, v).tobytes()


def test_length_mismatch():
    with pytest.raises(DimensionError):
        toeplitz_matvec([1.0, 2.0], [1.0, 2.0, 3.0])


def test_row_matches_dense(rng):
    T = SymmetricToeplitz(rng.normal(size=12))
    dense = T.dense()
    for i in (0, 5, 11):
        np.testing.assert_array_equal(T.row(i), dense[i])


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 300), st.integers(0, 2**32 - 1))
def test_property_matches_dense(d, seed):
    rng = np.random.default_rng(seed)
    col, v = rng.normal(size=d), rng.normal(size=d)
    T = SymmetricToeplitz(col)
    np.testing.assert_allclose(T.matvec(v), T.dense() @ v, rtol=1e-10, atol=1e-10 * np.abs(col).sum() * np.abs(v).max())
