import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cglmp.exceptions import CGLMPError, DimensionError
from cglmp.eigensolver import dense_min_eig
from cglmp.inequality import LRStrategy, cglmp_functional, lr_min, lr_value, lr_values
from cglmp.kernel import kernel_matrix
from cglmp.quantum import ALICE, BOB, MeasurementBasis, ProbTable, best_bases, haar_unitary, joint_prob_table, make_schmidt_state


def brute_force_min(d):
    """Plain-Python enumeration, kept separate from the vectorized path."""
    best = None
    for a1, a2, b1, b2 in itertools.product(range(d), repeat=4):
        v = (a2 < b2) + (b2 < a1) + (a1 < b1) + (b1 <= a2)
        if best is None or v < best[0]:
            best = (v, (a1, a2, b1, b2))
    return best


def test_lr_value_examples():
    assert lr_value(LRStrategy(2, 0, 0, 0, 0)) == 1
    assert lr_value(LRStrategy(2, 1, 0, 0, 1)) == 2


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_lr_min_matches_brute_force(d):
    value, strategy = lr_min(d)
    bf_value, bf_strategy = brute_force_min(d)
    assert value == bf_value == 1
    assert strategy.outcomes == bf_strategy


def test_lr_min_d2_strategy():
    assert lr_min(2)[1].outcomes == (0, 0, 0, 0)


@pytest.mark.parametrize("d", range(2, 11))
def test_lr_bound_every_strategy(d):
    values = lr_values(d)
    assert values.dtype.kind == "i"
    assert values.min() >= 1
    assert values.max() <= 4


def test_lr_values_agree_with_scalar():
    d = 4
    values = lr_values(d)
    for s in itertools.product(range(d), repeat=4):
        assert values[s] == lr_value(LRStrategy(d, *s))


def test_cap():
    with pytest.raises(DimensionError, match="cap"):
        lr_min(21)
    assert lr_min(3, cap=3)[0] == 1


def test_strategy_range_checked():
    with pytest.raises(CGLMPError):
        LRStrategy(2, 0, 2, 0, 0)


def test_functional_zero_strategy():
    assert cglmp_functional(LRStrategy(3, 0, 0, 0, 0).prob_table()) == 1.0


@pytest.mark.parametrize("d", [2, 3, 4])
def test_functional_of_strategy_tables_equals_lr_value(d):
    for s in itertools.product(range(d), repeat=4):
        strat = LRStrategy(d, *s)
        assert cglmp_functional(strat.prob_table()) == lr_value(strat)


def random_table(d, rng):
    lam = make_schmidt_state(rng.normal(size=d))
    bases = [MeasurementBasis(haar_unitary(d, rng), party=p, setting=s)
             for p, s in ((ALICE, 1), (ALICE, 2), (BOB, 1), (BOB, 2))]
    return joint_prob_table(lam, *bases)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_complement_identity_and_range(d, seed):
    t = random_table(d, np.random.default_rng(seed))
    i, j = np.indices((d, d))
    p21 = t[2, 1]
    assert p21[i < j].sum() + p21[i >= j].sum() == pytest.approx(1.0, abs=1e-10)
    assert 0.0 <= cglmp_functional(t) <= 4.0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_mixtures_of_strategies_obey_bound(d, seed):
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(8))
    values = np.zeros((2, 2, d, d))
    for w in weights:
        values += w * LRStrategy(d, *rng.integers(0, d, 4)).prob_table().values
    assert cglmp_functional(ProbTable(values)) >= 1 - 1e-12


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_quantum_violation(d):
    lam = make_schmidt_state(dense_min_eig(kernel_matrix(d)).eigenvector)
    assert cglmp_functional(joint_prob_table(lam, *best_bases(d))) < 1


def test_functional_uses_expected_cells():
    # one unit of probability on a single cell per setting pair
    d = 3
    values = np.zeros((2, 2, d, d))
    values[0, 0, 0, 1] = 1  # A1 < B1 counts
    values[0, 1, 0, 1] = 1  # B2 < A1 does not
    values[1, 0, 1, 1] = 1  # B1 <= A2 counts on the diagonal
    values[1, 1, 2, 1] = 1  # A2 < B2 does not
    assert cglmp_functional(ProbTable(values)) == 2.0
