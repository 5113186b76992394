"""The order-comparison Bell functional and its local-realistic bound.

The functional is

    P(A2 < B2) + P(B2 < A1) + P(A1 < B1) + P(B1 <= A2)

and every local-realistic model satisfies ``value >= 1``. Since the local
polytope's vertices are deterministic strategies, the bound is certified by
enumerating all ``d**4`` of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import CGLMPError, DimensionError
from .quantum import ProbTable

DEFAULT_ENUMERATION_CAP = 20


def comparison_masks(d: int) -> np.ndarray:
    """Boolean masks of shape ``(2, 2, d, d)`` selecting the summed cells.

    ``masks[a-1, b-1, i, j]`` is true when the cell with Alice outcome ``i``
    and Bob outcome ``j`` of setting pair ``(a, b)`` contributes.
    """
    i, j = np.indices((d, d))
    masks = np.empty((2, 2, d, d), dtype=bool)
    masks[1, 1] = i < j  # A2 < B2
    masks[0, 1] = j < i  # B2 < A1
    masks[0, 0] = i < j  # A1 < B1
    masks[1, 0] = j <= i  # B1 <= A2
    return masks


def cglmp_functional(table: ProbTable) -> float:
    """Evaluate the functional on a joint probability table."""
    if not isinstance(table, ProbTable):
        table = ProbTable(table)
    return float(np.sum(table.values[comparison_masks(table.d)]))


@dataclass(frozen=True)
class LRStrategy:
    """Deterministic outcome for each of the four settings."""

    d: int
    a1: int
    a2: int
    b1: int
    b2: int

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            value = getattr(self, name)
            if not 0 <= value < self.d:
                raise CGLMPError(f"{name}={value} outside 0..{self.d - 1}")

    @property
    def outcomes(self) -> tuple[int, int, int, int]:
        return (self.a1, self.a2, self.b1, self.b2)

    def prob_table(self) -> ProbTable:
        """Point-mass table of this strategy."""
        values = np.zeros((2, 2, self.d, self.d))
        for a, alice in enumerate((self.a1, self.a2)):
            for b, bob in enumerate((self.b1, self.b2)):
                values[a, b, alice, bob] = 1.0
        return ProbTable(values)


def lr_value(strategy: LRStrategy) -> float:
    a1, a2, b1, b2 = strategy.outcomes
    return float(int(a2 < b2) + int(b2 < a1) + int(a1 < b1) + int(b1 <= a2))


def lr_values(d: int) -> np.ndarray:
    """Integer functional values for all strategies, indexed ``[a1, a2, b1, b2]``."""
    r = np.arange(d)
    a1 = r[:, None, None, None]
    a2 = r[None, :, None, None]
    b1 = r[None, None, :, None]
    b2 = r[None, None, None, :]
    return (
        (a2 < b2).astype(np.int64)
        + (b2 < a1)
        + (a1 < b1)
        + (b1 <= a2)
    )


def lr_min(d: int, cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[float, LRStrategy]:
    """Exhaustive minimum over deterministic strategies.

    Ties go to the lexicographically smallest ``(a1, a2, b1, b2)``.
    """
    if d < 2:
        raise DimensionError("d must be >= 2")
    if d > cap:
        raise DimensionError(
            f"d={d} exceeds the enumeration cap {cap} ({d**4} strategies); "
            "raise the cap explicitly (cap=... / --cap) to proceed"
        )
    values = lr_values(d)
    # argmin on a C-ordered array returns the lexicographically first minimizer
    flat = int(np.argmin(values))
    best = LRStrategy(d, *(int(x) for x in np.unravel_index(flat, values.shape)))
    return float(values.flat[flat]), best
