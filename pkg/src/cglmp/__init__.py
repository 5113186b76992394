"""Violation of the order-comparison CGLMP inequality in the 2x2xd scenario."""

from .degenerate import DegenerateMeasurement, degenerate_min, enumerate_groupings
from .eigensolver import EigenResult, dense_min_eig, lanczos_min_eig, min_eig
from .exceptions import CGLMPError, ConvergenceError, DimensionError, PerronViolation
from .inequality import LRStrategy, cglmp_functional, lr_min, lr_value
from .kernel import CATALAN, MAXENT_LIMIT, KernelMatrix, kernel_matrix, maxent_value, quadratic_form
from .quantum import (
    ALICE,
    BOB,
    MeasurementBasis,
    ProbTable,
    SchmidtState,
    best_basis,
    best_bases,
    entanglement_entropy,
    joint_prob_table,
    make_schmidt_state,
    maximally_entangled,
    normalized_entropy,
)
from .toeplitz import SymmetricToeplitz, toeplitz_matvec
from .variational import OptimizationResult, measurement_gauge_distance, optimize_full

__version__ = "0.1.0"
