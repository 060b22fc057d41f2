"""Sparse vector and sparse symmetric matrix recovery."""

from .iht import hard_threshold, iht, restricted_norm_sq, spectral_norm_sq
from .interior_point import LPResult, linprog_standard
from .solvers import (
    LP_MAX_DIM,
    SOLVERS,
    MatrixRecoveryProblem,
    VectorRecoveryProblem,
    l1_equality,
    recover_symmetric_matrix,
    recover_vector,
    recover_vector_restricted,
    symmetric_measurement_matrix,
)

__all__ = [
    "hard_threshold", "iht", "restricted_norm_sq", "spectral_norm_sq", "LPResult", "linprog_standard",
    "LP_MAX_DIM", "SOLVERS", "MatrixRecoveryProblem", "VectorRecoveryProblem",
    "l1_equality", "recover_symmetric_matrix", "recover_vector",
    "recover_vector_restricted", "symmetric_measurement_matrix",
]
