"""Problem types and front-end solvers for sparse recovery.

Column indices here are ordinary 0-based numpy positions.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import GuardrailError
from ..sampling import DirectionSet
from .interior_point import linprog_standard
from .iht import iht

SOLVERS = ("iht", "l1_equality")
LP_MAX_DIM = 64


@dataclass(frozen=True)
class VectorRecoveryProblem:
    y: np.ndarray
    directions: DirectionSet
    s: int = None
    solver: str = "iht"

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "y", y)
        if y.shape[0] != self.directions.m:
            raise ValueError(f"{y.shape[0]} measurements for {self.directions.m} directions")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {SOLVERS}")
        if self.solver == "iht":
            if self.s is None or not 1 <= self.s <= self.directions.dim:
                raise ValueError(f"IHT needs a sparsity budget in [1, d], got {self.s}")


@dataclass(frozen=True)
class MatrixRecoveryProblem:
    y: np.ndarray
    directions: DirectionSet
    eta: float = 0.0

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "y", y)
        if y.shape[0] != self.directions.m:
            raise ValueError(f"{y.shape[0]} measurements for {self.directions.m} directions")
        if self.eta < 0:
            raise ValueError(f"residual budget must be >= 0, got {self.eta}")


def l1_equality(V, y, tol=1e-8):
    """Minimum l1-norm solution of ``V z = y`` via the interior point LP.

    Written as ``z = u - v`` with ``u, v >= 0``.  The LP solution is then
    snapped to its vertex by a least-squares solve on the detected support,
    kept only if it stays feasible and is no worse in l1 norm.
    """
    V = np.asarray(V, dtype=float)
    y = np.asarray(y, dtype=float)
    m, d = V.shape
    if not np.any(y):
        return np.zeros(d)
    A = np.hstack([V, -V])
    res = linprog_standard(np.ones(2 * d), A, y, tol=tol)
    z = res.x[:d] - res.x[d:]
    scale = np.max(np.abs(z))
    S = np.flatnonzero(np.abs(z) > 1e-7 * scale)
    if 0 < S.size <= m:
        sol, *_ = np.linalg.lstsq(V[:, S], y, rcond=None)
        snapped = np.zeros(d)
        snapped[S] = sol
        feasible = np.linalg.norm(V @ snapped - y) <= max(np.linalg.norm(V @ z - y), 1e-12 * np.linalg.norm(y))
        if feasible and np.abs(snapped).sum() <= np.abs(z).sum() * (1 + 1e-7):
            return snapped
    return z


def _solve(V, y, s, solver):
    if solver == "iht":
        return iht(V, y, s)
    if np.ndim(y) == 1:
        return l1_equality(V, y)
    return np.column_stack([l1_equality(V, col) for col in np.asarray(y).T])


def recover_vector(problem):
    """Sparse vector from ``y = V z`` (``iht`` or ``l1_equality``)."""
    return _solve(problem.directions.rows, problem.y, problem.s, problem.solver)


def recover_vector_restricted(problem, active):
    """As :func:`recover_vector`, searching only over the columns in ``active``."""
    active = np.asarray(sorted(set(int(a) for a in active)), dtype=int)
    V = problem.directions.rows
    out = np.zeros((V.shape[1],) + np.shape(problem.y)[1:])
    if active.size == 0:
        return out
    s = None if problem.s is None else min(problem.s, active.size)
    out[active] = _solve(V[:, active], problem.y, s, problem.solver)
    return out


def symmetric_measurement_matrix(V):
    """Rows ``v^T H v`` in the upper-triangle parameterization of H.

    Column order follows ``np.triu_indices(d)``; diagonal columns hold
    ``v_i^2`` and off-diagonal columns ``2 v_i v_j``.
    """
    V = np.asarray(V, dtype=float)
    iu, ju = np.triu_indices(V.shape[1])
    M = V[:, iu] * V[:, ju]
    M[:, iu != ju] *= 2.0
    return M, iu, ju


def recover_symmetric_matrix(problem, d=None):
    """Entrywise-l1 minimal symmetric H with ``||y - M(H)||_1 <= eta``.

    Variables: ``h+ , h-`` over the upper triangle (l1 weight 2 off the
    diagonal, 1 on it), residual parts ``r+, r-`` and one slack closing the
    budget row ``sum(r+ + r-) + slack = eta``.  With ``eta = 0`` the residual
    variables are dropped and the constraints become ``M h = y``.
    """
    V = problem.directions.rows
    d = V.shape[1] if d is None else d
    if d != V.shape[1]:
        raise ValueError(f"directions have dimension {V.shape[1]}, expected {d}")
    if d > LP_MAX_DIM:
        raise GuardrailError(f"symmetric LP limited to d <= {LP_MAX_DIM}, got d={d}")
    y = problem.y
    H = np.zeros((d, d))
    if not np.any(y):
        return H
    M, iu, ju = symmetric_measurement_matrix(V)
    m, n = M.shape
    w = np.where(iu == ju, 1.0, 2.0)
    if problem.eta == 0:
        A = np.hstack([M, -M])
        b = y
        c = np.concatenate([w, w])
    else:
        eye = np.eye(m)
        top = np.hstack([M, -M, eye, -eye, np.zeros((m, 1))])
        budget = np.concatenate([np.zeros(2 * n), np.ones(2 * m), [1.0]])
        A = np.vstack([top, budget])
        b = np.concatenate([y, [problem.eta]])
        c = np.concatenate([w, w, np.zeros(2 * m + 1)])
    res = linprog_standard(c, A, b)
    h = res.x[:n] - res.x[n:2 * n]
    H[iu, ju] = h
    H[ju, iu] = h
    return H
