"""Dense Mehrotra predictor-corrector method for standard-form LPs.

Solves ``min c^T x  s.t.  A x = b, x >= 0`` and its dual
``max b^T y  s.t.  A^T y + s = c, s >= 0``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..exceptions import ConvergenceError, InfeasibleError

TOL = 1e-8
MAX_ITER = 200


@dataclass
class LPResult:
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    iterations: int
    gap: float
    primal_residual: float
    dual_residual: float


def _solve_normal(A, D, rhs):
    M = (A * D) @ A.T
    reg = 1e-14 * max(1.0, np.trace(M) / M.shape[0])
    M[np.diag_indices_from(M)] += reg
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(M, check_finite=False), rhs,
                                      check_finite=False)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(M, rhs, rcond=None)[0]


def _max_step(v, dv):
    neg = dv < 0
    if not np.any(neg):
        return 1.0
    return min(1.0, float(np.min(-v[neg] / dv[neg])))


def linprog_standard(c, A, b, tol=TOL, max_iter=MAX_ITER):
    """Primal-dual interior point solve of a standard-form LP.

    Convergence requires relative primal and dual residuals and the relative
    duality gap all below ``tol``.  Diverging iterates are reported as
    :class:`InfeasibleError`; running out of iterations as
    :class:`ConvergenceError` carrying the last primal iterate.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape

    # Mehrotra's starting point
    AAt = A @ A.T + 1e-12 * np.eye(m)
    x = A.T @ np.linalg.solve(AAt, b)
    y = np.linalg.solve(AAt, A @ c)
    s = c - A.T @ y
    dx = max(-1.5 * x.min(), 0.0)
    ds = max(-1.5 * s.min(), 0.0)
    x, s = x + dx, s + ds
    xs = x @ s
    x = x + 0.5 * xs / max(s.sum(), 1e-300)
    s = s + 0.5 * xs / max(x.sum(), 1e-300)
    x = np.maximum(x, 1e-8)
    s = np.maximum(s, 1e-8)

    bnorm, cnorm = 1.0 + np.linalg.norm(b), 1.0 + np.linalg.norm(c)
    for it in range(max_iter):
        rb = A @ x - b
        rc = A.T @ y + s - c
        pobj, dobj = c @ x, b @ y
        gap = abs(pobj - dobj) / (1.0 + abs(pobj))
        pres, dres = np.linalg.norm(rb) / bnorm, np.linalg.norm(rc) / cnorm
        if pres <= tol and dres <= tol and gap <= tol:
            return LPResult(x, y, s, it, gap, pres, dres)
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > 1e12 * bnorm:
            raise InfeasibleError("primal iterates diverged; the constraint set looks infeasible")

        mu = xs_mean = (x @ s) / n
        D = x / s

        def direction(rxs):
            rhs = -rb - A @ ((rxs + x * rc) / s)
            dy = _solve_normal(A, D, rhs)
            ds_ = -rc - A.T @ dy
            dx_ = (rxs - x * ds_) / s
            return dx_, dy, ds_

        dx_a, dy_a, ds_a = direction(-x * s)
        ap, ad = _max_step(x, dx_a), _max_step(s, ds_a)
        mu_aff = ((x + ap * dx_a) @ (s + ad * ds_a)) / n
        sigma = (mu_aff / xs_mean) ** 3
        dx_, dy, ds_ = direction(-x * s - dx_a * ds_a + sigma * mu)
        ap = min(1.0, 0.995 * _max_step(x, dx_))
        ad = min(1.0, 0.995 * _max_step(s, ds_))
        x = x + ap * dx_
        y = y + ad * dy
        s = s + ad * ds_

    rb = A @ x - b
    if np.linalg.norm(rb) / bnorm > 1e3 * tol:
        raise InfeasibleError("no feasible point found within the iteration limit")
    raise ConvergenceError(f"interior point method did not converge in {max_iter} iterations", x)
