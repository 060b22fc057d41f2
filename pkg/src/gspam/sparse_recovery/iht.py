"""Iterative hard thresholding, vectorized over many right-hand sides."""

import numpy as np

from ..exceptions import ConvergenceError

MAX_ITER = 500
TOL = 1e-10
POWER_ITERS = 20


def hard_threshold(Z, s):
    """Keep the ``s`` largest-magnitude entries of each column (or of a vector)."""
    Z = np.asarray(Z)
    if Z.ndim == 1:
        return hard_threshold(Z[:, None], s)[:, 0]
    d = Z.shape[0]
    if s >= d:
        return Z.copy()
    out = np.zeros_like(Z)
    if s <= 0:
        return out
    idx = np.argpartition(-np.abs(Z), s - 1, axis=0)[:s]
    cols = np.arange(Z.shape[1])
    out[idx, cols] = Z[idx, cols]
    return out


def spectral_norm_sq(V, n_iter=POWER_ITERS):
    """Estimate ``||V||_2^2`` by power iteration on ``V^T V``."""
    return restricted_norm_sq(V, V.shape[1], n_iter)


def restricted_norm_sq(V, s, n_iter=POWER_ITERS):
    """Estimate ``max ||V x||^2`` over unit ``s``-sparse ``x``.

    Power iteration on ``V^T V`` with a hard threshold after every product.
    With ``s = d`` this is the ordinary power method.
    """
    s = int(min(max(s, 1), V.shape[1]))
    x = np.random.default_rng(0).standard_normal((V.shape[1], 1))
    x = hard_threshold(x, s)
    x /= np.linalg.norm(x)
    for _ in range(n_iter):
        y = hard_threshold(V.T @ (V @ x), s)
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        x = y / norm
    return float(np.linalg.norm(V @ x) ** 2)


def _polish(V, y, z):
    # least squares on the current support
    S = np.flatnonzero(z)
    if S.size == 0:
        return z
    sol, *_ = np.linalg.lstsq(V[:, S], y, rcond=None)
    out = np.zeros_like(z)
    out[S] = sol
    return out


def _niht_column(V, y, s, max_iter, tol, shrink=0.01):
    d = V.shape[1]
    ynorm = np.linalg.norm(y)
    z = np.zeros(d)
    if ynorm == 0:
        return z, True
    S = np.sort(np.argpartition(-np.abs(V.T @ y), s - 1)[:s])
    res = ynorm
    for _ in range(max_iter):
        g = V.T @ (y - V @ z)
        gS = g[S]
        VgS = V[:, S] @ gS
        den = VgS @ VgS
        step = (gS @ gS) / den if den > 0 else 0.0
        while True:
            znew = hard_threshold((z + step * g)[:, None], s)[:, 0]
            Snew = np.flatnonzero(znew)
            same = np.array_equal(Snew, S)
            if same or step == 0:
                break
            dz = znew - z
            Vdz = V @ dz
            if step <= (1 - shrink) * (dz @ dz) / max(Vdz @ Vdz, 1e-300):
                break
            step *= 0.5
        if same:
            znew = _polish(V, y, znew)
        S = Snew
        z = znew
        new_res = np.linalg.norm(y - V @ z)
        if abs(res - new_res) <= tol * ynorm:
            return z, True
        res = new_res
    return z, False


def _fixed_step(V, Y, s, max_iter, tol, L):
    d, b = V.shape[1], Y.shape[1]
    if L is None:
        L = restricted_norm_sq(V, 2 * s)
    Z = np.zeros((d, b))
    if L == 0:
        return Z, np.array([], dtype=int)
    step = np.full(b, 1.0 / L)
    ynorm = np.linalg.norm(Y, axis=0)
    active = np.flatnonzero(ynorm > 0)
    Z[:, active] = hard_threshold(step[active] * (V.T @ Y[:, active]), s)
    res = np.linalg.norm(Y - V @ Z, axis=0)

    for _ in range(max_iter):
        if active.size == 0:
            break
        Za, Ya = Z[:, active], Y[:, active]
        Znew = hard_threshold(Za + step[active] * (V.T @ (Ya - V @ Za)), s)
        same = np.all((Znew != 0) == (Za != 0), axis=0)
        for j in np.flatnonzero(same):
            Znew[:, j] = _polish(V, Ya[:, j], Znew[:, j])
        new_res = np.linalg.norm(Ya - V @ Znew, axis=0)
        # changes below tol * ||y|| are rounding noise, not divergence
        slack = tol * ynorm[active]
        done = np.abs(res[active] - new_res) <= slack
        worse = new_res > res[active] + slack
        if np.any(worse):
            step[active[worse]] *= 0.5
            Znew[:, worse] = Za[:, worse]
            new_res[worse] = res[active[worse]]
        Z[:, active] = Znew
        res[active] = new_res
        active = active[~done]
    return Z, active


def iht(V, Y, s, max_iter=MAX_ITER, tol=TOL, step="normalized", L=None):
    """Solve ``min ||V z - y||^2`` over ``s``-sparse ``z`` for each column of ``Y``.

    Parameters
    ----------
    V : ndarray, shape (m, d)
    Y : ndarray, shape (m,) or (m, b)
    s : int
        Sparsity budget.
    step : {"normalized", "fixed"}
        ``"normalized"`` takes the exact line-search step along the gradient
        restricted to the current support, halved whenever the support
        changes and the step exceeds the local curvature bound.
        ``"fixed"`` uses ``1/L`` for every column.
    L : float, optional
        Fixed step constant.  Defaults to the ``2s``-restricted squared norm
        of ``V`` from 20 thresholded power iterations.

    Returns
    -------
    ndarray, shape (d,) or (d, b)

    Notes
    -----
    Once the support repeats, the iterate is replaced by the least-squares
    fit on that support, so exact recovery terminates after a few steps.  A
    column stops when its residual norm changes by less than ``tol * ||y||``.
    """
    V = np.asarray(V, dtype=float)
    Y = np.asarray(Y, dtype=float)
    single = Y.ndim == 1
    Y = Y.reshape(V.shape[0], -1)
    d, b = V.shape[1], Y.shape[1]
    s = int(min(max(s, 1), d))
    if step == "fixed":
        Z, stuck = _fixed_step(V, Y, s, max_iter, tol, L)
    elif step == "normalized":
        Z = np.zeros((d, b))
        stuck = []
        for j in range(b):
            Z[:, j], ok = _niht_column(V, Y[:, j], s, max_iter, tol)
            if not ok:
                stuck.append(j)
    else:
        raise ValueError(f"unknown step rule {step!r}")
    out = Z[:, 0] if single else Z
    if len(stuck):
        raise ConvergenceError(
            f"IHT did not converge in {max_iter} iterations for {len(stuck)} column(s)", out)
    return out
