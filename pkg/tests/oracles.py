"""Independent reference implementations used only by the tests."""

import numpy as np
from scipy.optimize import linprog


def highs_l1(V, y):
    """min ||z||_1 s.t. V z = y, solved by scipy's HiGHS."""
    m, d = V.shape
    res = linprog(np.ones(2 * d), A_eq=np.hstack([V, -V]), b_eq=y, bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    return res.x[:d] - res.x[d:]


def bisect_roots(p, q, iters=200):
    """All three real roots of y^3 + p y + q by bracketing between critical points."""
    f = lambda y: y**3 + p * y + q
    c = np.sqrt(-p / 3.0)
    R = 1.0 + abs(p) + abs(q)
    brackets = [(c, R), (-c, c), (-R, -c)]
    roots = []
    for lo, hi in brackets:
        flo = f(lo)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return tuple(roots)


def sparse_vector(rng, d, s, low=1.0):
    x = np.zeros(d)
    idx = rng.choice(d, s, replace=False)
    x[idx] = rng.choice([-1.0, 1.0], s) * rng.uniform(low, 3.0, s)
    return x


def sparse_symmetric(rng, d, K):
    """Symmetric H with exactly K nonzero entries (an off-diagonal pair counts twice)."""
    H = np.zeros((d, d))
    count = 0
    while count < K:
        i, j = sorted(rng.integers(0, d, 2))
        need = 1 if i == j else 2
        if H[i, j] != 0 or count + need > K:
            continue
        H[i, j] = H[j, i] = rng.choice([-1.0, 1.0]) * rng.uniform(1.0, 3.0)
        count += need
    return H


# smooth and C^3 test functions for spline convergence rates
BANK_1D = {
    "sin3x": lambda x: np.sin(3 * x),
    "exp": np.exp,
    "c3_kink": lambda x: np.abs(x - 0.1) ** 3.5,
    "runge": lambda x: 1 / (1 + 4 * x**2),
}
BANK_2D = {
    "sin_cos": lambda x, y: np.sin(2 * x) * np.cos(y),
    "exp_xy": lambda x, y: np.exp(x * y),
    "c3_kink": lambda x, y: np.abs(x * y - 0.1) ** 3.5,
}
RATE_N = (8, 16, 32, 64)


def loglog_slope(ns, errs):
    return float(np.polyfit(np.log(ns), np.log(errs), 1)[0])


def spline_rate_1d(fn, fit):
    xx = np.linspace(-1, 1, 4001)
    errs = []
    for n in RATE_N:
        t = np.linspace(-1, 1, n)
        errs.append(np.max(np.abs(fit(t, fn(t))(xx) - fn(xx))))
    return loglog_slope(RATE_N, errs)


def spline_rate_2d(fn, fit):
    g = np.linspace(-1, 1, 301)
    X, Y = np.meshgrid(g, g, indexing="ij")
    errs = []
    for n in RATE_N:
        t = np.linspace(-1, 1, n)
        T, S = np.meshgrid(t, t, indexing="ij")
        errs.append(np.max(np.abs(fit(t, t, fn(T, S))(X, Y) - fn(X, Y))))
    return loglog_slope(RATE_N, errs)


def component_audit(model, est, canon, n_points=400, seed=0):
    """Worst component error and reconstruction error against the canonical form."""
    nodes = np.linspace(-1, 1, 201)
    worst = abs(est.c - canon.c)
    for p, fn in canon.univariate.items():
        worst = max(worst, np.max(np.abs(est.univariate[p](nodes) - fn(nodes))))
    for q, fn in canon.net_marginal.items():
        worst = max(worst, np.max(np.abs(est.net_marginal[q](nodes) - fn(nodes))))
    S, T = np.meshgrid(nodes[::4], nodes[::4], indexing="ij")
    for pair, fn in canon.bivariate.items():
        worst = max(worst, np.max(np.abs(est.bivariate[pair](S, T) - fn(S, T))))
    X = np.random.default_rng(seed).uniform(-1, 1, (n_points, model.d))
    recon = np.max(np.abs(est.evaluate(X) - model.evaluate(X)))
    return float(worst), float(recon)
