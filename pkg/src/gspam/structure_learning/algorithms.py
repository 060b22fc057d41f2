"""Query-based identification of the univariate support S1 and interaction set S2.

Variables are labelled ``1..d`` in every returned set; numpy arrays are
indexed from 0 internally.
"""

from dataclasses import dataclass, field

import numpy as np

from ..core_model.oracle import QueryLedger, QueryOracle
from ..exceptions import GuardrailError, InconsistencyError, PlanError
from ..sampling import build_hash_family, grid_chi, grid_chi_diag, grid_chi_i, sample_directions
from ..sparse_recovery import (LP_MAX_DIM, MatrixRecoveryProblem, iht, l1_equality,
                               recover_symmetric_matrix)
from .planning import ProblemParams, make_plan, resolve_stage_b

# upper bound on floats materialized per batch of query points
_BATCH_FLOATS = 4_000_000


@dataclass
class RecoveryResult:
    S1: frozenset
    S2: frozenset
    ledger: dict
    plan: object = field(repr=False)
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def S2_var(self):
        return frozenset(v for pair in self.S2 for v in pair)

    @property
    def total_queries(self):
        return self.ledger["total"]

    def matches(self, model):
        return self.S1 == model.S1 and self.S2 == model.S2


def _solve(V, Y, s, solver):
    if solver == "iht":
        return iht(V, Y, s)
    if solver == "l1_equality":
        if Y.ndim == 1:
            return l1_equality(V, Y)
        return np.column_stack([l1_equality(V, col) for col in Y.T])
    raise PlanError(f"unknown solver {solver!r}")


def estimate_gradient(oracle, x, mu, V, s, phase="gradient", repeats=1, solver="iht",
                      active=None):
    """Sparse gradient estimates from central differences along the rows of ``V``.

    Parameters
    ----------
    x : ndarray, shape (d,) or (n, d)
        Base point(s).
    mu : float
        Step size.
    V : DirectionSet or ndarray, shape (m, d)
    s : int
        Sparsity budget for the solver.
    repeats : int
        Each query is repeated and averaged this many times.
    active : array of int, optional
        0-based coordinates the estimate may use; the queries and the
        solve are restricted to them and all other entries are zero.

    Returns
    -------
    ndarray, shape (d,) or (n, d)
    """
    rows = getattr(V, "rows", V)
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    n, d = X.shape
    m = rows.shape[0]
    if active is not None:
        active = np.asarray(sorted(set(int(a) for a in active)), dtype=int)
        mask = np.zeros(d)
        mask[active] = 1.0
        rows = rows * mask
        X = X * mask
    Y = np.empty((m, n))
    chunk = max(1, _BATCH_FLOATS // (2 * m * d))
    for lo in range(0, n, chunk):
        Xc = X[lo:lo + chunk]
        plus = (Xc[:, None, :] + mu * rows[None]).reshape(-1, d)
        minus = (Xc[:, None, :] - mu * rows[None]).reshape(-1, d)
        fp = oracle(plus, phase, repeats).reshape(-1, m)
        fm = oracle(minus, phase, repeats).reshape(-1, m)
        Y[:, lo:lo + chunk] = ((fp - fm) / (2.0 * mu)).T
    G = np.zeros((d, n))
    if active is None:
        G = _solve(rows, Y, s, solver).reshape(d, n)
    elif active.size:
        G[active] = _solve(rows[:, active], Y, min(s, active.size), solver).reshape(-1, n)
    return G[:, 0] if single else G.T


def _above(values, tau):
    return np.abs(values) > tau


def algorithm1_support(oracle, plan, rng, solver="iht"):
    """Active set ``S1 u S2_var`` from thresholded gradients on the hash grids.

    Returns ``(S_hat, diagnostics)``.
    """
    if plan.algorithm != "alg1_2":
        raise PlanError("algorithm1_support needs an alg1_2 plan")
    d = oracle.d
    family = build_hash_family(d, plan.params.C_hash, rng)
    V = sample_directions(plan.m_V, d, "bernoulli", rng)
    peak = np.zeros(d)
    for h in family:
        grid = grid_chi(h, plan.m_x)
        G = estimate_gradient(oracle, grid.points, plan.mu, V, plan.params.k, "alg1",
                              plan.N1, solver)
        peak = np.maximum(peak, np.abs(G).max(axis=0))
    S = frozenset(int(q) + 1 for q in np.flatnonzero(_above(peak, plan.tau)))
    diag = {"tau": plan.tau, "max_abs_gradient": {int(q) + 1: float(peak[q])
                                                  for q in np.flatnonzero(peak)}}
    return S, diag


def algorithm2_identify(oracle, S_hat, plan, rng=None):
    """Split the active set into S1 and interacting pairs (non-overlapping pairs).

    Works on ``g``, the restriction of ``f`` to the coordinates in ``S_hat``
    with every other coordinate held at zero.  For each unclassified ``i``
    the grid ``chi_i`` is scanned in order until the probe along ``e2(i)``
    shows a mixed partial above ``tau'``; the partner is then located by
    halving.  Returns ``(S1_hat, S2_hat, diagnostics)``.
    """
    support = sorted(S_hat)
    k = len(support)
    d = oracle.d
    cols = np.asarray(support, dtype=int) - 1
    beta, mu1, tau = plan.beta, plan.mu1, plan.tau_prime

    def partial(z, i):
        X = np.zeros((2, d))
        X[:, cols] = z
        X[0, cols[i - 1]] += beta
        X[1, cols[i - 1]] -= beta
        fp, fm = oracle(X, "alg2", plan.N2)
        return (fp - fm) / (2.0 * beta)

    S1, S2 = set(), set()
    done = set()
    peak = {}
    searches = 0
    for i in range(1, k + 1):
        if i in done:
            continue
        grid, e2 = grid_chi_i(i, done, k, plan.m_x_prime)
        hit = None
        best = 0.0
        for z in grid.points:
            base = partial(z, i)
            stat = abs(partial(z + mu1 * e2, i) - base) / mu1
            best = max(best, stat)
            if stat > tau:
                hit = (z, base)
                break
        peak[support[i - 1]] = best
        if hit is None:
            S1.add(support[i - 1])
            done.add(i)
            continue
        z_star, base = hit
        R = [j for j in range(1, k + 1) if j != i and j not in done]
        if not R:
            raise InconsistencyError(
                f"variable {support[i - 1]} shows an interaction but no unclassified partner is left")
        while len(R) > 1:
            P1 = R[:len(R) // 2]
            v = np.zeros(k)
            v[np.asarray(P1) - 1] = 1.0
            stat = abs(partial(z_star + mu1 * v, i) - base) / mu1
            searches += 1
            R = P1 if stat > tau else R[len(R) // 2:]
        j = R[0]
        a, b = sorted((support[i - 1], support[j - 1]))
        S2.add((a, b))
        done.update((i, j))
    diag = {"tau_prime": tau, "max_mixed_partial": peak, "search_probes": searches}
    return frozenset(S1), frozenset(S2), diag


def _stage_b(oracle, plan, S2, rng, solver, phase):
    """Univariate support on the variables outside ``S2_var`` (diagonal grid)."""
    s2var = {v for pair in S2 for v in pair}
    plan = resolve_stage_b(plan, len(s2var))
    d = oracle.d
    if not plan.stage_b_k:
        return frozenset(), plan, {}
    P = np.asarray([q for q in range(d) if q + 1 not in s2var], dtype=int)
    V = sample_directions(plan.m_V_dprime, d, "bernoulli", rng)
    grid = grid_chi_diag(d, plan.m_x_prime)
    G = estimate_gradient(oracle, grid.points, plan.mu_prime, V, plan.stage_b_k, phase,
                          plan.N2, solver, active=P)
    peak = np.abs(G).max(axis=0)
    S1 = frozenset(int(q) + 1 for q in np.flatnonzero(_above(peak, plan.tau_dprime)))
    return S1, plan, {"tau_dprime": plan.tau_dprime,
                      "max_abs_gradient": {int(q) + 1: float(peak[q]) for q in np.flatnonzero(peak)}}


def _pairs_above(H_rows, rows, tau):
    pairs = set()
    for col, q in enumerate(rows):
        for qq in np.flatnonzero(_above(H_rows[:, col], tau)):
            if qq > q:
                pairs.add((int(q) + 1, int(qq) + 1))
    return pairs


def algorithm3_identify(oracle, plan, rng, solver="iht"):
    """Hessian rows from gradient differences (stage A), then S1 on the rest (stage B).

    Returns ``(S1_hat, S2_hat, resolved_plan, diagnostics)``.
    """
    if plan.algorithm != "alg3":
        raise PlanError("algorithm3_identify needs an alg3 plan")
    d = oracle.d
    params = plan.params
    family = build_hash_family(d, params.C_hash, rng)
    V = sample_directions(plan.m_V, d, "bernoulli", rng)
    Vp = sample_directions(plan.m_V_prime, d, "bernoulli", rng)
    S2 = set()
    peak = 0.0
    for h in family:
        for x in grid_chi(h, plan.m_x).points:
            centers = np.vstack([x, x + plan.mu1 * Vp.rows])
            G = estimate_gradient(oracle, centers, plan.mu, V, params.k, "alg3_stageA",
                                  plan.N1, solver)
            Y = (G[1:] - G[0]) / plan.mu1
            rows = np.flatnonzero(np.any(Y != 0, axis=0))
            if rows.size == 0:
                continue
            H_rows = _solve(Vp.rows, Y[:, rows], params.rho_m + 1, solver).reshape(d, -1)
            S2 |= _pairs_above(H_rows, rows, plan.tau_prime)
            off = np.abs(H_rows)[np.arange(d)[:, None] > rows[None, :]]
            peak = max(peak, float(off.max(initial=0.0)))
    S1, plan, diag_b = _stage_b(oracle, plan, S2, rng, solver, "alg3_stageB")
    diag = {"tau_prime": plan.tau_prime, "max_offdiag": peak, "stage_b": diag_b}
    return S1 - {v for p in S2 for v in p}, frozenset(S2), plan, diag


def algorithm4_identify(oracle, plan, rng, solver="iht"):
    """Sparse symmetric Hessians from rank-one second differences, then stage B.

    Returns ``(S1_hat, S2_hat, resolved_plan, diagnostics)``.
    """
    if plan.algorithm != "alg4":
        raise PlanError("algorithm4_identify needs an alg4 plan")
    d = oracle.d
    if d > LP_MAX_DIM:
        raise GuardrailError(f"the symmetric LP path is limited to d <= {LP_MAX_DIM}, got d={d}")
    family = build_hash_family(d, plan.params.C_hash, rng)
    V = sample_directions(plan.m_V, d, "ternary", rng)
    step = 2.0 * plan.mu
    S2 = set()
    peak = 0.0
    iu = np.triu_indices(d, 1)
    for h in family:
        for x in grid_chi(h, plan.m_x).points:
            f0 = oracle(x[None], "alg4_stageA", plan.N1)[0]
            fp = oracle(x + step * V.rows, "alg4_stageA", plan.N1)
            fm = oracle(x - step * V.rows, "alg4_stageA", plan.N1)
            y = (fp + fm - 2.0 * f0) / step**2
            H = recover_symmetric_matrix(MatrixRecoveryProblem(y, V, plan.eta), d)
            off = np.abs(H[iu])
            peak = max(peak, float(off.max(initial=0.0)))
            for a, b in zip(iu[0][off > plan.tau], iu[1][off > plan.tau]):
                S2.add((int(a) + 1, int(b) + 1))
    S1, plan, diag_b = _stage_b(oracle, plan, S2, rng, solver, "alg4_stageB")
    diag = {"tau": plan.tau, "eta": plan.eta, "max_offdiag": peak, "stage_b": diag_b}
    return S1 - {v for p in S2 for v in p}, frozenset(S2), plan, diag


def recover(model, algorithm="alg1_2", ctilde=3.8, noise=None, seed=0, params=None,
            overrides=None, on_excess="raise", solver="iht", constants=None):
    """Plan and run one structure recovery against a query oracle for ``model``.

    ``params`` defaults to the model's true budgets ``k, rho_m`` and its
    shipped constants, updated with ``constants``.  The seed drives two
    independent streams: one for the random constructions (hash family,
    directions) and one for the query noise.
    """
    if params is None:
        params = ProblemParams.from_model(model, **(constants or {}))
    plan = make_plan(params, model.d, noise, algorithm, ctilde, overrides, on_excess)
    build_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(build_ss)
    ledger = QueryLedger()
    oracle = QueryOracle(model, plan.noise, np.random.default_rng(noise_ss), ledger, r=plan.r)
    if algorithm == "alg1_2":
        S_hat, d1 = algorithm1_support(oracle, plan, rng, solver)
        S1, S2, d2 = algorithm2_identify(oracle, S_hat, plan, rng)
        diag = {"alg1": d1, "alg2": d2, "S_hat": S_hat}
    elif algorithm == "alg3":
        S1, S2, plan, diag = algorithm3_identify(oracle, plan, rng, solver)
    else:
        S1, S2, plan, diag = algorithm4_identify(oracle, plan, rng, solver)
    return RecoveryResult(frozenset(S1), frozenset(S2), ledger.snapshot(), plan, diag)
