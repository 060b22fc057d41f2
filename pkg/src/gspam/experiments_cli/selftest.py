"""Quick invariant checks runnable from an installed package (a few seconds)."""

import numpy as np

from ..component_estimation import estimate_components
from ..core_model import anova_canonicalize, build_model
from ..core_model.oracle import QueryLedger, QueryOracle, noise_from_config
from ..sampling import build_hash_family
from ..sparse_recovery import iht
from ..structure_learning import (ProblemParams, cubic_roots_trig, make_plan, recover,
                                  threshold_bound)


def _hash_cover():
    F = build_hash_family(60, rng=np.random.default_rng(0)).functions
    # pairwise codeword distances; zero off the diagonal means an uncovered pair
    dist = (F[:, :, None] != F[:, None, :]).sum(axis=0)
    return bool(np.all(dist + np.eye(60, dtype=int) > 0))


def _cubic():
    rng = np.random.default_rng(1)
    for _ in range(200):
        p = -rng.uniform(0.1, 10.0)
        q = rng.uniform(-1, 1) * 0.9 * 2.0 * (-p / 3.0) ** 1.5
        roots = cubic_roots_trig(p, q)
        if max(abs(y**3 + p * y + q) for y in roots) > 1e-9:
            return False
    return True


def _iht():
    rng = np.random.default_rng(2)
    d, s, m = 200, 4, 60
    V = rng.choice([-1.0, 1.0], size=(m, d)) / np.sqrt(m)
    x = np.zeros(d)
    x[rng.choice(d, s, replace=False)] = rng.normal(size=s) + 2.0
    return np.allclose(iht(V, V @ x, s).ravel(), x, atol=1e-8)


def _planner():
    plan = make_plan(ProblemParams(k=4), 500)
    return all(getattr(plan, name) < bound for name, bound in threshold_bound(plan).items())


def _recovery():
    model = build_model({"builtin": "f1_nonoverlap", "d": 60})
    return recover(model, "alg1_2", 3.8, seed=0).matches(model)


def _components():
    model = build_model({"builtin": "f1_nonoverlap", "d": 8})
    oracle = QueryOracle(model, noise_from_config({}), np.random.default_rng(0), QueryLedger())
    est = estimate_components(oracle, model.S1, model.S2, n=16, n1=12)
    canon = anova_canonicalize(model)
    X = np.random.default_rng(3).uniform(-1, 1, size=(50, model.d))
    return (np.max(np.abs(est.evaluate(X) - model.evaluate(X))) < 1e-8
            and abs(est.c - canon.c) < 1e-8)


CHECKS = (
    ("hash family separates every pair", _hash_cover),
    ("cubic roots have residual <= 1e-9", _cubic),
    ("IHT recovers a noiseless sparse vector", _iht),
    ("planned thresholds respect their bounds", _planner),
    ("f1_nonoverlap recovered at d=60", _recovery),
    ("components reproduce f1 exactly", _components),
)


def run_selftest(verbose=True):
    ok = True
    for name, check in CHECKS:
        try:
            passed = bool(check())
        except Exception as exc:  # report, keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'} {name}")
    return ok
