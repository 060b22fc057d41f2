import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gspam.core_model import (BUILTINS, BoundedNoise, GaussianNoise, QueryLedger, QueryOracle,
                              anova_canonicalize, build_model, noise_from_config, simpson_rule,
                              true_gradient, true_hessian)
from gspam.exceptions import DomainError, ModelError


def test_f1_supports():
    m = build_model({"builtin": "f1_nonoverlap", "d": 20})
    assert m.S1 == {1, 2}
    assert m.S2 == {(3, 4), (5, 6)}
    assert m.rho_m == 1 and m.k == 6
    ov = build_model({"builtin": "f1_overlap", "d": 20})
    assert ov.S2 == {(3, 4), (4, 5)}
    assert ov.degree(4) == 2 and ov.rho_m == 2


@pytest.mark.parametrize("name", BUILTINS)
def test_every_builtin_builds(name):
    m = build_model({"builtin": name, "d": 80, "T": 3})
    X = np.random.default_rng(0).uniform(-1, 1, (5, 80))
    assert np.all(np.isfinite(m.evaluate(X)))


def test_dimension_too_small():
    with pytest.raises(ModelError):
        build_model({"builtin": "f1_nonoverlap", "d": 5})


def test_unknown_builtin():
    with pytest.raises(ModelError):
        build_model({"builtin": "nope", "d": 10})


def test_k_family_block_layout():
    m = build_model({"builtin": "k_family", "d": 100, "T": 3})
    assert m.S1 == {1, 2, 6, 7, 11, 12}
    assert (9, 10) in m.S2 and m.rho_m == 2


def test_rho_family_degree_tracks_T():
    for T in range(2, 9):
        m = build_model({"builtin": "rho_family", "d": 100, "T": T})
        assert m.rho_m == max(T, 2)
        assert m.degree(3) == T


def test_custom_terms():
    tree = {"d": 6, "univariate": [{"index": 2, "fn": {"poly": [0, 0, 1]}}],
            "bivariate": [{"pair": [1, 5], "fn": {"product": [{"sin": {"freq": 2}}, {"poly": [0, 1]}]}}]}
    m = build_model(tree)
    x = np.array([[0.3, -0.5, 0, 0, 0.7, 0]])
    assert m.evaluate(x)[0] == pytest.approx(0.25 + np.sin(0.6) * 0.7)


def test_fake_interaction_rejected():
    tree = {"d": 4, "bivariate": [{"pair": [1, 2], "fn": {"product": [{"poly": [1]}, {"poly": [0, 1]}]}}]}
    with pytest.raises(ModelError):
        build_model(tree)


def test_gradient_and_hessian_f1():
    m = build_model({"builtin": "f1_nonoverlap", "d": 8})
    x = np.array([0.1, 0.2, 0.3, -0.4, 0.5, 0.6, 0.0, 0.0])
    g = true_gradient(m, x)
    expect = [2.0, -6 * 0.2, 4 * -0.4, 4 * 0.3, -5 * 0.6, -5 * 0.5, 0, 0]
    assert np.allclose(g, expect, atol=1e-6)
    H = true_hessian(m, x)
    assert H[2, 3] == pytest.approx(4.0, abs=1e-4)
    assert H[1, 1] == pytest.approx(-6.0, abs=1e-4)
    assert np.allclose(H, H.T)


def test_ledger_concurrent_counts_are_exact():
    ledger = QueryLedger()

    def work():
        for _ in range(1000):
            ledger.record("a", 3)

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert ledger.total_queries == 24000


def test_ledger_merge():
    a, b = QueryLedger(), QueryLedger()
    a.record("x", 2)
    b.record("x", 3)
    b.record("y", 1)
    a.merge(b)
    assert a.per_phase == {"x": 5, "y": 1}
    assert a.snapshot()["total"] == 6


def test_oracle_charges_repeats_and_checks_domain():
    m = build_model({"builtin": "f1_nonoverlap", "d": 8})
    oracle = QueryOracle(m, GaussianNoise(1e-2), np.random.default_rng(0))
    oracle(np.zeros((4, 8)), "p", repeats=5)
    assert oracle.ledger.per_phase == {"p": 20}
    with pytest.raises(DomainError):
        oracle(np.full((1, 8), 1.2))


@given(st.floats(1e-6, 1.0), st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_bounded_noise_respects_level(eps, seed):
    noise = BoundedNoise(eps)
    draws = noise.draw(np.random.default_rng(seed), (200,))
    assert np.all(np.abs(draws) <= eps)


def test_noise_from_config():
    assert noise_from_config({}).kind == "noiseless"
    assert noise_from_config({"eps": 0.1}).kind == "bounded"
    assert noise_from_config({"sigma2": 0.1, "N1": 3}).kind == "gaussian"


def test_simpson_weights_integrate_cubics_exactly():
    nodes, w = simpson_rule(33)
    assert w.sum() == pytest.approx(1.0)
    assert w @ nodes**2 == pytest.approx(1 / 3)
    assert w @ nodes**3 == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("name", ["f1_overlap", "f2_nonoverlap", "f3_overlap"])
def test_canonical_form_invariants(name):
    m = build_model({"builtin": name, "d": 8})
    canon = anova_canonicalize(m)
    nodes, w = simpson_rule(513)
    for fn in canon.univariate.values():
        assert abs(w @ fn(nodes)) < 1e-8
    for fn in canon.net_marginal.values():
        assert abs(w @ fn(nodes)) < 1e-8
    ss, tt = np.meshgrid(nodes, nodes, indexing="ij")
    for (a, b), fn in canon.bivariate.items():
        F = fn(ss, tt)
        # a partner of degree > 1 owns its marginal, so the mean over the other side vanishes
        if canon.degrees[b] > 1:
            assert np.max(np.abs(w @ F)) < 1e-8
        if canon.degrees[a] > 1:
            assert np.max(np.abs(F @ w)) < 1e-8
        assert abs(w @ F @ w) < 1e-8
    X = np.random.default_rng(1).uniform(-1, 1, (50, 8))
    assert np.allclose(canon.evaluate(X), m.evaluate(X), atol=1e-8)
