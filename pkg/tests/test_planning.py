import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gspam.core_model import BoundedNoise, GaussianNoise
from gspam.exceptions import NoiseTooLarge, PlanError
from gspam.structure_learning import (ProblemParams, make_plan, measurement_count,
                                      resolve_stage_b, threshold_bound)

STEP_FIELDS = ("mu", "mu1", "beta", "tau", "tau_prime", "eta", "r")


def _below_bounds(plan):
    return all(getattr(plan, f) < b for f, b in threshold_bound(plan).items())


params_st = st.builds(
    ProblemParams,
    k=st.integers(4, 12), rho_m=st.integers(1, 4), B3=st.floats(0.5, 50),
    D1=st.floats(0.5, 10), D2=st.floats(0.5, 10),
    lambda1=st.floats(0.1, 1.0), lambda2=st.floats(0.1, 1.0))


@given(params_st, st.sampled_from(["alg1_2", "alg3", "alg4"]), st.floats(1.0, 8.0))
@settings(max_examples=150, deadline=None)
def test_noiseless_thresholds_below_bounds(params, algorithm, ctilde):
    d = 40 if algorithm == "alg4" else 500
    plan = make_plan(params, d, algorithm=algorithm, ctilde=ctilde)
    assert plan.guaranteed
    assert _below_bounds(plan)
    if algorithm != "alg1_2":
        for count in range(0, params.k + 1):
            assert _below_bounds(resolve_stage_b(plan, count))


@given(params_st, st.floats(0.01, 0.95))
@settings(max_examples=100, deadline=None)
def test_bounded_noise_inside_bound_keeps_guarantee(params, frac):
    base = make_plan(params, 500)
    eps = frac * min(base.eps1, base.eps2)
    plan = make_plan(params, 500, BoundedNoise(eps))
    assert plan.guaranteed and _below_bounds(plan)
    assert plan.theta1 < math.pi and plan.theta2 < math.pi


@pytest.mark.parametrize("algorithm", ["alg1_2", "alg3"])
def test_tiny_noise_matches_noiseless_plan(algorithm):
    params = ProblemParams(k=6, rho_m=2)
    d = 30 if algorithm == "alg4" else 500
    a = make_plan(params, d, algorithm=algorithm)
    b = make_plan(params, d, BoundedNoise(1e-12), algorithm=algorithm)
    for f in STEP_FIELDS:
        va, vb = getattr(a, f), getattr(b, f)
        if va is not None:
            assert vb == pytest.approx(va, rel=1e-6, abs=1e-12), f


def test_tiny_noise_alg4_moves_like_sqrt_eps():
    # the lower end of the rank-one step interval grows like sqrt(eps), so
    # the midpoint shifts by O(sqrt(eps)) rather than O(eps)
    params = ProblemParams(k=6, rho_m=2)
    a = make_plan(params, 30, algorithm="alg4")
    for eps in (1e-12, 1e-14):
        b = make_plan(params, 30, BoundedNoise(eps), algorithm="alg4")
        assert abs(b.mu - a.mu) <= 10 * math.sqrt(eps)
        assert b.tau < threshold_bound(b)["tau"]


def test_excess_noise_raises_or_degrades():
    params = ProblemParams(k=6)
    with pytest.raises(NoiseTooLarge) as info:
        make_plan(params, 500, BoundedNoise(1.0))
    assert info.value.eps == 1.0 and info.value.bound < 1.0
    plan = make_plan(params, 500, BoundedNoise(1.0), on_excess="best_effort")
    assert not plan.guaranteed


def test_gaussian_counts():
    params = ProblemParams(k=6)
    plan = make_plan(params, 200, GaussianNoise(1e-3))
    # unpinned counts target half the admissible bound
    assert plan.eps < plan.eps1 / 2 * (1 + 1e-12)
    assert plan.eps_prime < plan.eps2 / 2 * (1 + 1e-12)
    assert plan.N1 >= plan.N1_min and plan.N2 >= plan.N2_min
    pinned = make_plan(params, 200, GaussianNoise(1e-3), overrides={"N1": 75, "N2": 31},
                       on_excess="best_effort")
    assert (pinned.N1, pinned.N2) == (75, 31)
    # 31 repeats cannot bring the identification noise below its bound
    assert pinned.eps_prime > pinned.eps2 and not pinned.guaranteed
    with pytest.raises(NoiseTooLarge):
        make_plan(params, 200, GaussianNoise(1e-3), overrides={"N1": 75, "N2": 31})


def test_measurement_count():
    assert measurement_count(3.8, 6, 500) == math.ceil(3.8 * 6 * math.log(500 / 6))
    assert measurement_count(3.8, 10, 8) == 8
    assert measurement_count(2.0, 0, 100) == 0


def test_grid_resolution_from_lambdas():
    plan = make_plan(ProblemParams(k=4, lambda1=0.3, lambda2=1.0), 100)
    assert (plan.m_x, plan.m_x_prime) == (1, 4)


def test_alg4_measurement_count():
    plan = make_plan(ProblemParams(k=6, rho_m=2), 30, algorithm="alg4", ctilde=3.0)
    assert plan.m_V == math.ceil(3.0 * 12 * math.log(900 / 12))


def test_invalid_requests():
    params = ProblemParams(k=6)
    with pytest.raises(PlanError):
        make_plan(params, 500, algorithm="alg9")
    with pytest.raises(PlanError):
        make_plan(params, 5)
    with pytest.raises(PlanError):
        make_plan(params, 500, overrides={"mu": 1.0})
    with pytest.raises(PlanError):
        resolve_stage_b(make_plan(params, 500), 2)
    with pytest.raises(PlanError):
        ProblemParams(k=0)


def test_stage_b_budget():
    plan = make_plan(ProblemParams(k=5, rho_m=2), 500, algorithm="alg3", ctilde=5.6)
    b = resolve_stage_b(plan, 3)
    assert b.stage_b_k == 2
    assert b.m_V_dprime == measurement_count(5.6, 2, 497)
    assert b.mu_prime / math.sqrt(b.m_V_dprime) <= plan.r
    assert resolve_stage_b(plan, 5).stage_b_k == 0
