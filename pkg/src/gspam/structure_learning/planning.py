"""Sampling plans: measurement counts, grids, step sizes, thresholds, resampling.

Every step size is the midpoint of an admissible interval.  The interval is
always obtained from the defining inequality "threshold < bound" rewritten as
a cubic in the step size, whose two positive roots are found with
:func:`cubic_roots_trig`.  At zero noise these reduce to the noiseless closed
forms.

Gaussian noise is handled by averaging ``N`` repeated queries.  The averaged
noise is bounded by ``eps = sigma * sqrt(c * L / N)`` with high probability,
where ``L`` is the logarithmic union-bound term of the phase, and that
``eps`` is then used exactly like a bounded noise level.
"""

import math
from dataclasses import asdict, dataclass, field, fields, replace

from ..core_model.oracle import BoundedNoise, GaussianNoise, Noiseless
from ..exceptions import NoiseTooLarge, PlanError
from ..sampling import DEFAULT_C_HASH, hash_family_size
from .cubic import cubic_roots_general, cubic_roots_trig

ALGORITHMS = ("alg1_2", "alg3", "alg4")
MIN_R = 0.1
_OVERRIDABLE = {"m_x", "m_x_prime", "m_V", "m_V_prime", "N1", "N2", "p1", "p2"}


@dataclass(frozen=True)
class ProblemParams:
    """Sparsity budgets and smoothness/identifiability constants.

    ``C, C1, C2, C3`` are the recovery constants of the sparse solvers; they
    are unknown in theory and default to 1.
    """

    k: int
    rho_m: int = 1
    B3: float = 6.0
    D1: float = 2.0
    D2: float = 3.0
    lambda1: float = 0.3
    lambda2: float = 1.0
    C: float = 1.0
    C1: float = 1.0
    C2: float = 1.0
    C3: float = 1.0
    C_hash: float = DEFAULT_C_HASH

    def __post_init__(self):
        if self.k < 1:
            raise PlanError(f"k must be >= 1, got {self.k}")
        if not 1 <= self.rho_m <= max(self.k, 1):
            raise PlanError(f"rho_m must lie in [1, k], got {self.rho_m}")
        for name in ("B3", "D1", "D2", "C", "C1", "C2", "C3"):
            if not getattr(self, name) > 0:
                raise PlanError(f"{name} must be positive")
        for name in ("lambda1", "lambda2"):
            if not 0 < getattr(self, name) <= 1:
                raise PlanError(f"{name} must lie in (0, 1]")
        if not self.C_hash > 1:
            raise PlanError("C_hash must exceed 1")

    @classmethod
    def from_model(cls, model, **constants):
        """Budgets from a model's true structure; constants from its defaults."""
        merged = {**getattr(model, "constants", {}), **constants}
        return cls(k=max(model.k, 1), rho_m=max(model.rho_m, 1), **merged)


@dataclass(frozen=True)
class SamplingPlan:
    """All derived sampling quantities for one run.

    Stage-B fields of ``alg3``/``alg4`` (``m_V_dprime``, ``mu_prime``,
    ``tau_dprime``, ``N2``...) depend on the stage-A estimate and are filled
    in by :func:`resolve_stage_b`.
    """

    algorithm: str
    d: int
    ctilde: float
    params: ProblemParams = field(repr=False)
    noise: object = field(repr=False)
    m_x: int = None
    m_x_prime: int = None
    hash_size: int = None
    m_V: int = None
    m_V_prime: int = None
    m_V_dprime: int = None
    mu: float = None
    mu1: float = None
    beta: float = None
    mu_prime: float = None
    tau: float = None
    tau_prime: float = None
    tau_dprime: float = None
    eta: float = None
    eps: float = 0.0
    eps_prime: float = 0.0
    eps1: float = None
    eps2: float = None
    theta1: float = None
    theta2: float = None
    N1: int = 1
    N2: int = 1
    N1_min: int = 1
    N2_min: int = 1
    p1: float = None
    p2: float = None
    r: float = MIN_R
    guaranteed: bool = True
    stage_b_k: int = None
    on_excess: str = "raise"
    overrides: dict = field(default_factory=dict, repr=False)

    def as_dict(self):
        out = {f.name: getattr(self, f.name) for f in fields(self)
               if f.name not in ("params", "noise", "overrides")}
        out["params"] = asdict(self.params)
        out["noise"] = type(self.noise).__name__
        return out


# -- helpers ---------------------------------------------------------------

def measurement_count(ctilde, s, n):
    """``ceil(C~ s log(n/s))``, at least 1; ``n`` when ``n <= s``."""
    if s <= 0:
        return 0
    if n <= s:
        return int(n)
    return max(1, math.ceil(ctilde * s * math.log(n / s)))


def _interval_from_depressed(p, q):
    roots = cubic_roots_trig(p, q)
    return roots[1], roots[0]


def _theta(eps, bound):
    return math.acos(max(-1.0, min(1.0, -eps / bound)))


def _excess(phase, eps, bound, on_excess):
    if on_excess == "raise":
        raise NoiseTooLarge(
            f"{phase}: effective noise {eps:.4g} is not below the bound {bound:.4g} "
            "needed for the recovery guarantee", eps, bound)


@dataclass
class _Phase:
    steps: dict
    threshold: float
    eps_bound: float
    theta: float
    guaranteed: bool = True
    extra: dict = field(default_factory=dict)


def _gradient_phase(m, k, D, B3, C, eps, on_excess, name):
    """Central-difference gradient estimation with ``m`` directions.

    Threshold ``C (2 mu^2 B3 k / (3 m) + eps sqrt(m) / mu) < D / 2``.
    """
    bound = D**1.5 / (6.0 * C**1.5 * math.sqrt(B3 * k))
    if eps >= bound:
        _excess(name, eps, bound, on_excess)
        mu = (3.0 * m**1.5 * eps / (4.0 * B3 * k)) ** (1.0 / 3.0)
        return _Phase({"mu": mu}, D / 2.0, bound, math.pi, guaranteed=False)
    p = -3.0 * m * D / (4.0 * C * B3 * k)
    q = 3.0 * m**1.5 * eps / (2.0 * B3 * k)
    lo, hi = _interval_from_depressed(p, q)
    mu = 0.5 * (lo + hi)
    tau = C * (2.0 * mu**2 * B3 * k / (3.0 * m) + eps * math.sqrt(m) / mu)
    return _Phase({"mu": mu}, tau, bound, _theta(eps, bound), extra={"interval": (lo, hi)})


def _mixed_partial_phase(D2, B3, eps, on_excess):
    """Step ``beta`` of the partial-derivative differences and ``mu1`` of the probe."""
    bound = D2**3 / (384.0 * math.sqrt(2.0) * B3**2)
    if eps >= bound:
        _excess("identification", eps, bound, on_excess)
        beta = (3.0 * eps / B3) ** (1.0 / 3.0)
        mu1 = math.sqrt((beta**2 * B3 / 3.0 + 2.0 * eps / beta) / (2.0 * B3))
        return _Phase({"beta": beta, "mu1": mu1}, D2 / 2.0, bound, math.pi, guaranteed=False)
    p = -3.0 * D2**2 / (32.0 * B3**2)
    q = 6.0 * eps / B3
    lo, hi = _interval_from_depressed(p, q)
    beta = 0.5 * (lo + hi)
    c0 = beta**2 * B3 / 3.0 + 2.0 * eps / beta
    disc = D2**2 / 4.0 - 8.0 * B3 * c0
    if disc <= 0:
        raise PlanError("empty admissible interval for mu1")
    mu1 = D2 / (8.0 * B3)
    tau = beta**2 * B3 / (3.0 * mu1) + 2.0 * mu1 * B3 + 2.0 * eps / (beta * mu1)
    mu1_lo = (D2 / 2.0 - math.sqrt(disc)) / (4.0 * B3)
    mu1_hi = (D2 / 2.0 + math.sqrt(disc)) / (4.0 * B3)
    return _Phase({"beta": beta, "mu1": mu1}, tau, bound, _theta(eps, bound),
                  extra={"interval": (lo, hi), "mu1_interval": (mu1_lo, mu1_hi)})


def _hessian_row_phase(params, m, m_p, eps, on_excess):
    """Gradient differences along ``m_p`` probes, rows recovered with budget rho+1."""
    rho, k, B3, D2 = params.rho_m, params.k, params.B3, params.D2
    C1, C2 = params.C1, params.C2
    a = (4 * rho + 1) * B3 / (2.0 * math.sqrt(m_p))
    b = C1 * math.sqrt(m_p) * (4 * rho + 1) * k * B3 / (3.0 * m)
    K = 2.0 * C1 * eps * math.sqrt(m * m_p)
    bound = D2**3 / (192.0 * math.sqrt(3.0) * C1 * C2**3 * math.sqrt(a**3 * b * m_p * m))
    if eps >= bound:
        _excess("stage A", eps, bound, on_excess)
        mu = (K / (2.0 * b)) ** (1.0 / 3.0)
        mu1 = math.sqrt((b * mu**2 + K / mu) / a)
        return _Phase({"mu": mu, "mu1": mu1}, D2 / 2.0, bound, math.pi, guaranteed=False,
                      extra={"a": a, "b": b})
    p = -D2**2 / (16.0 * a * b * C2**2)
    q = K / b
    lo, hi = _interval_from_depressed(p, q)
    mu = 0.5 * (lo + hi)
    half = D2 / (4.0 * a * C2)
    disc = half**2 - (b * mu**2 + K / mu) / a
    if disc <= 0:
        raise PlanError("empty admissible interval for mu1")
    mu1 = half
    tau = C2 * (a * mu1 + b * mu**2 / mu1 + K / (mu * mu1))
    return _Phase({"mu": mu, "mu1": mu1}, tau, bound, _theta(eps, bound),
                  extra={"a": a, "b": b, "interval": (lo, hi),
                         "mu1_interval": (half - math.sqrt(disc), half + math.sqrt(disc))})


def _rank_one_phase(params, m, eps, on_excess):
    """Second differences along ternary directions; LP budget eta and threshold."""
    rho, k, B3, D2, C1 = params.rho_m, params.k, params.B3, params.D2, params.C1
    a = math.sqrt(6.0) * B3 * (4 * rho + 1) * k / math.sqrt(m)
    bound = math.sqrt(2.0) * D2**3 / (54.0 * a**2 * C1**3 * m)
    if eps >= bound:
        _excess("stage A", eps, bound, on_excess)
        mu = (math.sqrt(2.0) * eps * m / a) ** (1.0 / 3.0)
        eta = math.sqrt(2.0) * a * mu + eps * m / mu**2
        return _Phase({"mu": mu}, D2 / 2.0, bound, math.pi, guaranteed=False,
                      extra={"eta": eta, "a": a})
    K = D2 / (2.0 * a * C1)
    if eps == 0:
        lo, hi = 0.0, K
        theta = 0.0
    else:
        roots = cubic_roots_general(-K, 0.0, eps * m / (math.sqrt(2.0) * a))
        lo, hi = roots[1], roots[0]
        theta = math.acos(max(-1.0, min(1.0, 1.0 - 2.0 * eps / bound)))
    mu = 0.5 * (lo + hi)
    eta = math.sqrt(2.0) * a * mu + eps * m / mu**2
    return _Phase({"mu": mu}, C1 * eta, bound, theta,
                  extra={"eta": eta, "a": a, "interval": (lo, hi)})


def _restricted_gradient_phase(params, k_b, m_b, eps, on_excess):
    """Stage B: gradients restricted to the non-interacting variables, on the diagonal."""
    B3, D1, C3 = params.B3, params.D1, params.C3
    a1 = k_b * B3 / (6.0 * m_b)
    b1 = math.sqrt(m_b)
    bound = D1**1.5 / (3.0 * math.sqrt(6.0 * a1 * C3**3 * b1**2))
    if eps >= bound:
        _excess("stage B", eps, bound, on_excess)
        mu = (b1 * eps / (2.0 * a1)) ** (1.0 / 3.0)
        return _Phase({"mu_prime": mu}, D1 / 2.0, bound, math.pi, guaranteed=False)
    p = -D1 / (2.0 * a1 * C3)
    q = b1 * eps / a1
    lo, hi = _interval_from_depressed(p, q)
    mu = 0.5 * (lo + hi)
    tau = C3 * (a1 * mu**2 + b1 * eps / mu)
    return _Phase({"mu_prime": mu}, tau, bound, _theta(eps, bound), extra={"interval": (lo, hi)})


def _noise_level(noise, L, N_pinned, bound, c=1.0):
    """Effective bound and resampling count for one phase.

    Returns ``(eps, N, N_min)``.  Without a pinned ``N`` the design target is
    half the admissible bound.
    """
    if isinstance(noise, Noiseless):
        return 0.0, 1, 1
    if isinstance(noise, BoundedNoise):
        return float(noise.eps), 1, 1
    if not isinstance(noise, GaussianNoise):
        raise PlanError(f"unsupported noise model {noise!r}")
    s2 = noise.sigma2
    N_min = math.floor(c * s2 * L / bound**2) + 1
    if N_pinned is not None:
        N = int(N_pinned)
        if N < 1:
            raise PlanError("resampling counts must be >= 1")
    else:
        N = math.floor(c * s2 * L / (bound / 2.0) ** 2) + 1
    return math.sqrt(c * s2 * L / N), N, N_min


# -- plans -----------------------------------------------------------------

def make_plan(params, d, noise=None, algorithm="alg1_2", ctilde=3.8, overrides=None,
              on_excess="raise"):
    """Derive a :class:`SamplingPlan`.

    Parameters
    ----------
    params : ProblemParams
    d : int
        Ambient dimension.
    noise : Noiseless, BoundedNoise or GaussianNoise
    algorithm : {"alg1_2", "alg3", "alg4"}
    ctilde : float
        Measurement constant in ``m = C~ k log(d/k)``.
    overrides : dict, optional
        Pin any of ``m_x, m_x_prime, m_V, m_V_prime, N1, N2, p1, p2``.
    on_excess : {"raise", "best_effort"}
        What to do when the effective noise leaves no admissible step size.
        ``"raise"`` raises :class:`NoiseTooLarge`.  ``"best_effort"`` picks
        steps minimizing the error bound, puts the threshold at half the
        identifiability constant and marks the plan ``guaranteed=False``.
    """
    noise = noise if noise is not None else Noiseless()
    overrides = dict(overrides or {})
    unknown = set(overrides) - _OVERRIDABLE
    if unknown:
        raise PlanError(f"unknown plan overrides: {sorted(unknown)}")
    if algorithm not in ALGORITHMS:
        raise PlanError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    if on_excess not in ("raise", "best_effort"):
        raise PlanError("on_excess must be 'raise' or 'best_effort'")
    if not ctilde > 0:
        raise PlanError("ctilde must be positive")
    if not params.k < d:
        raise PlanError(f"need k < d, got k={params.k}, d={d}")
    if algorithm == "alg4" and params.rho_m * params.k >= d * d:
        raise PlanError("k * rho_m must be below d^2")

    base = dict(
        algorithm=algorithm, d=int(d), ctilde=float(ctilde), params=params, noise=noise,
        m_x=int(overrides.get("m_x", math.ceil(1.0 / params.lambda2))),
        m_x_prime=int(overrides.get("m_x_prime", math.ceil(1.0 / params.lambda1))),
        hash_size=hash_family_size(d, params.C_hash),
        p1=float(overrides.get("p1", 1.0 / d)), p2=float(overrides.get("p2", 1.0 / d)),
        on_excess=on_excess, overrides=overrides,
    )
    if algorithm == "alg1_2":
        plan = _plan_alg12(base, params, d, ctilde, noise, overrides, on_excess)
    elif algorithm == "alg3":
        plan = _plan_alg3(base, params, d, ctilde, noise, overrides, on_excess)
    else:
        plan = _plan_alg4(base, params, d, ctilde, noise, overrides, on_excess)
    return plan


def _plan_alg12(base, params, d, ctilde, noise, overrides, on_excess):
    k = params.k
    m = int(overrides.get("m_V", measurement_count(ctilde, k, d)))
    grid = (2 * base["m_x"] + 1) ** 2
    L1 = math.log(2.0 / base["p1"] * m * grid * base["hash_size"])
    bound1 = params.D1**1.5 / (6.0 * params.C**1.5 * math.sqrt(params.B3 * k))
    eps, N1, N1_min = _noise_level(noise, L1, overrides.get("N1"), bound1)
    ph1 = _gradient_phase(m, k, params.D1, params.B3, params.C, eps, on_excess, "gradient phase")

    mxp = base["m_x_prime"]
    L2 = math.log(2.0 / base["p2"] * k * (2 * mxp**2 + math.ceil(math.log2(max(k, 2)))))
    bound2 = params.D2**3 / (384.0 * math.sqrt(2.0) * params.B3**2)
    eps2, N2, N2_min = _noise_level(noise, L2, overrides.get("N2"), bound2)
    ph2 = _mixed_partial_phase(params.D2, params.B3, eps2, on_excess)

    mu, beta, mu1 = ph1.steps["mu"], ph2.steps["beta"], ph2.steps["mu1"]
    r = max(MIN_R, mu / math.sqrt(m), beta, mu1)
    return SamplingPlan(**base, m_V=m, mu=mu, tau=ph1.threshold, beta=beta, mu1=mu1,
                        tau_prime=ph2.threshold, eps=eps, eps_prime=eps2,
                        eps1=ph1.eps_bound, eps2=ph2.eps_bound, theta1=ph1.theta,
                        theta2=ph2.theta, N1=N1, N2=N2, N1_min=N1_min, N2_min=N2_min, r=r,
                        guaranteed=ph1.guaranteed and ph2.guaranteed)


def _plan_alg3(base, params, d, ctilde, noise, overrides, on_excess):
    k, rho = params.k, params.rho_m
    m = int(overrides.get("m_V", measurement_count(ctilde, k, d)))
    m_p = int(overrides.get("m_V_prime", measurement_count(ctilde, rho, d)))
    grid = (2 * base["m_x"] + 1) ** 2
    L1 = math.log(2.0 / base["p1"] * m * (m_p + 1) * grid * base["hash_size"])
    probe = _hessian_row_phase(params, m, m_p, 0.0, "raise")
    eps, N1, N1_min = _noise_level(noise, L1, overrides.get("N1"), probe.eps_bound)
    ph = _hessian_row_phase(params, m, m_p, eps, on_excess)
    r = max(MIN_R, ph.steps["mu1"] / math.sqrt(m_p) + ph.steps["mu"] / math.sqrt(m))
    plan = SamplingPlan(**base, m_V=m, m_V_prime=m_p, mu=ph.steps["mu"], mu1=ph.steps["mu1"],
                        tau_prime=ph.threshold, eps=eps, eps1=ph.eps_bound, theta1=ph.theta,
                        N1=N1, N1_min=N1_min, r=r, guaranteed=ph.guaranteed)
    return _with_stage_b_excursion(plan)


def _plan_alg4(base, params, d, ctilde, noise, overrides, on_excess):
    k, rho = params.k, params.rho_m
    m = int(overrides.get("m_V", max(1, math.ceil(ctilde * k * rho * math.log(d * d / (k * rho))))))
    grid = (2 * base["m_x"] + 1) ** 2
    L1 = math.log(2.0 / base["p1"] * m * grid * base["hash_size"])
    probe = _rank_one_phase(params, m, 0.0, "raise")
    eps, N1, N1_min = _noise_level(noise, L1, overrides.get("N1"), probe.eps_bound, c=0.75)
    ph = _rank_one_phase(params, m, eps, on_excess)
    r = max(MIN_R, 2.0 * ph.steps["mu"] * math.sqrt(3.0 / m))
    plan = SamplingPlan(**base, m_V=m, mu=ph.steps["mu"], eta=ph.extra["eta"], tau=ph.threshold,
                        eps=eps, eps1=ph.eps_bound, theta1=ph.theta, N1=N1, N1_min=N1_min, r=r,
                        guaranteed=ph.guaranteed)
    return _with_stage_b_excursion(plan)


def _stage_b_fields(plan, s2var_count):
    params, d = plan.params, plan.d
    k_b = params.k - s2var_count
    n_p = d - s2var_count
    if k_b <= 0 or n_p <= 0:
        return dict(stage_b_k=0, m_V_dprime=0, mu_prime=None, tau_dprime=None, N2=1,
                    eps_prime=0.0, eps2=None, theta2=None, N2_min=1)
    m_b = measurement_count(plan.ctilde, k_b, n_p)
    L2 = math.log(2.0 * (2 * plan.m_x_prime + 1) * m_b / plan.p2)
    probe = _restricted_gradient_phase(params, k_b, m_b, 0.0, "raise")
    eps, N2, N2_min = _noise_level(plan.noise, L2, plan.overrides.get("N2"), probe.eps_bound)
    ph = _restricted_gradient_phase(params, k_b, m_b, eps, plan.on_excess)
    return dict(stage_b_k=k_b, m_V_dprime=m_b, mu_prime=ph.steps["mu_prime"],
                tau_dprime=ph.threshold, N2=N2, N2_min=N2_min, eps_prime=eps,
                eps2=ph.eps_bound, theta2=ph.theta, _guaranteed=ph.guaranteed,
                _excursion=ph.steps["mu_prime"] / math.sqrt(m_b))


def _with_stage_b_excursion(plan):
    # stage B is sized only after stage A, so reserve the largest excursion
    # over every possible stage-A outcome
    worst = plan.r
    for count in range(0, plan.params.k + 1):
        try:
            fb = _stage_b_fields(plan, count)
        except (NoiseTooLarge, PlanError):
            continue
        worst = max(worst, fb.get("_excursion", 0.0))
    return replace(plan, r=worst)


def resolve_stage_b(plan, s2var_count):
    """Fill the stage-B fields once ``|S2_var(S2_hat)|`` is known."""
    if plan.algorithm not in ("alg3", "alg4"):
        raise PlanError("stage B exists only for alg3 and alg4")
    fb = _stage_b_fields(plan, s2var_count)
    guaranteed = plan.guaranteed and fb.pop("_guaranteed", True)
    fb.pop("_excursion", None)
    return replace(plan, guaranteed=guaranteed, **fb)


def threshold_bound(plan):
    """Upper bounds the thresholds must stay strictly below, by field name."""
    p = plan.params
    if plan.algorithm == "alg1_2":
        return {"tau": p.D1 / 2.0, "tau_prime": p.D2 / 2.0}
    out = {"tau_prime": p.D2 / 2.0} if plan.algorithm == "alg3" else {"tau": p.D2 / math.sqrt(2.0)}
    if plan.tau_dprime is not None:
        out["tau_dprime"] = p.D1 / 2.0
    return out
