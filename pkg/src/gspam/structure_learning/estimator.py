"""Scikit-learn style wrapper around :func:`recover`."""

from sklearn.base import BaseEstimator

from .algorithms import recover
from .planning import ProblemParams


class StructureLearner(BaseEstimator):
    """Identify ``S1`` and ``S2`` of a model reachable through point queries.

    ``fit`` takes a :class:`ModelSpec` (queried through a fresh oracle), not
    a data matrix: the learner chooses its own query points.

    Attributes
    ----------
    S1_, S2_ : frozenset
    plan_ : SamplingPlan
    result_ : RecoveryResult
    """

    def __init__(self, algorithm="alg1_2", ctilde=3.8, noise=None, solver="iht",
                 on_excess="raise", constants=None, k=None, rho_m=None, overrides=None,
                 seed=0):
        self.algorithm = algorithm
        self.ctilde = ctilde
        self.noise = noise
        self.solver = solver
        self.on_excess = on_excess
        self.constants = constants
        self.k = k
        self.rho_m = rho_m
        self.overrides = overrides
        self.seed = seed

    def _params(self, model):
        consts = {**model.constants, **(self.constants or {})}
        k = self.k if self.k is not None else max(model.k, 1)
        rho = self.rho_m if self.rho_m is not None else max(model.rho_m, 1)
        return ProblemParams(k=k, rho_m=rho, **consts)

    def fit(self, model, y=None):
        result = recover(model, self.algorithm, self.ctilde, self.noise, self.seed,
                         params=self._params(model), overrides=self.overrides,
                         on_excess=self.on_excess, solver=self.solver)
        self.result_ = result
        self.plan_ = result.plan
        self.S1_ = result.S1
        self.S2_ = result.S2
        return self

    def score(self, model, y=None):
        """1.0 for an exact match of both sets, else 0.0."""
        return float(self.S1_ == model.S1 and self.S2_ == model.S2)
