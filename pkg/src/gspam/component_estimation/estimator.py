"""Scikit-learn style wrapper around :func:`estimate_components`."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ..core_model.oracle import QueryOracle
from .estimators import DEFAULT_N, DEFAULT_N1, estimate_components


class ComponentModel(BaseEstimator):
    """Fit spline components for known supports, then predict ``f``.

    ``fit`` accepts either a :class:`QueryOracle` or a model (wrapped in a
    noiseless oracle seeded with ``seed``).
    """

    def __init__(self, n=DEFAULT_N, n1=DEFAULT_N1, repeats=None, seed=0):
        self.n = n
        self.n1 = n1
        self.repeats = repeats
        self.seed = seed

    def fit(self, oracle, S1, S2):
        if not isinstance(oracle, QueryOracle):
            oracle = QueryOracle(oracle, rng=np.random.default_rng(self.seed))
        self.components_ = estimate_components(oracle, S1, S2, self.n, self.n1, self.repeats)
        self.n_features_in_ = oracle.d
        return self

    def predict(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return self.components_.evaluate(X)
