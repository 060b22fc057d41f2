"""Spline estimates of the univariate, bivariate and net-marginal components."""

from .estimator import ComponentModel
from .estimators import (
    ComponentEstimates,
    estimate_bivariate,
    estimate_components,
    estimate_net_marginal,
    estimate_univariate,
)
from .splines import SplineEstimate, mean_weights, quasi_interpolate_1d, quasi_interpolate_2d

__all__ = [
    "ComponentModel", "ComponentEstimates", "estimate_bivariate", "estimate_components",
    "estimate_net_marginal", "estimate_univariate", "SplineEstimate", "mean_weights",
    "quasi_interpolate_1d", "quasi_interpolate_2d",
]
