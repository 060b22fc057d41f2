"""Ground-truth models, point queries and the ANOVA canonical form."""

from .builtins import BUILTINS, F1_CONSTANTS, F23_CONSTANTS, build_model
from .canonical import QUAD_TOL, CanonicalModel, anova_canonicalize, simpson_rule
from .model import ModelSpec, true_gradient, true_hessian
from .oracle import (
    BoundedNoise,
    GaussianNoise,
    Noiseless,
    QueryLedger,
    QueryOracle,
    noise_from_config,
    query,
    sign_flip_generator,
)

__all__ = [
    "BUILTINS", "F1_CONSTANTS", "F23_CONSTANTS", "build_model",
    "QUAD_TOL", "CanonicalModel", "anova_canonicalize", "simpson_rule",
    "ModelSpec", "true_gradient", "true_hessian",
    "BoundedNoise", "GaussianNoise", "Noiseless", "QueryLedger", "QueryOracle",
    "noise_from_config", "query", "sign_flip_generator",
]
