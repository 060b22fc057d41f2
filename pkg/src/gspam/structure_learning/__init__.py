"""Sampling plans and the query algorithms that recover S1 and S2."""

from .algorithms import (
    RecoveryResult,
    algorithm1_support,
    algorithm2_identify,
    algorithm3_identify,
    algorithm4_identify,
    estimate_gradient,
    recover,
)
from .cubic import DiscriminantError, cubic_roots_general, cubic_roots_trig, depressed
from .estimator import StructureLearner
from .planning import (
    ALGORITHMS,
    ProblemParams,
    SamplingPlan,
    make_plan,
    measurement_count,
    resolve_stage_b,
    threshold_bound,
)

__all__ = [
    "RecoveryResult", "algorithm1_support", "algorithm2_identify", "algorithm3_identify",
    "algorithm4_identify", "estimate_gradient", "recover", "DiscriminantError",
    "cubic_roots_general", "cubic_roots_trig", "depressed", "StructureLearner", "ALGORITHMS",
    "ProblemParams", "SamplingPlan", "make_plan", "measurement_count", "resolve_stage_b",
    "threshold_bound",
]
