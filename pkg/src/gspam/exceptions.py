"""Exception types shared across the package."""


class GspamError(Exception):
    """Base class for package errors."""


class DomainError(GspamError, ValueError):
    """A query point lies outside the enlarged cube."""


class ModelError(GspamError, ValueError):
    """Invalid model configuration (unknown builtin, bad index, duplicate pair...)."""


class ConvergenceError(GspamError, RuntimeError):
    """An iterative solver stopped before meeting its tolerance.

    The last iterate is kept on ``last_iterate`` so callers can inspect it.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class InfeasibleError(GspamError, RuntimeError):
    """A linear program has no feasible point."""


class NoiseTooLarge(GspamError, ValueError):
    """The effective noise level leaves no admissible step size."""

    def __init__(self, message, eps, bound):
        super().__init__(message)
        self.eps = eps
        self.bound = bound


class PlanError(GspamError, ValueError):
    """The requested sampling plan cannot be built."""


class InconsistencyError(GspamError, RuntimeError):
    """Query answers contradict the structural assumptions of an algorithm."""


class GuardrailError(GspamError, ValueError):
    """Instance exceeds a documented size guardrail."""
