"""Query-based structure learning for sparse additive models with pairwise interactions."""

from .core_model import build_model
from .exceptions import GspamError
from .structure_learning import StructureLearner, recover

__version__ = "0.1.0"

__all__ = ["build_model", "GspamError", "StructureLearner", "recover", "__version__"]
