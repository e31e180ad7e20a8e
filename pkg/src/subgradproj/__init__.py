"""Subgradient projectors of convex functions: evaluation, calculus,
an analytic catalog, sampled property checks, a fixed-point solver and the
one-dimensional Yamagishi-Yamada reconstruction."""

from .core import (FunctionHandle, Halfspace, ProjectorEvaluation, as_vector,
                   cutting_halfspace, evaluate_projector, fd_subgradient,
                   project_halfspace, projector)
from .errors import (InfeasibilityCertificate, InvalidInput, NumericalFailure,
                     SubgradientProjectorError)
from .sets import ConvexSetSpec

__version__ = "0.1.0"

__all__ = [
    "FunctionHandle", "Halfspace", "ProjectorEvaluation", "as_vector",
    "cutting_halfspace", "evaluate_projector", "fd_subgradient",
    "project_halfspace", "projector", "ConvexSetSpec",
    "InfeasibilityCertificate", "InvalidInput", "NumericalFailure",
    "SubgradientProjectorError",
]
