"""Convex function handles and the subgradient projector.

For a convex ``f`` with a subgradient selection ``s`` the subgradient
projector is::

    G x = x - f(x) / ||s(x)||^2 * s(x)    if f(x) > 0
    G x = x                               otherwise

which is the metric projection of ``x`` onto the cutting halfspace
``H = {y : <s(x), y - x> + f(x) <= 0}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch, InfeasibilityCertificate, ZeroNormal

Vector = NDArray[np.float64]

__all__ = [
    "Vector", "as_vector", "FunctionHandle", "Halfspace",
    "ProjectorEvaluation", "evaluate_projector", "projector",
    "cutting_halfspace", "project_halfspace", "fd_subgradient", "default_fd_step",
]


def as_vector(x: ArrayLike, dim: Optional[int] = None) -> Vector:
    """Return ``x`` as a fresh, finite, one-dimensional float array."""
    v = np.array(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise DimensionMismatch("vector must have at least one coordinate")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.size}")
    if not np.isfinite(v).all():
        raise ValueError(f"vector has non-finite coordinates: {v}")
    return v


@dataclass(frozen=True, eq=False)
class FunctionHandle:
    """A convex function on R^n together with one subgradient selection.

    Attributes
    ----------
    name : str
        Identifier, used in reports.
    dim : int
        Dimension of the domain.
    value : callable
        ``x -> f(x)``.
    subgrad : callable
        ``x -> s(x)``, a deterministic element of the subdifferential.
    analytic_G : callable, optional
        Closed-form projector used as an independent oracle in tests.
    project_C : callable, optional
        Metric projector onto ``C = {f <= 0}`` when one is known.
    second_deriv : callable, optional
        ``t -> f''(t)`` for one-dimensional functions.
    min_value_hint : float, optional
        A known lower bound (or the minimum) of ``f``.
    is_smooth : callable, optional
        ``x -> bool``; True where ``f`` is differentiable, so that finite
        differences of ``value`` must agree with ``subgrad``.
    """

    name: str
    dim: int
    value: Callable[[Vector], float]
    subgrad: Callable[[Vector], Vector]
    analytic_G: Optional[Callable[[Vector], Vector]] = None
    project_C: Optional[Callable[[Vector], Vector]] = None
    second_deriv: Optional[Callable[[float], float]] = None
    min_value_hint: Optional[float] = None
    is_smooth: Optional[Callable[[Vector], bool]] = None

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionMismatch("dimension must be positive")

    def __call__(self, x: ArrayLike) -> float:
        return float(self.value(as_vector(x, self.dim)))

    def grad(self, x: ArrayLike) -> Vector:
        return np.asarray(self.subgrad(as_vector(x, self.dim)), dtype=float)

    def dist_C(self, x: ArrayLike) -> float:
        """Distance to ``C``; requires ``project_C``."""
        if self.project_C is None:
            raise AttributeError(f"{self.name} has no projector onto C")
        x = as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.project_C(x)))


@dataclass(frozen=True)
class Halfspace:
    """The set ``{y : <normal, y> <= offset}``."""

    normal: Vector
    offset: float

    def __post_init__(self):
        if not np.linalg.norm(self.normal) > 0:
            raise ZeroNormal("halfspace normal must be nonzero")

    def contains(self, y: ArrayLike, tol: float = 0.0) -> bool:
        return float(np.dot(self.normal, y)) <= self.offset + tol


@dataclass(frozen=True)
class ProjectorEvaluation:
    """Everything produced by one application of ``G`` at ``x``.

    The halfspace fields encode ``{y : <halfspace_normal, y> <=
    halfspace_offset}`` and are meaningful when ``fx > 0``; for ``fx <= 0``
    they are still filled from ``s(x)`` but ``s(x)`` may be zero.
    """

    x: Vector
    fx: float
    sx: Vector
    Gx: Vector
    halfspace_normal: Vector
    halfspace_offset: float

    @property
    def active(self) -> bool:
        """True when ``x`` lies outside ``C`` and an actual step was taken."""
        return self.fx > 0

    def halfspace(self) -> Halfspace:
        return Halfspace(self.halfspace_normal, self.halfspace_offset)


def evaluate_projector(f: FunctionHandle, x: ArrayLike) -> ProjectorEvaluation:
    """Apply the subgradient projector of ``f`` at ``x``.

    Raises
    ------
    DimensionMismatch
        If ``x`` does not live in the domain of ``f``.
    InfeasibilityCertificate
        If ``f(x) > 0`` and ``s(x) = 0``.
    """
    x = as_vector(x, f.dim)
    fx = float(f.value(x))
    sx = np.asarray(f.subgrad(x), dtype=float).reshape(-1)
    if sx.size != f.dim:
        raise DimensionMismatch(
            f"{f.name}: subgradient has dimension {sx.size}, expected {f.dim}")
    offset = float(np.dot(sx, x)) - fx
    # exact comparison: the branch point is exact for analytic entries
    if not fx > 0:
        return ProjectorEvaluation(x, fx, sx, x.copy(), sx, offset)
    ss = float(np.dot(sx, sx))
    if ss == 0.0:
        raise InfeasibilityCertificate(x, fx)
    Gx = x - (fx / ss) * sx
    return ProjectorEvaluation(x, fx, sx, Gx, sx, offset)


def projector(f: FunctionHandle) -> Callable[[ArrayLike], Vector]:
    """Return ``G`` as a plain callable ``x -> Gx``."""
    def G(x):
        return evaluate_projector(f, x).Gx
    return G


def cutting_halfspace(f: FunctionHandle, x: ArrayLike) -> Halfspace:
    """The halfspace ``{y : <s(x), y - x> + f(x) <= 0}``; needs ``f(x) > 0``."""
    ev = evaluate_projector(f, x)
    if not ev.fx > 0:
        raise ValueError(
            f"cutting halfspace needs f(x) > 0, got f(x) = {ev.fx!r}")
    return ev.halfspace()


def project_halfspace(H: Halfspace, x: ArrayLike) -> Vector:
    x = as_vector(x, len(H.normal))
    nn = float(np.dot(H.normal, H.normal))
    if nn == 0.0:
        raise ZeroNormal("halfspace normal must be nonzero")
    excess = float(np.dot(H.normal, x)) - H.offset
    if excess <= 0:
        return x
    return x - (excess / nn) * H.normal


def default_fd_step(x: ArrayLike) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.finfo(float).eps ** (1.0 / 3.0) * max(1.0, np.max(np.abs(x))))


def fd_subgradient(f: FunctionHandle, x: ArrayLike,
                   h: Optional[float] = None) -> Vector:
    """Central-difference estimate of the gradient of ``f`` at ``x``."""
    x = as_vector(x, f.dim)
    if h is None:
        h = default_fd_step(x)
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    g = np.empty(f.dim)
    for i in range(f.dim):
        e = np.zeros(f.dim)
        e[i] = h
        g[i] = (f.value(x + e) - f.value(x - e)) / (2.0 * h)
    return g
