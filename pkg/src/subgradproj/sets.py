"""Closed convex sets with exact metric projectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import Vector, as_vector
from .errors import BadParameter, DimensionMismatch, UnsupportedSet, ZeroNormal

KINDS = ("ball", "halfspace", "hyperplane", "box", "affine_subspace",
         "singleton", "nonneg_orthant", "ray", "whole_space")


@dataclass(frozen=True, eq=False)
class ConvexSetSpec:
    """A closed convex set of one of a few parametric kinds.

    Use the constructors (:meth:`ball`, :meth:`halfspace`, ...) rather than
    building instances directly; they validate the parameters.
    """

    kind: str
    dim: int
    params: dict = field(default_factory=dict)

    # -- constructors -----------------------------------------------------

    @classmethod
    def ball(cls, center, radius):
        c = as_vector(center)
        if not radius > 0:
            raise BadParameter("ball radius must be positive")
        return cls("ball", c.size, {"center": c, "radius": float(radius)})

    @classmethod
    def halfspace(cls, normal, offset):
        """``{y : <normal, y> <= offset}``."""
        a = as_vector(normal)
        if not np.linalg.norm(a) > 0:
            raise ZeroNormal("halfspace normal must be nonzero")
        return cls("halfspace", a.size, {"normal": a, "offset": float(offset)})

    @classmethod
    def hyperplane(cls, normal, offset):
        """``{y : <normal, y> = offset}``."""
        a = as_vector(normal)
        if not np.linalg.norm(a) > 0:
            raise ZeroNormal("hyperplane normal must be nonzero")
        return cls("hyperplane", a.size, {"normal": a, "offset": float(offset)})

    @classmethod
    def box(cls, lo, hi):
        lo, hi = as_vector(lo), as_vector(hi)
        if lo.size != hi.size:
            raise DimensionMismatch("box bounds differ in dimension")
        if np.any(lo > hi):
            raise BadParameter("box needs lo <= hi")
        return cls("box", lo.size, {"lo": lo, "hi": hi})

    @classmethod
    def affine_subspace(cls, basis, point):
        """``point + span(rows of basis)``; the basis is orthonormalized."""
        p = as_vector(point)
        B = np.atleast_2d(np.asarray(basis, dtype=float))
        if B.shape[1] != p.size:
            raise DimensionMismatch("basis vectors and point differ in dimension")
        Q, R = np.linalg.qr(B.T)
        rank = int(np.sum(np.abs(np.diag(R)) > 1e-12))
        if rank != B.shape[0]:
            raise BadParameter("affine subspace basis is linearly dependent")
        return cls("affine_subspace", p.size, {"Q": Q[:, :rank], "point": p})

    @classmethod
    def singleton(cls, point):
        p = as_vector(point)
        return cls("singleton", p.size, {"point": p})

    @classmethod
    def nonneg_orthant(cls, dim):
        return cls("nonneg_orthant", int(dim), {})

    @classmethod
    def ray(cls, direction):
        """The cone ``{t * direction : t >= 0}``."""
        u = as_vector(direction)
        if not np.linalg.norm(u) > 0:
            raise ZeroNormal("ray direction must be nonzero")
        return cls("ray", u.size, {"direction": u})

    @classmethod
    def whole_space(cls, dim):
        return cls("whole_space", int(dim), {})

    # -- geometry ---------------------------------------------------------

    def project(self, x) -> Vector:
        x = as_vector(x, self.dim)
        k, p = self.kind, self.params
        if k == "ball":
            d = x - p["center"]
            nd = np.linalg.norm(d)
            if nd <= p["radius"]:
                return x
            return p["center"] + (p["radius"] / nd) * d
        if k == "halfspace":
            a = p["normal"]
            excess = float(a @ x) - p["offset"]
            if excess <= 0:
                return x
            return x - (excess / float(a @ a)) * a
        if k == "hyperplane":
            a = p["normal"]
            return x - ((float(a @ x) - p["offset"]) / float(a @ a)) * a
        if k == "box":
            return np.clip(x, p["lo"], p["hi"])
        if k == "affine_subspace":
            Q, q = p["Q"], p["point"]
            return q + Q @ (Q.T @ (x - q))
        if k == "singleton":
            return p["point"].copy()
        if k == "nonneg_orthant":
            return np.maximum(x, 0.0)
        if k == "ray":
            u = p["direction"]
            t = float(u @ x)
            return (max(t, 0.0) / float(u @ u)) * u
        if k == "whole_space":
            return x
        raise UnsupportedSet(f"unknown set kind {k!r}")

    def distance(self, x) -> float:
        x = as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol: float = 1e-12) -> bool:
        return self.distance(x) <= tol

    # -- cones ------------------------------------------------------------

    @property
    def is_cone(self) -> bool:
        k, p = self.kind, self.params
        if k in ("nonneg_orthant", "ray", "whole_space"):
            return True
        if k in ("halfspace", "hyperplane"):
            return p["offset"] == 0.0
        if k in ("affine_subspace", "singleton"):
            return not np.any(p["point"])
        return False

    def polar(self) -> "ConvexSetSpec":
        """Polar cone ``{u : <u, k> <= 0 for all k}``; cones only."""
        if not self.is_cone:
            raise UnsupportedSet(f"{self.kind} is not a cone")
        k, p, n = self.kind, self.params, self.dim
        if k == "whole_space":
            return ConvexSetSpec.singleton(np.zeros(n))
        if k == "singleton":
            return ConvexSetSpec.whole_space(n)
        if k == "halfspace":
            return ConvexSetSpec.ray(p["normal"])
        if k == "ray":
            return ConvexSetSpec.halfspace(p["direction"], 0.0)
        if k == "hyperplane":
            return ConvexSetSpec.affine_subspace(p["normal"][None, :], np.zeros(n))
        if k == "affine_subspace":
            Q = p["Q"]
            if Q.shape[1] == n:
                return ConvexSetSpec.singleton(np.zeros(n))
            full, _ = np.linalg.qr(np.hstack([Q, np.eye(n)]))
            comp = full[:, Q.shape[1]:n]
            return ConvexSetSpec.affine_subspace(comp.T, np.zeros(n))
        raise UnsupportedSet(f"polar of {k} is not implemented")

    def describe(self) -> str:
        def fmt(v):
            return ",".join(f"{t:g}" for t in np.ravel(v))
        k, p = self.kind, self.params
        if k == "ball":
            return f"ball({fmt(p['center'])};{p['radius']:g})"
        if k in ("halfspace", "hyperplane"):
            return f"{k}({fmt(p['normal'])};{p['offset']:g})"
        if k == "box":
            return f"box({fmt(p['lo'])};{fmt(p['hi'])})"
        if k == "affine_subspace":
            rows = "/".join(fmt(r) for r in p["Q"].T)
            return f"affine({rows};{fmt(p['point'])})"
        if k == "singleton":
            return f"singleton({fmt(p['point'])})"
        if k == "ray":
            return f"ray({fmt(p['direction'])})"
        return f"{'orthant' if k == 'nonneg_orthant' else 'space'}({self.dim})"


def dykstra(projectors: Sequence[Callable[[Vector], Vector]], x,
            tol: float = 1e-15, max_iter: int = 100_000) -> Vector:
    """Project onto an intersection with Dykstra's algorithm.

    Stops once a full sweep moves the iterate by at most ``tol`` (relative
    to ``max(1, ||x||)``).
    """
    x = as_vector(x)
    m = len(projectors)
    if m == 1:
        return projectors[0](x)
    increments = [np.zeros_like(x) for _ in range(m)]
    y = x.copy()
    scale = max(1.0, float(np.linalg.norm(x)))
    for _ in range(max_iter):
        y_old = y.copy()
        for i, P in enumerate(projectors):
            z = P(y + increments[i])
            increments[i] = y + increments[i] - z
            y = z
        if np.linalg.norm(y - y_old) <= tol * scale:
            break
    return y
