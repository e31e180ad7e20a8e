"""Analytic instances: value, a deterministic subgradient, and closed-form G.

Each ``make_*`` constructor returns a :class:`CatalogEntry`. Unless stated
otherwise, sampling boxes are ``[-5, 5]^n``; entries whose values grow too
fast for absolute tolerances use a smaller box (documented per entry).

Conventions
-----------
* ``sgn(0) = 0``.
* At kinks of max-type functions the subgradient of the lowest active
  piece is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from . import calculus
from .core import FunctionHandle, Vector, as_vector
from .errors import (BadParameter, BadWeights, DimensionMismatch, EmptyList,
                     NotNonexpansive, NotPSD, NotSymmetric, NotUnit,
                     UnsupportedSet)
from .sets import ConvexSetSpec, dykstra

PROPERTY_NAMES = ("firmly_nonexpansive", "nonexpansive", "monotone",
                  "id_minus_G_nonexpansive", "decreasing")


@dataclass(eq=False)
class CatalogEntry:
    """A catalog instance plus metadata for the verification harness.

    ``known_properties`` maps a property name to ``(holds, note)`` and is
    only filled where the property is an established result for the entry.
    ``probe_pairs`` / ``probe_points`` are structured samples that the
    harness prepends to random ones (keyed by check name).
    """

    handle: FunctionHandle
    smooth_region_description: str
    known_properties: dict = field(default_factory=dict)
    strictly_convex: bool = False
    sample_box: tuple = (-5.0, 5.0)
    recession_polar: Optional[ConvexSetSpec] = None
    probe_pairs: dict = field(default_factory=dict)
    probe_points: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.handle.name

    @property
    def dim(self) -> int:
        return self.handle.dim

    def c_samples(self, rng: np.random.Generator, k: int,
                  tol: float = 1e-12) -> np.ndarray:
        """Up to ``k`` points of ``C``: projections of random box points.

        Points whose value exceeds ``tol`` (rounding right at the boundary)
        are dropped.
        """
        P = self.handle.project_C
        if P is None or k <= 0:
            return np.empty((0, self.dim))
        lo, hi = self.sample_box
        out = []
        for _ in range(8):
            for p in rng.uniform(lo, hi, size=(k, self.dim)):
                c = P(p)
                if self.handle.value(c) <= tol:
                    out.append(c)
                    if len(out) == k:
                        return np.array(out)
        return np.array(out).reshape(-1, self.dim)


def _sgn(t: float) -> float:
    return float(np.sign(t))


def _zero_polar(n):
    return ConvexSetSpec.whole_space(n)


def recession_polar(C: ConvexSetSpec) -> Optional[ConvexSetSpec]:
    """``(rec C)^polar`` when representable, else None."""
    k, p, n = C.kind, C.params, C.dim
    if k in ("ball", "box", "singleton"):
        return ConvexSetSpec.whole_space(n)
    if k == "halfspace":
        return ConvexSetSpec.ray(p["normal"])
    if k == "hyperplane":
        return ConvexSetSpec.affine_subspace(p["normal"][None, :], np.zeros(n))
    if k == "affine_subspace":
        return ConvexSetSpec.affine_subspace(p["Q"].T, np.zeros(n)).polar()
    if k in ("ray", "whole_space"):
        return C.polar()
    return None


def _range_subspace(M: np.ndarray, tol: float = 1e-10) -> ConvexSetSpec:
    n = M.shape[1]
    U, s, _ = np.linalg.svd(M.T)
    r = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    if r == 0:
        return ConvexSetSpec.singleton(np.zeros(n))
    if r == n:
        return ConvexSetSpec.whole_space(n)
    return ConvexSetSpec.affine_subspace(U[:, :r].T, np.zeros(n))


# ---------------------------------------------------------------------------
# smooth instances


def make_sq_norm(n: int = 2) -> CatalogEntry:
    """``f = ||x||^2``; ``G = Id / 2``."""
    n = int(n)
    h = FunctionHandle(
        name="sq_norm", dim=n,
        value=lambda x: float(x @ x),
        subgrad=lambda x: 2.0 * x,
        analytic_G=lambda x: 0.5 * x,
        project_C=lambda x: np.zeros(n),
        min_value_hint=0.0,
        is_smooth=lambda x: True,
    )
    return CatalogEntry(h, "everywhere", strictly_convex=True,
                        recession_polar=_zero_polar(n), params={"n": n})


def make_huber(n: int = 2) -> CatalogEntry:
    """Moreau envelope of the norm; ``G = P_ball(0;1) / 2``."""
    n = int(n)

    def value(x):
        r = float(np.linalg.norm(x))
        return 0.5 * r * r if r <= 1.0 else r - 0.5

    def subgrad(x):
        r = float(np.linalg.norm(x))
        return x.copy() if r <= 1.0 else x / r

    def analytic(x):
        r = float(np.linalg.norm(x))
        return 0.5 * x if r <= 1.0 else (0.5 / r) * x

    h = FunctionHandle(
        name="huber", dim=n, value=value, subgrad=subgrad, analytic_G=analytic,
        project_C=lambda x: np.zeros(n), min_value_hint=0.0,
        is_smooth=lambda x: True,
    )
    props = {"firmly_nonexpansive": (True, "G = P_ball/2, reflector -(Id - P_ball)")}
    return CatalogEntry(h, "everywhere (C^1)", known_properties=props,
                        recession_polar=_zero_polar(n), params={"n": n})


def make_dist_power(C: ConvexSetSpec, p: float = 1.0) -> CatalogEntry:
    """``f = d_C^p``; ``G = (1 - 1/p) Id + (1/p) P_C``."""
    if not p >= 1:
        raise BadParameter("p must be >= 1")
    p = float(p)
    P = C.project

    def value(x):
        return float(np.linalg.norm(x - P(x))) ** p

    def subgrad(x):
        r = x - P(x)
        d = float(np.linalg.norm(r))
        if d == 0.0:
            return np.zeros_like(x)
        return p * d ** (p - 2.0) * r

    def smooth(x):
        return p > 1 or C.distance(x) > 0

    h = FunctionHandle(
        name=f"dist_power[{C.describe()}]^{p:g}", dim=C.dim, value=value,
        subgrad=subgrad,
        analytic_G=lambda x: (1.0 - 1.0 / p) * x + (1.0 / p) * P(x),
        project_C=P, min_value_hint=0.0, is_smooth=smooth,
    )
    props = {}
    if p == 1.0:
        props["firmly_nonexpansive"] = (True, "G = P_C")
    return CatalogEntry(h, "everywhere" if p > 1 else "outside C",
                        known_properties=props, recession_polar=recession_polar(C),
                        params={"set": C.describe(), "p": p})


def _intersection_projector(Cs: Sequence[ConvexSetSpec]):
    projs = [C.project for C in Cs]
    if len(projs) == 1:
        return projs[0]
    return lambda x: dykstra(projs, x)


def make_max_dist(Cs: Sequence[ConvexSetSpec]) -> CatalogEntry:
    """``f = max_i d_{C_i}``; the selection uses the lowest active index.

    ``G x`` is then the projection onto the lowest-index farthest set.
    """
    Cs = list(Cs)
    if not Cs:
        raise EmptyList("make_max_dist needs at least one set")
    n = Cs[0].dim
    if any(C.dim != n for C in Cs):
        raise DimensionMismatch("all sets must share one dimension")
    pieces = [make_dist_power(C, 1.0).handle for C in Cs]
    mx = calculus.max_of(pieces)

    def analytic(x):
        d = [C.distance(x) for C in Cs]
        if not max(d) > 0:
            return x.copy()
        return Cs[calculus.active_set(d)[0]].project(x)

    def smooth(x):
        d = [C.distance(x) for C in Cs]
        return max(d) > 0 and len(calculus.active_set(d)) == 1

    desc = "|".join(C.describe() for C in Cs)
    h = FunctionHandle(
        name=f"max_dist[{desc}]", dim=n, value=mx.value, subgrad=mx.subgrad,
        analytic_G=analytic, project_C=_intersection_projector(Cs),
        min_value_hint=0.0, is_smooth=smooth,
    )
    return CatalogEntry(h, "off C where the farthest set is unique",
                        params={"sets": desc})


def make_weighted_dist_powers(Cs: Sequence[ConvexSetSpec], weights: Sequence[float],
                              p: float = 2.0) -> CatalogEntry:
    """``f = sum_i w_i d_{C_i}^p`` with weights in (0, 1] summing to one."""
    Cs = list(Cs)
    if not Cs:
        raise EmptyList("make_weighted_dist_powers needs at least one set")
    w = np.asarray(weights, dtype=float).reshape(-1)
    if (w.size != len(Cs) or np.any(w <= 0) or np.any(w > 1)
            or not math.isclose(w.sum(), 1.0, abs_tol=1e-12)):
        raise BadWeights("weights must lie in (0,1], one per set, and sum to 1")
    if not p >= 1:
        raise BadParameter("p must be >= 1")
    p = float(p)
    n = Cs[0].dim
    if any(C.dim != n for C in Cs):
        raise DimensionMismatch("all sets must share one dimension")

    def residuals(x):
        return [x - C.project(x) for C in Cs]

    def value(x):
        return float(sum(wi * float(np.linalg.norm(r)) ** p
                         for wi, r in zip(w, residuals(x))))

    def subgrad(x):
        g = np.zeros(n)
        for wi, r in zip(w, residuals(x)):
            d = float(np.linalg.norm(r))
            if d > 0:
                g += wi * p * d ** (p - 2.0) * r
        return g

    def analytic(x):
        res = residuals(x)
        dist = [float(np.linalg.norm(r)) for r in res]
        if p == 2.0:
            # closed form in terms of the weighted average of projections
            if not max(dist) > 0:
                return x.copy()
            num = sum(wi * d * d for wi, d in zip(w, dist))
            avg_proj = sum(wi * C.project(x) for wi, C in zip(w, Cs))
            direction = x - avg_proj
            return x - num / (2.0 * float(direction @ direction)) * direction
        act = [i for i, d in enumerate(dist) if d > 0]
        if not act:
            return x.copy()
        num = sum(w[i] * dist[i] ** p for i in act)
        v = sum(w[i] * dist[i] ** (p - 2.0) * res[i] for i in act)
        return x - num / (p * float(v @ v)) * v

    desc = "|".join(C.describe() for C in Cs)
    h = FunctionHandle(
        name=f"weighted_dist[{desc}]^{p:g}", dim=n, value=value, subgrad=subgrad,
        analytic_G=analytic, project_C=_intersection_projector(Cs),
        min_value_hint=0.0,
        is_smooth=lambda x: p > 1 or min(C.distance(x) for C in Cs) > 0,
    )
    return CatalogEntry(h, "everywhere" if p > 1 else "outside every C_i",
                        params={"sets": desc, "weights": w.tolist(), "p": p})


def make_affine(u, beta: float = 0.0, absolute: bool = False) -> CatalogEntry:
    """``f = <u,x> - beta`` (halfspace) or ``|<u,x> - beta|`` (hyperplane)."""
    u = as_vector(u)
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-12:
        raise NotUnit("u must have unit norm")
    beta = float(beta)
    n = u.size
    if absolute:
        C = ConvexSetSpec.hyperplane(u, beta)
        value = lambda x: abs(float(u @ x) - beta)  # noqa: E731
        subgrad = lambda x: _sgn(float(u @ x) - beta) * u  # noqa: E731
        analytic = lambda x: x - (float(u @ x) - beta) * u  # noqa: E731
        smooth = lambda x: float(u @ x) != beta  # noqa: E731
    else:
        C = ConvexSetSpec.halfspace(u, beta)
        value = lambda x: float(u @ x) - beta  # noqa: E731
        subgrad = lambda x: u.copy()  # noqa: E731
        analytic = lambda x: x - max(float(u @ x) - beta, 0.0) * u  # noqa: E731
        smooth = lambda x: True  # noqa: E731
    h = FunctionHandle(
        name="affine_abs" if absolute else "affine", dim=n, value=value,
        subgrad=subgrad, analytic_G=analytic, project_C=C.project,
        min_value_hint=0.0 if absolute else None, is_smooth=smooth,
    )
    return CatalogEntry(
        h, "off the hyperplane" if absolute else "everywhere",
        known_properties={"firmly_nonexpansive": (True, "G = P_C")},
        recession_polar=recession_polar(C),
        params={"u": u.tolist(), "beta": beta, "absolute": bool(absolute)},
    )


def make_cone_quadratic(K: Optional[ConvexSetSpec] = None, n: int = 2) -> CatalogEntry:
    """``f = <x, P_K x> / 2`` for a closed convex cone ``K``.

    ``C`` is the polar cone and ``G = Id - P_K / 2``.
    """
    if K is None:
        K = ConvexSetSpec.nonneg_orthant(n)
    if not K.is_cone:
        raise UnsupportedSet(f"{K.describe()} is not a cone")
    PK = K.project

    def value(x):
        return 0.5 * float(x @ PK(x))

    h = FunctionHandle(
        name=f"cone_quad[{K.describe()}]", dim=K.dim, value=value,
        subgrad=PK,
        analytic_G=lambda x: x - 0.5 * PK(x),
        project_C=lambda x: x - PK(x),
        min_value_hint=0.0, is_smooth=lambda x: True,
    )
    return CatalogEntry(h, "everywhere", recession_polar=K,
                        params={"cone": K.describe()})


def _residual_ball_projector(A: np.ndarray, b: Vector, eps: float):
    """Projector onto ``{x : ||Ax - b|| <= eps}`` (assumed nonempty)."""
    Atb = A.T @ b
    s2, V = np.linalg.eigh(A.T @ A)
    s2 = np.maximum(s2, 0.0)
    pinv = np.linalg.pinv(A)

    def y_of(x, mu):
        return V @ ((V.T @ (x + mu * Atb)) / (1.0 + mu * s2))

    def project(x):
        r = A @ x - b
        if float(np.linalg.norm(r)) <= eps:
            return x
        if eps == 0.0:
            return x - pinv @ r

        def phi(mu):
            return float(np.linalg.norm(A @ y_of(x, mu) - b)) - eps

        hi = 1.0
        while phi(hi) > 0:
            hi *= 2.0
            if hi > 1e20:
                return y_of(x, hi)
        mu = brentq(phi, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                    maxiter=500)
        return y_of(x, mu)

    return project


def make_least_squares(A, b, eps: float = 0.0, p: float = 2.0) -> CatalogEntry:
    """``f = ||Ax - b||^p - eps^p``.

    ``C = {x : ||Ax - b|| <= eps}`` must be nonempty (not checked).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = as_vector(b, A.shape[0])
    if not eps >= 0:
        raise BadParameter("eps must be >= 0")
    if not p >= 1:
        raise BadParameter("p must be >= 1")
    eps, p = float(eps), float(p)
    n = A.shape[1]

    def value(x):
        return float(np.linalg.norm(A @ x - b)) ** p - eps ** p

    def subgrad(x):
        r = A @ x - b
        nr = float(np.linalg.norm(r))
        if nr == 0.0:
            return np.zeros(n)
        return p * nr ** (p - 2.0) * (A.T @ r)

    def analytic(x):
        r = A @ x - b
        nr = float(np.linalg.norm(r))
        if not nr > eps:
            return x.copy()
        g = A.T @ r
        return x - (nr ** p - eps ** p) / (p * nr ** (p - 2.0) * float(g @ g)) * g

    h = FunctionHandle(
        name="least_squares", dim=n, value=value, subgrad=subgrad,
        analytic_G=analytic, project_C=_residual_ball_projector(A, b, eps),
        min_value_hint=None,
        is_smooth=lambda x: p > 1 or float(np.linalg.norm(A @ x - b)) > 0,
    )
    return CatalogEntry(h, "everywhere" if p > 1 else "where Ax != b",
                        sample_box=(-3.0, 3.0), recession_polar=_range_subspace(A),
                        params={"A": A.tolist(), "b": b.tolist(), "eps": eps, "p": p})


def _psd_kernel_projector(M: np.ndarray, tol: float):
    lam, V = np.linalg.eigh(M)
    ker = V[:, np.abs(lam) <= tol * max(1.0, float(np.max(np.abs(lam))))]
    return lambda x: ker @ (ker.T @ x)


def make_quadratic_form(M, p: float = 1.0) -> CatalogEntry:
    """``f = <x, Mx>^(p/2)`` for symmetric positive semidefinite ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1] or np.max(np.abs(M - M.T)) > 1e-12:
        raise NotPSD("M must be square and symmetric")
    if np.min(np.linalg.eigvalsh(M)) < -1e-10:
        raise NotPSD("M has a negative eigenvalue")
    if not p >= 1:
        raise BadParameter("p must be >= 1")
    p = float(p)
    n = M.shape[0]

    def q(x):
        return max(float(x @ (M @ x)), 0.0)

    def value(x):
        return q(x) ** (p / 2.0)

    def subgrad(x):
        qx = q(x)
        if qx == 0.0:
            return np.zeros(n)
        return p * qx ** (p / 2.0 - 1.0) * (M @ x)

    def analytic(x):
        Mx = M @ x
        mm = float(Mx @ Mx)
        if mm == 0.0:
            return x.copy()
        return x - q(x) / (p * mm) * Mx

    h = FunctionHandle(
        name="quad_form", dim=n, value=value, subgrad=subgrad,
        analytic_G=analytic, project_C=_psd_kernel_projector(M, 1e-10),
        min_value_hint=0.0, is_smooth=lambda x: p > 1 or q(x) > 0,
    )
    return CatalogEntry(h, "everywhere" if p > 1 else "off ker M",
                        recession_polar=_range_subspace(M),
                        params={"M": M.tolist(), "p": p})


def make_accelerated(A) -> CatalogEntry:
    """``f = sqrt(<x, x - Ax>)`` for symmetric nonexpansive ``A``.

    ``G`` is the accelerated mapping ``x -> t_x A x + (1 - t_x) x``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1] or np.max(np.abs(A - A.T)) > 1e-12:
        raise NotSymmetric("A must be square and symmetric")
    if np.max(np.abs(np.linalg.eigvalsh(A))) > 1.0 + 1e-12:
        raise NotNonexpansive("A has spectral norm above 1")
    n = A.shape[0]
    M = np.eye(n) - A
    base = make_quadratic_form(M, 1.0)

    def analytic(x):
        r = x - A @ x
        rr = float(r @ r)
        if rr == 0.0:
            return x.copy()
        t = float(x @ r) / rr
        return t * (A @ x) + (1.0 - t) * x

    h = FunctionHandle(
        name="accelerated", dim=n, value=base.handle.value,
        subgrad=base.handle.subgrad, analytic_G=analytic,
        project_C=base.handle.project_C, min_value_hint=0.0,
        is_smooth=base.handle.is_smooth,
    )
    return CatalogEntry(h, "off Fix A", recession_polar=_range_subspace(M),
                        params={"A": A.tolist()})


# pairs near the maximizer of ||2J - Id|| over a grid of [0.05, 2]^2
_FIRM_WITNESS = {8.0: ((1.8, 1.6), (1.7, 1.6)),
                 10.0: ((1.55, 1.7), (1.55, 1.8)),
                 12.0: ((1.25, 1.35), (1.25, 1.45))}


def make_pnorm_power(p: float = 4.0) -> CatalogEntry:
    """``f(x1, x2) = |x1|^p + |x2|^p`` on R^2, ``p > 1``.

    Sampling box ``[-5, 5]^2`` for ``p <= 4`` and ``[-2, 2]^2`` above, which
    keeps ``f`` small enough for absolute tolerances.
    """
    if not p > 1:
        raise BadParameter("p must be > 1")
    p = float(p)

    def value(x):
        return float(np.sum(np.abs(x) ** p))

    def subgrad(x):
        return p * np.abs(x) ** (p - 1.0) * np.sign(x)

    def analytic(x):
        a = np.abs(x)
        if not np.any(a):
            return x.copy()
        fx = float(np.sum(a ** p))
        denom = p * float(np.sum(a ** (2.0 * p - 2.0)))
        return x - fx * a ** (p - 1.0) * np.sign(x) / denom

    h = FunctionHandle(
        name=f"pnorm[{p:g}]", dim=2, value=value, subgrad=subgrad,
        analytic_G=analytic, project_C=lambda x: np.zeros(2),
        min_value_hint=0.0, is_smooth=lambda x: True,
    )
    props = {"decreasing": (True, "f(x) >= f(Gx) for every p > 1")}
    if p in (2.0, 4.0, 6.0):
        props["firmly_nonexpansive"] = (True, "Jacobian criterion, p in {2,4,6}")
        props["monotone"] = (True, "implied by firm nonexpansiveness")
    if p in (8.0, 10.0, 12.0):
        props["firmly_nonexpansive"] = (False, "Jacobian criterion, p in {8,10,12}")
        props["id_minus_G_nonexpansive"] = (True, "Jacobian criterion, p in {8,10,12}")
        props["monotone"] = (True, "Id - G nonexpansive, p in {8,10,12}")
    if 1.0 < p < 2.0:
        props["monotone"] = (False, "pairs (1,xi), (-1,xi) with xi large")
    probes = {"monotone": [(np.array([1.0, xi]), np.array([-1.0, xi]))
                           for xi in (10.0, 100.0, 1000.0)]}
    if p in _FIRM_WITNESS:
        x, y = _FIRM_WITNESS[p]
        probes["firmly_nonexpansive"] = [(np.array(x), np.array(y))]
    return CatalogEntry(h, "everywhere", known_properties=props,
                        strictly_convex=True,
                        sample_box=(-5.0, 5.0) if p <= 4 else (-2.0, 2.0),
                        recession_polar=_zero_polar(2), probe_pairs=probes,
                        params={"p": p})


_DIAGONALS = (np.array([1.0, 1.0]), np.array([1.0, -1.0]))


def make_ell1() -> CatalogEntry:
    """``f(x1, x2) = |x1| + |x2|``, written as ``sqrt(2) max(d_H1, d_H2)``.

    ``H1 = {x1 + x2 = 0}``, ``H2 = {x1 - x2 = 0}``. The selection is
    ``sgn(<a_i, x>) a_i`` for the lowest-index farthest hyperplane, so ``G``
    projects onto the farther diagonal.
    """
    def value(x):
        return abs(float(x[0])) + abs(float(x[1]))

    def _pick(x):
        inner = [float(a @ x) for a in _DIAGONALS]
        return calculus.active_set([abs(t) for t in inner])[0], inner

    def subgrad(x):
        i, inner = _pick(x)
        return _sgn(inner[i]) * _DIAGONALS[i]

    def analytic(x):
        if not (x[0] or x[1]):
            return x.copy()
        i, inner = _pick(x)
        return x - (inner[i] / 2.0) * _DIAGONALS[i]

    h = FunctionHandle(
        name="ell1", dim=2, value=value, subgrad=subgrad, analytic_G=analytic,
        project_C=lambda x: np.zeros(2), min_value_hint=0.0,
        is_smooth=lambda x: bool(x[0] and x[1]),
    )
    props = {
        "decreasing": (True, "f(Gx) <= f(x) everywhere"),
        "monotone": (False, "<x-y, Gx-Gy> = -4 at x=(-1,3), y=(1,3)"),
    }
    probes = {"monotone": [(np.array([-1.0, 3.0]), np.array([1.0, 3.0]))]}
    return CatalogEntry(h, "off the coordinate axes", known_properties=props,
                        recession_polar=_zero_polar(2), probe_pairs=probes)


# ---------------------------------------------------------------------------
# one-dimensional family

ONE_D_KINDS = ("quad", "even_power", "exp_abs", "exp_sq", "infeasible",
               "quad_minus_one", "kink_max", "zero")


def _one_d_handle(name, f, df, d2f, analytic=None, project=None, min_value=None,
                  smooth=None):
    return FunctionHandle(
        name=name, dim=1,
        value=lambda x: float(f(float(x[0]))),
        subgrad=lambda x: np.array([float(df(float(x[0])))]),
        analytic_G=None if analytic is None else (
            lambda x: np.array([float(analytic(float(x[0])))])),
        project_C=None if project is None else (
            lambda x: np.array([float(project(float(x[0])))])),
        second_deriv=d2f, min_value_hint=min_value,
        is_smooth=(lambda x: True) if smooth is None else (
            lambda x: bool(smooth(float(x[0])))),
    )


def _interval_projector(r):
    return lambda t: min(max(t, -r), r)


def make_1d(kind: str, alpha: Optional[float] = None, n: Optional[int] = None
            ) -> CatalogEntry:
    """One-dimensional instances.

    kind
        ``quad``: ``t^2 - alpha``; ``even_power``: ``t^n - alpha`` (n even);
        ``exp_abs``: ``exp(|t|) - 1``; ``exp_sq``: ``exp(t^2) - 1`` (box
        ``[-2, 2]``); ``infeasible``: ``t^2 + 1``; ``quad_minus_one``:
        ``t^2 - 1``; ``kink_max``: ``max(-t, t, 2t - 1)``; ``zero``: ``0``.

    ``alpha >= 0`` is accepted for ``quad`` and ``even_power`` so that the
    minimum-zero members ``t^2`` and ``t^n`` are available.
    """
    mono = {"monotone": (True, "twice differentiable off C on the real line")}
    dec = {"decreasing": (True, "every feasible f on the real line")}
    if kind in ("quad", "quad_minus_one", "even_power"):
        if kind == "quad_minus_one":
            a, m = 1.0, 2
        else:
            a = 1.0 if alpha is None else float(alpha)
            m = 2 if kind == "quad" else (4 if n is None else int(n))
        if not a >= 0:
            raise BadParameter("alpha must be >= 0")
        if m < 2 or m % 2:
            raise BadParameter("n must be an even integer >= 2")
        r = a ** (1.0 / m)

        def G(t, a=a, m=m):
            return t if t ** m - a <= 0 else t - (t ** m - a) / (m * t ** (m - 1))

        name = {"quad": f"one_d:quad[{a:g}]", "quad_minus_one": "one_d:quad_minus_one",
                "even_power": f"one_d:even_power[{m},{a:g}]"}[kind]
        h = _one_d_handle(
            name,
            lambda t: t ** m - a,
            lambda t: m * t ** (m - 1),
            lambda t: m * (m - 1) * t ** (m - 2),
            analytic=G, project=_interval_projector(r),
            min_value=-a,
        )
        props = {"firmly_nonexpansive": (True, "(f')^2 - f f'' > 0 off C"), **mono, **dec}
        return CatalogEntry(h, "everywhere", known_properties=props,
                            strictly_convex=True, recession_polar=_zero_polar(1),
                            params={"alpha": a, "n": m})
    if kind == "exp_abs":
        h = _one_d_handle(
            "one_d:exp_abs",
            lambda t: math.exp(abs(t)) - 1.0,
            lambda t: _sgn(t) * math.exp(abs(t)),
            lambda t: math.exp(abs(t)),
            analytic=lambda t: t - _sgn(t) * (1.0 - math.exp(-abs(t))),
            project=lambda t: 0.0, min_value=0.0, smooth=lambda t: t != 0,
        )
        props = {"firmly_nonexpansive": (True, "G' = 1 - exp(-|t|) in [0,1)"),
                 **mono, **dec}
        return CatalogEntry(h, "t != 0", known_properties=props,
                            strictly_convex=True, recession_polar=_zero_polar(1))
    if kind == "exp_sq":
        h = _one_d_handle(
            "one_d:exp_sq",
            lambda t: math.expm1(t * t),
            lambda t: 2.0 * t * math.exp(t * t),
            lambda t: (2.0 + 4.0 * t * t) * math.exp(t * t),
            analytic=lambda t: t if t == 0 else
            t - math.expm1(t * t) / (2.0 * t * math.exp(t * t)),
            project=lambda t: 0.0, min_value=0.0,
        )
        props = {"firmly_nonexpansive": (False, "(f')^2 - f f'' < 0 for |t| > 1.2"),
                 "nonexpansive": (False, "(f')^2 - f f'' < 0 for |t| > 1.2"),
                 **mono, **dec}
        return CatalogEntry(h, "everywhere", known_properties=props,
                            strictly_convex=True, sample_box=(-2.0, 2.0),
                            recession_polar=_zero_polar(1))
    if kind == "infeasible":
        h = _one_d_handle(
            "one_d:infeasible",
            lambda t: t * t + 1.0,
            lambda t: 2.0 * t,
            lambda t: 2.0,
            analytic=lambda t: (t * t - 1.0) / (2.0 * t),
            min_value=1.0,
        )
        return CatalogEntry(h, "everywhere (C is empty)", strictly_convex=True)
    if kind == "kink_max":
        pieces = [
            _one_d_handle("-t", lambda t: -t, lambda t: -1.0, lambda t: 0.0),
            _one_d_handle("t", lambda t: t, lambda t: 1.0, lambda t: 0.0),
            _one_d_handle("2t-1", lambda t: 2.0 * t - 1.0, lambda t: 2.0, lambda t: 0.0),
        ]
        mx = calculus.max_of(pieces, project_C=lambda x: np.zeros(1),
                             name="one_d:kink_max")
        h = FunctionHandle(
            name="one_d:kink_max", dim=1, value=mx.value, subgrad=mx.subgrad,
            analytic_G=mx.analytic_G, project_C=mx.project_C, min_value_hint=0.0,
            is_smooth=lambda x: float(x[0]) not in (0.0, 1.0),
        )
        return CatalogEntry(h, "t not in {0, 1}", known_properties=dict(dec),
                            recession_polar=_zero_polar(1))
    if kind == "zero":
        h = _one_d_handle("one_d:zero", lambda t: 0.0, lambda t: 0.0, lambda t: 0.0,
                          analytic=lambda t: t, project=lambda t: t, min_value=0.0)
        return CatalogEntry(h, "everywhere", recession_polar=ConvexSetSpec.singleton([0.0]))
    raise BadParameter(f"unknown one-dimensional kind {kind!r}; "
                       f"choose from {', '.join(ONE_D_KINDS)}")


def axis_diagonal_max_dist() -> CatalogEntry:
    """``max(d_C1, d_C2)`` with ``C1`` the x-axis and ``C2`` the diagonal."""
    e = make_max_dist([ConvexSetSpec.hyperplane([0.0, 1.0], 0.0),
                       ConvexSetSpec.hyperplane([1.0, -1.0], 0.0)])
    e.known_properties["decreasing"] = (False, "f jumps from 1 to sqrt(2) at (2,1)")
    e.probe_points["decreasing"] = [np.array([2.0, 1.0])]
    return e


def all_default_entries() -> list:
    """One representative instance of every catalog constructor."""
    ball = ConvexSetSpec.ball([0.0, 0.0], 1.0)
    half = ConvexSetSpec.halfspace([1.0, 0.0], 1.0)
    A_ls = np.array([[1.0, 2.0], [0.0, 1.0], [1.0, -1.0]])
    entries = [
        make_sq_norm(2), make_sq_norm(3), make_huber(2), make_huber(3),
        make_dist_power(ball, 1), make_dist_power(ball, 2), make_dist_power(ball, 3),
        make_dist_power(half, 1), make_dist_power(half, 2.5),
        make_dist_power(ConvexSetSpec.box([-1, -1], [1, 2]), 2),
        axis_diagonal_max_dist(),
        make_max_dist([ball, half, ConvexSetSpec.hyperplane([1.0, 1.0], 0.0)]),
        make_weighted_dist_powers([ConvexSetSpec.halfspace([1.0, 0.0], 0.0),
                                   ConvexSetSpec.halfspace([0.0, 1.0], 0.0)],
                                  [0.5, 0.5], 2),
        make_weighted_dist_powers([ball, half], [0.3, 0.7], 3),
        make_affine([0.6, 0.8], 1.0), make_affine([0.0, 1.0], 0.0, absolute=True),
        make_cone_quadratic(ConvexSetSpec.nonneg_orthant(2)),
        make_cone_quadratic(ConvexSetSpec.halfspace([1.0, 1.0, 0.0], 0.0)),
        make_least_squares(A_ls, [1.0, 0.0, 1.0], eps=1.0, p=1),
        make_least_squares(A_ls, [1.0, 0.0, 1.0], eps=0.5, p=3),
        make_least_squares(np.eye(2), [0.0, 0.0], eps=0.0, p=2),
        make_quadratic_form(np.diag([1.0, 0.0]), 2),
        make_quadratic_form(np.array([[2.0, 1.0], [1.0, 2.0]]), 1),
        make_accelerated(np.diag([0.5, 2.0 / 3.0, 0.75])),
        make_accelerated(np.array([[0.0, 1.0], [1.0, 0.0]])),
        make_pnorm_power(1.5), make_pnorm_power(2), make_pnorm_power(4),
        make_pnorm_power(8), make_ell1(),
        make_1d("quad", alpha=2.0), make_1d("even_power", alpha=1.0, n=4),
        make_1d("exp_abs"), make_1d("exp_sq"), make_1d("quad_minus_one"),
        make_1d("kink_max"),
    ]
    return entries
