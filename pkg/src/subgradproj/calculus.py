"""Operations on function handles and their effect on the projector.

Every combinator returns a new :class:`~subgradproj.core.FunctionHandle`
``g`` built from ``f``. Its value and subgradient are derived from those of
``f``, and its ``analytic_G`` is the transformed projector of ``f``
(for instance ``x -> z + G_f(x - z)`` for a translation). Comparing
``evaluate_projector(g, x)`` with ``g.analytic_G(x)`` therefore checks the
transformation rule with two independent computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core import FunctionHandle, Vector, as_vector, evaluate_projector
from .errors import (BadWeights, DimensionMismatch, EmptyList, InvalidExponent,
                     NoBracket, NonpositiveScalar, NotUnitary, ProxNotSupplied)

__all__ = [
    "UnitaryMap", "MaxSelectionPolicy", "scale", "prescale", "power",
    "unitary_compose", "translate", "max_of", "positive_part",
    "moreau_envelope", "numeric_prox", "active_set",
]


def _G(f: FunctionHandle) -> Callable[[Vector], Vector]:
    return lambda x: evaluate_projector(f, x).Gx


@dataclass(frozen=True, eq=False)
class UnitaryMap:
    """A real orthogonal matrix, checked at construction."""

    matrix: np.ndarray
    tol: float = 1e-12

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise NotUnitary(f"matrix must be square, got {A.shape}")
        eye = np.eye(A.shape[0])
        if (np.max(np.abs(A.T @ A - eye)) > self.tol
                or np.max(np.abs(A @ A.T - eye)) > self.tol):
            raise NotUnitary("matrix is not orthogonal")
        object.__setattr__(self, "matrix", A)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def rotation(cls, angle: float) -> "UnitaryMap":
        c, s = math.cos(angle), math.sin(angle)
        return cls(np.array([[c, -s], [s, c]]))


@dataclass(frozen=True)
class MaxSelectionPolicy:
    """How ``max_of`` picks a subgradient when several pieces are active.

    ``rule="lowest_active_index"`` uses the subgradient of the first active
    piece. ``rule="supplied_weights"`` uses the convex combination of the
    active pieces' subgradients with ``weights`` renormalized over the active
    set; if every active weight is zero it falls back to the lowest index.
    """

    rule: str = "lowest_active_index"
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.rule not in ("lowest_active_index", "supplied_weights"):
            raise ValueError(f"unknown selection rule {self.rule!r}")
        if self.rule == "supplied_weights":
            if self.weights is None:
                raise BadWeights("supplied_weights needs weights")
            w = np.asarray(self.weights, dtype=float)
            if np.any(w < 0) or not math.isclose(w.sum(), 1.0, abs_tol=1e-12):
                raise BadWeights("weights must be nonnegative and sum to 1")


LOWEST_ACTIVE = MaxSelectionPolicy()


def _check_positive(alpha):
    if not alpha > 0:
        raise NonpositiveScalar(f"scalar must be positive, got {alpha!r}")
    return float(alpha)


def scale(f: FunctionHandle, alpha: float) -> FunctionHandle:
    """``g = alpha * f``; the projector is unchanged."""
    a = _check_positive(alpha)
    return FunctionHandle(
        name=f"{a:g}*{f.name}", dim=f.dim,
        value=lambda x: a * f.value(x),
        subgrad=lambda x: a * np.asarray(f.subgrad(x), dtype=float),
        analytic_G=_G(f),
        project_C=f.project_C,
        second_deriv=(None if f.second_deriv is None
                      else lambda t: a * f.second_deriv(t)),
        min_value_hint=None if f.min_value_hint is None else a * f.min_value_hint,
        is_smooth=f.is_smooth,
    )


def prescale(f: FunctionHandle, alpha: float) -> FunctionHandle:
    """``g = f(alpha * x)``; ``G_g(x) = G_f(alpha x) / alpha``."""
    a = _check_positive(alpha)
    Gf = _G(f)
    PC = f.project_C
    return FunctionHandle(
        name=f"{f.name}({a:g}x)", dim=f.dim,
        value=lambda x: f.value(a * x),
        subgrad=lambda x: a * np.asarray(f.subgrad(a * x), dtype=float),
        analytic_G=lambda x: Gf(a * x) / a,
        project_C=None if PC is None else (lambda x: PC(a * x) / a),
        second_deriv=(None if f.second_deriv is None
                      else lambda t: a * a * f.second_deriv(a * t)),
        min_value_hint=f.min_value_hint,
        is_smooth=None if f.is_smooth is None else (lambda x: f.is_smooth(a * x)),
    )


def power(f: FunctionHandle, alpha: float) -> FunctionHandle:
    """``g = f**alpha`` for nonnegative ``f`` and ``alpha >= 1``.

    The projector becomes the average ``(1 - 1/alpha) Id + (1/alpha) G_f``.
    Nonnegativity of ``f`` is the caller's responsibility.
    """
    if not alpha >= 1:
        raise InvalidExponent(f"exponent must be >= 1, got {alpha!r}")
    a = float(alpha)
    Gf = _G(f)

    def value(x):
        return max(f.value(x), 0.0) ** a

    def subgrad(x):
        fx = max(f.value(x), 0.0)
        return a * fx ** (a - 1.0) * np.asarray(f.subgrad(x), dtype=float)

    second = None
    if f.second_deriv is not None and f.dim == 1:
        def second(t):
            ft = max(f.value(np.array([t])), 0.0)
            d1 = float(f.subgrad(np.array([t]))[0])
            d2 = f.second_deriv(t)
            lead = a * (a - 1.0) * ft ** (a - 2.0) * d1 * d1 if a != 1.0 else 0.0
            return lead + a * ft ** (a - 1.0) * d2

    return FunctionHandle(
        name=f"{f.name}^{a:g}", dim=f.dim, value=value, subgrad=subgrad,
        analytic_G=lambda x: (1.0 - 1.0 / a) * x + (1.0 / a) * Gf(x),
        project_C=f.project_C, second_deriv=second,
        min_value_hint=0.0 if f.min_value_hint == 0.0 else None,
        is_smooth=f.is_smooth,
    )


def unitary_compose(f: FunctionHandle, A: UnitaryMap) -> FunctionHandle:
    """``g = f o A``; ``G_g = A^T o G_f o A``."""
    if not isinstance(A, UnitaryMap):
        A = UnitaryMap(A)
    if A.dim != f.dim:
        raise DimensionMismatch(f"map has dimension {A.dim}, function {f.dim}")
    M = A.matrix
    Gf = _G(f)
    PC = f.project_C
    return FunctionHandle(
        name=f"{f.name}oA", dim=f.dim,
        value=lambda x: f.value(M @ x),
        subgrad=lambda x: M.T @ np.asarray(f.subgrad(M @ x), dtype=float),
        analytic_G=lambda x: M.T @ Gf(M @ x),
        project_C=None if PC is None else (lambda x: M.T @ PC(M @ x)),
        second_deriv=(None if f.second_deriv is None
                      else lambda t: f.second_deriv(M[0, 0] * t)),
        min_value_hint=f.min_value_hint,
        is_smooth=None if f.is_smooth is None else (lambda x: f.is_smooth(M @ x)),
    )


def translate(f: FunctionHandle, z) -> FunctionHandle:
    """``g(x) = f(x - z)``; ``G_g(x) = z + G_f(x - z)``."""
    z = as_vector(z, f.dim)
    Gf = _G(f)
    PC = f.project_C
    return FunctionHandle(
        name=f"{f.name}(x-z)", dim=f.dim,
        value=lambda x: f.value(x - z),
        subgrad=lambda x: np.asarray(f.subgrad(x - z), dtype=float),
        analytic_G=lambda x: z + Gf(x - z),
        project_C=None if PC is None else (lambda x: z + PC(x - z)),
        second_deriv=(None if f.second_deriv is None
                      else lambda t: f.second_deriv(t - z[0])),
        min_value_hint=f.min_value_hint,
        is_smooth=None if f.is_smooth is None else (lambda x: f.is_smooth(x - z)),
    )


def active_set(values: Sequence[float], tie_tol: Optional[float] = None) -> list:
    """Indices whose value ties with the maximum.

    The default tie tolerance is ``1e-12 * max(1, |max|)``.
    """
    values = [float(v) for v in values]
    g = max(values)
    if tie_tol is None:
        tie_tol = 1e-12 * max(1.0, abs(g))
    return [i for i, v in enumerate(values) if v >= g - tie_tol]


def max_of(fs: Sequence[FunctionHandle],
           policy: MaxSelectionPolicy = LOWEST_ACTIVE,
           project_C: Optional[Callable[[Vector], Vector]] = None,
           name: Optional[str] = None) -> FunctionHandle:
    """Pointwise maximum of finitely many functions.

    With the lowest-active-index policy the projector at a point with
    ``g(x) > 0`` coincides with the projector of the selected piece, which is
    what ``analytic_G`` reports. No closed form is attached for weighted
    selections. ``project_C`` onto the intersection can be supplied by the
    caller.
    """
    fs = list(fs)
    if not fs:
        raise EmptyList("max_of needs at least one function")
    n = fs[0].dim
    if any(h.dim != n for h in fs):
        raise DimensionMismatch("all functions must share one dimension")
    if policy.rule == "supplied_weights" and len(policy.weights) != len(fs):
        raise BadWeights("one weight per function is required")
    Gs = [_G(h) for h in fs]

    def value(x):
        return max(h.value(x) for h in fs)

    def subgrad(x):
        vals = [h.value(x) for h in fs]
        act = active_set(vals)
        if policy.rule == "supplied_weights":
            w = np.array([policy.weights[i] for i in act], dtype=float)
            if w.sum() > 0:
                w = w / w.sum()
                return sum(wi * np.asarray(fs[i].subgrad(x), dtype=float)
                           for wi, i in zip(w, act))
        return np.asarray(fs[act[0]].subgrad(x), dtype=float)

    analytic = None
    if policy.rule == "lowest_active_index":
        def analytic(x):
            vals = [h.value(x) for h in fs]
            if not max(vals) > 0:
                return x.copy()
            return Gs[active_set(vals)[0]](x)

    return FunctionHandle(
        name=name or "max(" + ",".join(h.name for h in fs) + ")", dim=n,
        value=value, subgrad=subgrad, analytic_G=analytic, project_C=project_C,
    )


def positive_part(f: FunctionHandle) -> FunctionHandle:
    """``g = max(f, 0)``; the projector is unchanged."""
    Gf = _G(f)

    def subgrad(x):
        if f.value(x) > 0:
            return np.asarray(f.subgrad(x), dtype=float)
        return np.zeros(f.dim)

    return FunctionHandle(
        name=f"({f.name})+", dim=f.dim,
        value=lambda x: max(f.value(x), 0.0),
        subgrad=subgrad, analytic_G=Gf, project_C=f.project_C,
        min_value_hint=0.0,
    )


def numeric_prox(f: FunctionHandle, x: float, tol: float = 1e-12,
                 max_doublings: int = 60) -> float:
    """Solve ``y + f'(y) = x`` for a convex differentiable ``f`` on R.

    Safeguarded Newton (when ``f.second_deriv`` is available) inside a
    bisection bracket. The bracket starts at ``x -/+ (1 + |f'(x)|)`` and is
    doubled at most ``max_doublings`` times.
    """
    if f.dim != 1:
        raise DimensionMismatch("numeric_prox works on one-dimensional functions")
    x = float(x)

    def deriv(y):
        return float(f.subgrad(np.array([y]))[0])

    def phi(y):
        return y + deriv(y) - x

    dx = deriv(x)
    if np.isfinite(dx):
        # f' nondecreasing: the root lies between x - f'(x) and x
        lo, hi = min(x, x - dx), max(x, x - dx)
    else:
        width = 1.0
        lo, hi = x - width, x + width
        for _ in range(max_doublings + 1):
            if phi(lo) <= 0 <= phi(hi):
                break
            width *= 2.0
            lo, hi = x - width, x + width
        else:
            raise NoBracket(f"no sign change of y + f'(y) - {x} found")
    if lo == hi:
        return lo

    y = x if lo <= x <= hi else 0.5 * (lo + hi)
    for _ in range(200):
        r = phi(y)
        if abs(r) <= tol:
            return y
        if r > 0:
            hi = y
        else:
            lo = y
        step_ok = False
        if f.second_deriv is not None:
            slope = 1.0 + f.second_deriv(y)
            if slope > 0:
                y_new = y - r / slope
                step_ok = lo < y_new < hi
        if not step_ok:
            y_new = 0.5 * (lo + hi)
        if y_new == y or hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(y)):
            return y_new
        y = y_new
    return y


def moreau_envelope(f: FunctionHandle,
                    prox: Union[Callable[[Vector], Vector], str, None] = None
                    ) -> FunctionHandle:
    """Moreau envelope ``g = f box (1/2)||.||^2`` of ``f`` with ``min f = 0``.

    Parameters
    ----------
    f : FunctionHandle
        Convex function whose minimum value is 0 (not checked).
    prox : callable or "numeric"
        The proximity operator ``(Id + df)^-1``. ``"numeric"`` uses
        :func:`numeric_prox` and needs a one-dimensional differentiable ``f``.

    Notes
    -----
    ``g(x) = f(P x) + ||x - P x||^2 / 2`` and ``grad g(x) = x - P x``.
    ``analytic_G`` is the envelope's projector written through ``P`` and
    branching on ``f(x) > 0`` instead of ``g(x) > 0``.
    """
    if prox is None:
        raise ProxNotSupplied("moreau_envelope needs a proximity operator")
    if isinstance(prox, str):
        if prox != "numeric":
            raise ProxNotSupplied(f"unknown prox specifier {prox!r}")
        if f.dim != 1:
            raise ProxNotSupplied("numeric prox only exists for dim 1")

        def P(x):
            return np.array([numeric_prox(f, x[0])])
    else:
        def P(x):
            return np.asarray(prox(x), dtype=float).reshape(-1)

    def value(x):
        p = P(x)
        r = x - p
        return f.value(p) + 0.5 * float(r @ r)

    def subgrad(x):
        return x - P(x)

    def analytic(x):
        if not f.value(x) > 0:
            return x.copy()
        p = P(x)
        r = x - p
        return x - (value(x) / float(r @ r)) * r

    second = None
    if f.second_deriv is not None and f.dim == 1:
        def second(t):
            c = f.second_deriv(float(P(np.array([t]))[0]))
            return c / (1.0 + c)

    return FunctionHandle(
        name=f"env({f.name})", dim=f.dim, value=value, subgrad=subgrad,
        analytic_G=analytic, project_C=f.project_C, second_deriv=second,
        min_value_hint=0.0,
    )
