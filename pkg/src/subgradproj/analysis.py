"""Sampled verification of projector properties.

Every check draws its samples from a seeded :class:`SampleSpec`, evaluates
a margin per sample (positive beyond ``tol`` means violated) and returns a
:class:`PropertyReport`. Structured probe samples are placed ahead of the
random ones, and the reported witness is always the lowest-index violation,
so reports do not depend on evaluation order.

A clean report means "no violation found", never a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.stats import norm as _normal
from scipy.stats import qmc

from .calculus import moreau_envelope
from .core import (FunctionHandle, ProjectorEvaluation, Vector, as_vector,
                   default_fd_step, evaluate_projector, project_halfspace)
from .errors import (BadCSample, InfeasibilityCertificate, MissingSecondDerivative,
                     NumericalFailure, SingularStencil, UnsupportedSet)
from .sets import ConvexSetSpec

DEFAULT_TOL = 1e-9

PAIRWISE_MODES = ("firmly_nonexpansive", "nonexpansive", "monotone",
                  "id_minus_G_nonexpansive")

FACT_ITEMS = ("i_identity", "ii_fix_equals_C", "ii_C_in_H", "iii_G_is_P_H",
              "iv_obtuse", "v_fejer", "vi_step_length", "vii_sharpened_fejer",
              "viii_selection_recovery")


@dataclass(frozen=True)
class SampleSpec:
    """Seeded uniform samples from a box.

    ``box`` is ``(lo, hi)`` with scalar or per-coordinate bounds.
    """

    box: tuple = (-5.0, 5.0)
    count: int = 1000
    seed: int = 0
    pair_mode: bool = False

    def __post_init__(self):
        if int(self.count) < 1:
            raise ValueError("sample count must be >= 1")
        lo, hi = self.box
        if np.any(np.asarray(lo, dtype=float) > np.asarray(hi, dtype=float)):
            raise ValueError("sample box is empty")

    def bounds(self, dim: int):
        lo, hi = self.box
        return (np.broadcast_to(np.asarray(lo, dtype=float), (dim,)),
                np.broadcast_to(np.asarray(hi, dtype=float), (dim,)))

    def draw(self, dim: int) -> np.ndarray:
        """Shape ``(count, dim)``, or ``(count, 2, dim)`` in pair mode."""
        lo, hi = self.bounds(dim)
        rng = np.random.default_rng(self.seed)
        shape = (self.count, 2, dim) if self.pair_mode else (self.count, dim)
        return rng.uniform(lo, hi, size=shape)

    def with_pairs(self, pair_mode: bool = True) -> "SampleSpec":
        return SampleSpec(self.box, self.count, self.seed, pair_mode)


@dataclass
class PropertyReport:
    property_id: str
    function: str
    samples_run: int
    violations: int
    first_witness: Optional[dict]
    seed: Optional[int]
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return _plain({
            "property_id": self.property_id, "function": self.function,
            "samples_run": self.samples_run, "violations": self.violations,
            "first_witness": self.first_witness, "seed": self.seed,
            "tolerance": self.tolerance, "details": self.details,
        })

    def summary(self) -> str:
        status = "ok" if self.passed else "VIOLATED"
        line = (f"{self.property_id} on {self.function}: {status} "
                f"({self.violations}/{self.samples_run}, tol={self.tolerance:g})")
        if self.first_witness is not None:
            line += f" margin={self.first_witness['margin']:.6g}"
        return line


def _plain(obj):
    """Convert numpy containers/scalars to plain Python for serialization."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _scan(property_id: str, f: FunctionHandle, samples: Iterable, measure,
          tol: float, seed: Optional[int], details: Optional[dict] = None
          ) -> PropertyReport:
    """Run ``measure(sample) -> (violated, margin, values)`` over samples.

    ``measure`` may return None for samples the property does not apply to;
    they still count as run.
    """
    n = 0
    violations = 0
    witness = None
    for i, sample in enumerate(samples):
        n += 1
        out = measure(sample)
        if out is None:
            continue
        violated, margin, values = out
        if violated:
            violations += 1
            if witness is None:
                pts = sample if isinstance(sample, tuple) else (sample,)
                witness = {"index": i, "points": [np.asarray(p).tolist() for p in pts],
                           "values": _plain(values), "margin": float(margin)}
    return PropertyReport(property_id, f.name, n, violations, witness, seed,
                          float(tol), _plain(details or {}))


# ---------------------------------------------------------------------------
# Fact identities


def fact_margins(ev: ProjectorEvaluation, cs: np.ndarray) -> dict:
    """Margins of every basic projector identity at one evaluation.

    Equalities give absolute residuals; inequalities give ``lhs - rhs``
    maximized over the rows of ``cs`` (points of ``C``). Items that only
    apply outside ``C`` are omitted when ``f(x) <= 0``.
    """
    x, fx, s, Gx = ev.x, ev.fx, ev.sx, ev.Gx
    fplus = max(fx, 0.0)
    step = x - Gx
    step2 = float(step @ step)
    ss = float(s @ s)
    out = {
        "i_identity": abs(fplus + float(s @ (Gx - x))),
        "ii_fix_equals_C": 0.0 if bool((Gx == x).all()) == (not fx > 0) else math.inf,
        "vi_step_length": abs(fplus - math.sqrt(ss * step2)),
        "viii_selection_recovery": float(np.abs(fplus * step - step2 * s).max()),
    }
    if fx > 0:
        H = ev.halfspace()
        out["iii_G_is_P_H"] = float(np.abs(Gx - project_halfspace(H, x)).max())
    if len(cs):
        to_c = cs - Gx
        x_to_c = cs - x
        xc2 = (x_to_c * x_to_c).sum(axis=1)
        gc2 = (to_c * to_c).sum(axis=1)
        out["iv_obtuse"] = float((to_c @ step).max())
        out["v_fejer"] = float((step2 + gc2 - xc2).max())
        if fx > 0:
            out["ii_C_in_H"] = float((x_to_c @ s).max() + fx)
            out["vii_sharpened_fejer"] = float((fx * fx / ss + gc2 - xc2).max())
    return out


def check_fact_identities(f: FunctionHandle, spec: SampleSpec,
                          c_samples: Sequence, tol: float = 1e-10,
                          c_tol: float = 1e-12,
                          evaluator: Callable = evaluate_projector) -> PropertyReport:
    """Check the basic projector identities and inequalities on samples.

    Parameters
    ----------
    c_samples : sequence of vectors
        Points of ``C``. Each must satisfy ``f(c) <= c_tol``; the small
        allowance absorbs rounding of projected points.
    evaluator : callable
        ``(f, x) -> ProjectorEvaluation``; replaceable for harness self-tests.
    """
    cs = np.array([as_vector(c, f.dim) for c in c_samples]).reshape(-1, f.dim)
    for c in cs:
        if f.value(c) > c_tol:
            raise BadCSample(f"c = {c.tolist()} has f(c) = {f.value(c)!r} > 0")
    counts = dict.fromkeys(FACT_ITEMS, 0)

    def measure(x):
        m = fact_margins(evaluator(f, x), cs)
        failed = [k for k, v in m.items() if v > tol]
        for k in failed:
            counts[k] += 1
        worst = max(m.values())
        return bool(failed), worst, {"failed_items": failed, "margins": m}

    rep = _scan("fact_identities", f, spec.draw(f.dim), measure, tol, spec.seed,
                {"c_samples": len(cs)})
    rep.details["item_violations"] = counts
    return rep


def corrupted_evaluator(factor: float = 1.1) -> Callable:
    """An evaluator that reports ``factor * s(x)`` next to the true ``Gx``."""
    def evaluate(f, x):
        ev = evaluate_projector(f, x)
        return ProjectorEvaluation(ev.x, ev.fx, factor * ev.sx, ev.Gx,
                                   factor * ev.halfspace_normal,
                                   factor * ev.halfspace_normal @ ev.x - ev.fx)
    return evaluate


# ---------------------------------------------------------------------------
# operator properties


def _G(f):
    return lambda x: evaluate_projector(f, x).Gx


def pair_margin(Gx, Gy, x, y, mode: str):
    """``(margin, values)``; the property fails when ``margin > tol``."""
    dx = np.asarray(x) - np.asarray(y)
    dG = np.asarray(Gx) - np.asarray(Gy)
    inner = float(dG @ dx)
    nG = float(np.linalg.norm(dG))
    nx = float(np.linalg.norm(dx))
    values = {"inner_product": inner, "norm_dG": nG, "norm_dx": nx,
              "Gx": Gx, "Gy": Gy}
    if mode == "firmly_nonexpansive":
        return nG * nG - inner, values
    if mode == "nonexpansive":
        return nG - nx, values
    if mode == "monotone":
        return -inner, values
    if mode == "id_minus_G_nonexpansive":
        r = float(np.linalg.norm(dx - dG))
        values["norm_dR"] = r
        return r - nx, values
    raise ValueError(f"unknown mode {mode!r}; choose from {PAIRWISE_MODES}")


def check_pairwise(f: FunctionHandle, spec: SampleSpec, mode: str,
                   tol: float = DEFAULT_TOL, extra_pairs: Sequence = ()
                   ) -> PropertyReport:
    """Test a two-point inequality of ``G`` on sampled pairs.

    ``extra_pairs`` are evaluated first (indices ``0..len-1``).
    """
    if mode not in PAIRWISE_MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {PAIRWISE_MODES}")
    G = _G(f)
    pairs = [(as_vector(a, f.dim), as_vector(b, f.dim)) for a, b in extra_pairs]
    pairs += [(p[0], p[1]) for p in spec.with_pairs().draw(f.dim)]

    def measure(pair):
        x, y = pair
        m, v = pair_margin(G(x), G(y), x, y, mode)
        return m > tol, m, v

    return _scan(mode, f, pairs, measure, tol, spec.seed,
                 {"structured_pairs": len(extra_pairs)})


def check_decreasing(f: FunctionHandle, spec: SampleSpec, tol: float = DEFAULT_TOL,
                     extra_points: Sequence = ()) -> PropertyReport:
    """Violated at ``x`` when ``f(Gx) > f(x) + tol``."""
    G = _G(f)
    pts = [as_vector(p, f.dim) for p in extra_points] + list(spec.draw(f.dim))

    def measure(x):
        fx, Gx = f.value(x), G(x)
        fG = f.value(Gx)
        return fG - fx > tol, fG - fx, {"f_x": fx, "f_Gx": fG, "Gx": Gx}

    return _scan("decreasing", f, pts, measure, tol, spec.seed,
                 {"structured_points": len(extra_points)})


def check_strict_persistence(f: FunctionHandle, spec: SampleSpec) -> PropertyReport:
    """Violated when ``f(x) > 0`` but ``f(Gx) <= 0`` (strictly convex ``f``)."""
    G = _G(f)

    def measure(x):
        fx = f.value(x)
        if not fx > 0:
            return None
        fG = f.value(G(x))
        return not fG > 0, -fG, {"f_x": fx, "f_Gx": fG}

    return _scan("strict_persistence", f, spec.draw(f.dim), measure, 0.0, spec.seed)


def check_range_cone(f: FunctionHandle, spec: SampleSpec,
                     recession_polar: ConvexSetSpec, tol: float = DEFAULT_TOL
                     ) -> PropertyReport:
    """``x - Gx`` must lie in the polar of the recession cone of ``C``."""
    if not recession_polar.is_cone:
        raise UnsupportedSet(f"{recession_polar.describe()} is not a cone")
    G = _G(f)

    def measure(x):
        v = x - G(x)
        d = float(np.linalg.norm(v - recession_polar.project(v)))
        return d > tol, d, {"x_minus_Gx": v}

    return _scan("range_cone", f, spec.draw(f.dim), measure, tol, spec.seed,
                 {"cone": recession_polar.describe()})


# ---------------------------------------------------------------------------
# one-dimensional tests


def _d1(f, t):
    return float(f.subgrad(np.array([t]))[0])


def _require_second(f):
    if f.dim != 1:
        raise ValueError("one-dimensional test needs a function on R")
    if f.second_deriv is None:
        raise MissingSecondDerivative(f"{f.name} has no second derivative")


def check_1d_nonexpansive_criterion(f: FunctionHandle, grid: Sequence[float],
                                    tol: float = 0.0) -> PropertyReport:
    """Sign of ``f'(t)^2 - f(t) f''(t)`` on grid points with ``f(t) > 0``.

    On the real line ``G`` is (firmly) nonexpansive exactly when this is
    nonnegative off ``C``.
    """
    _require_second(f)
    table = []

    def measure(t):
        ft = f.value(np.array([t]))
        if not ft > 0:
            return None
        q = _d1(f, t) ** 2 - ft * f.second_deriv(t)
        table.append((float(t), q))
        return -q > tol, -q, {"t": t, "criterion": q}

    rep = _scan("nonexpansive_criterion_1d", f, [float(t) for t in grid], measure,
                tol, None)
    rep.details["criterion"] = table
    return rep


def projector_derivative_1d(f: FunctionHandle, t: float,
                            h: Optional[float] = None) -> float:
    """Central-difference derivative of ``G`` at ``t``."""
    if h is None:
        h = default_fd_step([t])
    G = _G(f)
    return float((G([t + h])[0] - G([t - h])[0]) / (2.0 * h))


def check_moreau_1d_criterion(f: FunctionHandle, grid: Sequence[float],
                              tol: float = 1e-12, corroborate: bool = True,
                              pairs: int = 500, seed: int = 0) -> PropertyReport:
    """Sufficient condition ``2 f f'' <= (2 + f'') f'^2`` for the envelope.

    When the condition holds on the grid (and ``corroborate``), the Moreau
    envelope is built with a numerical prox and its projector is sampled for
    firm nonexpansiveness over the grid's range; that report is attached as
    ``details["corroboration"]``.
    """
    _require_second(f)
    grid = [float(t) for t in grid]

    def measure(t):
        ft, d1, d2 = f.value(np.array([t])), _d1(f, t), f.second_deriv(t)
        m = 2.0 * ft * d2 - (2.0 + d2) * d1 * d1
        return m > tol, m, {"t": t, "lhs": 2.0 * ft * d2, "rhs": (2.0 + d2) * d1 * d1}

    rep = _scan("moreau_criterion_1d", f, grid, measure, tol, None)
    rep.property_id = "moreau_criterion_1d"
    if rep.passed and corroborate and grid:
        env = moreau_envelope(f, "numeric")
        sub = check_pairwise(env, SampleSpec((min(grid), max(grid)), pairs, seed),
                             "firmly_nonexpansive")
        rep.details["corroboration"] = sub.to_dict()
    return rep


# ---------------------------------------------------------------------------
# continuity and local Jacobian tests


def _probe_offsets(dim: int, count: int, seed: int) -> np.ndarray:
    """Low-discrepancy points of the closed unit ball."""
    sob = qmc.Sobol(d=dim + 1, scramble=True, seed=seed)
    u = sob.random(count)
    z = _normal.ppf(np.clip(u[:, :dim], 1e-12, 1 - 1e-12))
    nz = np.linalg.norm(z, axis=1, keepdims=True)
    nz[nz == 0] = 1.0
    radial = u[:, dim:] ** (1.0 / dim)
    return z / nz * radial


def continuity_probe(f: FunctionHandle, x, radii: Sequence[float],
                     directions: int = 256, seed: int = 0) -> list:
    """Estimate ``sup {||Gy - Gx|| : ||y - x|| <= r}`` for each radius.

    Returns ``[(r, estimate), ...]``. An estimate that does not shrink with
    ``r`` signals a discontinuity of ``G`` at ``x``.
    """
    x = as_vector(x, f.dim)
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(a >= b for a, b in zip(radii[1:], radii)):
        raise ValueError("radii must be positive and decreasing")
    G = _G(f)
    Gx = G(x)
    offsets = _probe_offsets(f.dim, directions, seed)
    out = []
    for r in radii:
        sup = max(float(np.linalg.norm(G(x + r * o) - Gx)) for o in offsets)
        out.append((r, sup))
    return out


def jacobian_spectral_check(f: FunctionHandle, x, mode: str = "firm",
                            h: Optional[float] = None) -> float:
    """Spectral norm of the finite-difference Jacobian of ``2G - Id`` or ``Id - G``.

    ``mode="firm"`` uses ``2G - Id`` (norm <= 1 is the local condition for
    firm nonexpansiveness); ``mode="id_minus_G"`` uses ``Id - G``.
    """
    x = as_vector(x, f.dim)
    if mode not in ("firm", "id_minus_G"):
        raise ValueError("mode must be 'firm' or 'id_minus_G'")
    if h is None:
        h = default_fd_step(x)
    G = _G(f)
    J = np.empty((f.dim, f.dim))
    try:
        for i in range(f.dim):
            e = np.zeros(f.dim)
            e[i] = h
            J[:, i] = (G(x + e) - G(x - e)) / (2.0 * h)
    except (InfeasibilityCertificate, ValueError) as exc:
        raise SingularStencil(f"stencil around {x.tolist()} failed: {exc}") from exc
    if not np.all(np.isfinite(J)):
        raise SingularStencil(f"non-finite Jacobian at {x.tolist()}")
    N = 2.0 * J - np.eye(f.dim) if mode == "firm" else np.eye(f.dim) - J
    return float(np.linalg.norm(N, 2))


def search_jacobian_violation(f: FunctionHandle, spec: SampleSpec, mode: str = "firm",
                              threshold: float = 1e-6) -> PropertyReport:
    """Sample points and flag those with Jacobian norm above ``1 + threshold``."""
    skipped = []

    def measure(x):
        try:
            nrm = jacobian_spectral_check(f, x, mode)
        except SingularStencil:
            skipped.append(x)
            return None
        return nrm - 1.0 > threshold, nrm - 1.0, {"spectral_norm": nrm}

    rep = _scan(f"jacobian_{mode}", f, spec.draw(f.dim), measure, threshold, spec.seed)
    rep.details["skipped"] = len(skipped)
    return rep
