"""The Yamagishi-Yamada operator and the one-dimensional reconstruction.

For a differentiable convex ``f`` with ``L``-Lipschitz gradient and
``inf f >= -rho``::

    theta(x) = ||grad f(x)||^2 / (2L) - rho

    Z x = x                                                 if f(x) <= 0
        = x - f / ||grad f||^2 * grad f                     if f > 0, theta <= 0
        = x - (f + (sqrt(theta + rho) - sqrt(rho))^2)
              / ||grad f||^2 * grad f                       otherwise

On the real line, with ``D = {theta <= 0}`` and ``bdry D`` outside ``C``,
``Z`` is itself a subgradient projector ``G_y``: on each component ``I`` of
``R \\ D`` with anchor ``d`` (its endpoint on ``bdry D``) take
``q' = 1 / (x - Zx)`` with ``q(d) = 0`` and ``y = f(d) exp(q)``; on ``D``
take ``y = f``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO, Union

import numpy as np

from ._fmt import fmt17
from .analysis import PropertyReport, SampleSpec, _scan
from .core import FunctionHandle, as_vector, evaluate_projector
from .errors import (BadParameter, HypothesisViolated, InfeasibilityCertificate,
                     QuadratureFailure)

D_BISECT_TOL = 1e-12
SIMPSON_TOL = 1e-10


@dataclass(frozen=True)
class YYParams:
    """``L`` bounds the Lipschitz constant of the gradient, ``rho >= -inf f``."""

    L: float
    rho: float

    def __post_init__(self):
        if not self.L > 0:
            raise BadParameter("L must be positive")
        if not self.rho >= 0:
            raise BadParameter("rho must be nonnegative")


def theta(f: FunctionHandle, params: YYParams, x) -> float:
    g = f.grad(x)
    return float(g @ g) / (2.0 * params.L) - params.rho


def yy_operator(f: FunctionHandle, params: YYParams, x) -> np.ndarray:
    x = as_vector(x, f.dim)
    fx = float(f.value(x))
    if not fx > 0:
        return x.copy()
    g = f.grad(x)
    gg = float(g @ g)
    if gg == 0.0:
        raise InfeasibilityCertificate(x, fx)
    th = gg / (2.0 * params.L) - params.rho
    if th <= 0:
        return x - (fx / gg) * g
    extra = (math.sqrt(th + params.rho) - math.sqrt(params.rho)) ** 2
    return x - ((fx + extra) / gg) * g


def validate_params(f: FunctionHandle, params: YYParams,
                    spec: SampleSpec = SampleSpec((-5.0, 5.0), 1000, 0),
                    tol: float = 1e-10) -> PropertyReport:
    """Sampled evidence that ``params`` are admissible for ``f``.

    The report's violations count samples where ``f < theta``; gradient
    Lipschitz and lower-bound failures are tallied in ``details``.
    """
    pts = spec.draw(f.dim)
    lip = low = 0
    for a, b in zip(pts, pts[::-1]):
        d = float(np.linalg.norm(a - b))
        if float(np.linalg.norm(f.grad(a) - f.grad(b))) > params.L * d + tol:
            lip += 1
        if f.value(a) < -params.rho - tol:
            low += 1

    def measure(x):
        fx, th = float(f.value(x)), theta(f, params, x)
        return th - fx > tol, th - fx, {"f": fx, "theta": th}

    rep = _scan("f_ge_theta", f, pts, measure, tol, spec.seed)
    rep.details.update(lipschitz_failures=lip, lower_bound_failures=low)
    return rep


# ---------------------------------------------------------------------------
# the set D


@dataclass(frozen=True)
class DInterval:
    """``D`` clipped to the search interval.

    ``lo_boundary``/``hi_boundary`` tell whether an endpoint is a genuine
    boundary point of ``D`` rather than the end of the search interval.
    """

    lo: float
    hi: float
    lo_boundary: bool
    hi_boundary: bool

    def contains(self, t: float) -> bool:
        return self.lo <= t <= self.hi


def _d1(f, t):
    return float(f.grad(np.array([t]))[0])


def _bisect(pred: Callable[[float], bool], a: float, b: float, tol: float) -> float:
    """Boundary of a monotone predicate with ``pred(a)`` false and ``pred(b)`` true."""
    while abs(b - a) > tol:
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        if pred(m):
            b = m
        else:
            a = m
    return 0.5 * (a + b)


def compute_D(f: FunctionHandle, params: YYParams,
              search_interval: tuple = (-1e3, 1e3)) -> DInterval:
    """Locate ``D = {theta <= 0}`` by bisection on the monotone derivative.

    Raises
    ------
    HypothesisViolated
        If ``D`` misses the search interval or a boundary point of ``D``
        lies in ``C``.
    """
    if f.dim != 1:
        raise BadParameter("compute_D is one-dimensional")
    a, b = map(float, search_interval)
    if not a < b:
        raise BadParameter("search interval must have lo < hi")
    r = math.sqrt(2.0 * params.L * params.rho)
    # theta <= 0  <=>  -r <= f' <= r, and f' is nondecreasing
    if _d1(f, a) > r or _d1(f, b) < -r:
        raise HypothesisViolated("D does not meet the search interval")
    lo_bd = _d1(f, a) < -r
    hi_bd = _d1(f, b) > r
    lo = _bisect(lambda t: _d1(f, t) >= -r, a, b, D_BISECT_TOL) if lo_bd else a
    hi = _bisect(lambda t: _d1(f, t) > r, a, b, D_BISECT_TOL) if hi_bd else b
    if lo > hi:
        raise HypothesisViolated("D is empty")
    for d, real in ((lo, lo_bd), (hi, hi_bd)):
        if real and not f.value(np.array([d])) > 0:
            raise HypothesisViolated(
                f"boundary point {d!r} of D lies in C (f = {f.value(np.array([d]))!r})")
    return DInterval(lo, hi, lo_bd, hi_bd)


# ---------------------------------------------------------------------------
# quadrature


def adaptive_simpson(g: Callable[[float], float], a: float, b: float,
                     tol: float = SIMPSON_TOL, max_depth: int = 50) -> float:
    """Integral of ``g`` over ``[a, b]`` to absolute tolerance ``tol``."""
    if a == b:
        return 0.0

    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = g(lm), g(rm)
        if not (math.isfinite(flm) and math.isfinite(frm)):
            raise QuadratureFailure(f"integrand not finite near {m!r}")
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise QuadratureFailure(
                f"adaptive Simpson did not reach {tol:g} on [{a!r}, {b!r}]")
        return (rec(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + rec(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))

    fa, fm, fb = g(a), g(0.5 * (a + b)), g(b)
    if not all(math.isfinite(v) for v in (fa, fm, fb)):
        raise QuadratureFailure(f"integrand not finite on [{a!r}, {b!r}]")
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _gauss(g, a: float, b: float) -> float:
    """Fixed 10-point Gauss-Legendre rule; for short, smooth spans."""
    half, mid = 0.5 * (b - a), 0.5 * (a + b)
    return half * float(sum(w * g(mid + half * t) for t, w in zip(_GL_NODES, _GL_WEIGHTS)))


# ---------------------------------------------------------------------------
# reconstruction


@dataclass(frozen=True)
class GridSpec:
    """Outward extent and step of the reconstruction grid, or explicit points."""

    extent: float = 10.0
    step: float = 1e-2
    points: Optional[tuple] = None

    def __post_init__(self):
        if self.points is None and not (self.extent > 0 and self.step > 0):
            raise BadParameter("grid extent and step must be positive")


@dataclass
class Piece:
    region: str          # "I-" or "I+"
    anchor: float
    xs: np.ndarray
    qs: np.ndarray
    ys: np.ndarray


@dataclass
class ReconstructedY:
    f: FunctionHandle
    params: YYParams
    D: DInterval
    pieces: list = field(default_factory=list)
    d_grid: np.ndarray = field(default_factory=lambda: np.empty(0))

    # -- pointwise evaluators ----------------------------------------------

    def region(self, t: float) -> str:
        if t < self.D.lo:
            return "I-"
        if t > self.D.hi:
            return "I+"
        return "D"

    def anchor(self, region: str) -> float:
        return self.D.lo if region == "I-" else self.D.hi

    def q_prime(self, t: float) -> float:
        return 1.0 / (t - float(yy_operator(self.f, self.params, [t])[0]))

    def q(self, t: float) -> float:
        """Antiderivative of ``q'`` with ``q(d) = 0``; nan on ``D``."""
        reg = self.region(t)
        if reg == "D":
            return math.nan
        piece = next((p for p in self.pieces if p.region == reg), None)
        d = self.anchor(reg)
        if piece is not None and len(piece.xs):
            # start from the last tabulated point between d and t
            k = int(np.searchsorted(np.abs(piece.xs - d), abs(t - d), side="right")) - 1
            if k >= 0:
                return float(piece.qs[k]) + adaptive_simpson(self.q_prime, piece.xs[k], t)
        return adaptive_simpson(self.q_prime, d, t)

    def y(self, t: float) -> float:
        reg = self.region(t)
        if reg == "D":
            return float(self.f.value(np.array([t])))
        d = self.anchor(reg)
        return float(self.f.value(np.array([d]))) * math.exp(self.q(t))

    def y_prime(self, t: float) -> float:
        reg = self.region(t)
        if reg == "D":
            return float(self.f.grad([t])[0])
        return self.y(t) * self.q_prime(t)

    def Z(self, t: float) -> float:
        return float(yy_operator(self.f, self.params, [t])[0])

    def y_prime_fd(self, t: float, h: float = 1e-3) -> float:
        """Five-point derivative of ``y`` built from short local integrals."""
        reg = self.region(t)
        if reg == "D":
            return float(self.f.grad([t])[0])
        y0 = self.y(t)
        vals = {}
        for j in (-2, -1, 1, 2):
            s = t + j * h
            vals[j] = y0 * math.exp(_gauss(self.q_prime, t, s))
        return (vals[-2] - 8.0 * vals[-1] + 8.0 * vals[1] - vals[2]) / (12.0 * h)

    def G_y(self, t: float, h: float = 1e-3) -> float:
        """Subgradient projector of ``y`` with ``y'`` from finite differences."""
        yt = self.y(t)
        if not yt > 0:
            return t
        return t - yt / self.y_prime_fd(t, h)

    def handle(self) -> FunctionHandle:
        """``y`` as a function handle (derivative ``y q'`` off ``D``)."""
        return FunctionHandle(
            name=f"yy_reconstruction[{self.f.name}]", dim=1,
            value=lambda x: self.y(float(x[0])),
            subgrad=lambda x: np.array([self.y_prime(float(x[0]))]),
        )

    # -- tables ------------------------------------------------------------

    def rows(self) -> list:
        """``(x, region, q, y, Zx, G_y_x)`` sorted by ``x``."""
        out = []
        for t in self.d_grid:
            t = float(t)
            out.append((t, "D", math.nan, self.y(t), self.Z(t), self.G_y(t)))
        for p in self.pieces:
            for t, qv, yv in zip(p.xs, p.qs, p.ys):
                t = float(t)
                out.append((t, p.region, float(qv), float(yv), self.Z(t), self.G_y(t)))
        out.sort(key=lambda r: r[0])
        return out

    def write_csv(self, out: Union[str, TextIO]) -> None:
        if isinstance(out, str):
            with open(out, "w", newline="") as fh:
                self.write_csv(fh)
            return
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["x", "region", "q", "y", "Zx", "G_y_x"])
        for x, reg, qv, yv, zv, gv in self.rows():
            w.writerow([fmt17(x), reg, fmt17(qv), fmt17(yv), fmt17(zv), fmt17(gv)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _integrate_from_anchor(qp, d: float, xs: np.ndarray) -> np.ndarray:
    """Cumulative integrals of ``qp`` from ``d`` to each of ``xs``.

    ``xs`` must be ordered moving away from ``d``.
    """
    qs = np.empty(len(xs))
    acc, prev = 0.0, d
    for i, t in enumerate(xs):
        acc += adaptive_simpson(qp, prev, float(t))
        qs[i] = acc
        prev = float(t)
    return qs


def reconstruct_y(f: FunctionHandle, params: YYParams,
                  grid_spec: GridSpec = GridSpec(),
                  search_interval: tuple = (-1e3, 1e3),
                  D: Optional[DInterval] = None) -> ReconstructedY:
    """Build the convex ``y`` with ``G_y = Z`` on a grid.

    Each unbounded component of ``R \\ D`` is tabulated from its anchor
    outward; ``D`` itself is tabulated with ``y = f``.

    Raises
    ------
    HypothesisViolated
        From :func:`compute_D`.
    QuadratureFailure
        If an integral cannot be resolved to tolerance.
    """
    if D is None:
        D = compute_D(f, params, search_interval)
    rec = ReconstructedY(f, params, D)
    g = grid_spec
    if g.points is not None:
        pts = np.sort(np.asarray(g.points, dtype=float))
        left = pts[pts < D.lo][::-1]
        right = pts[pts > D.hi]
        rec.d_grid = pts[(pts >= D.lo) & (pts <= D.hi)]
    else:
        n = int(round(g.extent / g.step))
        steps = g.step * np.arange(n + 1)
        left = D.lo - steps if D.lo_boundary else np.empty(0)
        right = D.hi + steps if D.hi_boundary else np.empty(0)
        if D.lo_boundary and D.hi_boundary:
            m = max(1, int(math.ceil((D.hi - D.lo) / g.step)))
            rec.d_grid = np.linspace(D.lo, D.hi, m + 1)
        else:
            centre = D.lo if D.lo_boundary else (D.hi if D.hi_boundary else 0.0)
            lo, hi = max(D.lo, centre - g.extent), min(D.hi, centre + g.extent)
            m = max(1, int(math.ceil((hi - lo) / g.step)))
            rec.d_grid = np.linspace(lo, hi, m + 1)
    for region, xs, ok in (("I-", left, D.lo_boundary), ("I+", right, D.hi_boundary)):
        if not ok or not len(xs):
            continue
        d = rec.anchor(region)
        fd = float(f.value(np.array([d])))
        qs = _integrate_from_anchor(rec.q_prime, d, xs)
        rec.pieces.append(Piece(region, d, np.asarray(xs, dtype=float), qs,
                                fd * np.exp(qs)))
    return rec


def verify_Z_is_Gy(rec: ReconstructedY, grid: Sequence[float],
                   tol: float = 1e-8) -> PropertyReport:
    """``|G_y x - Z x| <= tol`` on the grid.

    Off ``D``, ``G_y`` uses a finite-difference derivative of the
    reconstructed ``y``; on ``D``, ``y = f`` so ``G_y = G_f``.
    """
    f, params = rec.f, rec.params

    def measure(t):
        z = rec.Z(t)
        if rec.region(t) == "D":
            gy = float(evaluate_projector(f, [t]).Gx[0])
        else:
            gy = rec.G_y(t)
        dev = abs(gy - z)
        return dev > tol, dev, {"x": t, "G_y": gy, "Z": z, "region": rec.region(t)}

    devs = []

    def tracked(t):
        out = measure(t)
        devs.append(out[1])
        return out

    rep = _scan("Z_equals_G_y", f, [float(t) for t in grid], tracked, tol, None)
    rep.details["max_deviation"] = max(devs) if devs else 0.0
    return rep


def check_reconstruction(rec: ReconstructedY, tol_convex: float = 1e-8,
                         tol_anchor: float = 1e-6) -> dict:
    """Convexity of the table and value/slope agreement at each anchor."""
    rows = [(x, y) for x, _, _, y, _, _ in rec.rows()]
    xs = np.array([r[0] for r in rows])
    ys = np.array([r[1] for r in rows])
    keep = np.concatenate([[True], np.diff(xs) > 0])
    xs, ys = xs[keep], ys[keep]
    slopes = np.diff(ys) / np.diff(xs)
    worst_convex = float(np.min(np.diff(slopes))) if len(slopes) > 1 else 0.0
    anchors = {}
    for p in rec.pieces:
        d = p.anchor
        fd = float(rec.f.value(np.array([d])))
        df = float(rec.f.grad([d])[0])
        slope = fd * rec.q_prime(d)
        anchors[p.region] = {"anchor": d, "value_gap": abs(float(rec.y(d)) - fd),
                             "slope_gap": abs(slope - df)}
    ok = worst_convex >= -tol_convex and all(
        a["value_gap"] <= tol_anchor and a["slope_gap"] <= tol_anchor
        for a in anchors.values())
    return {"convex": worst_convex >= -tol_convex, "min_slope_increment": worst_convex,
            "anchors": anchors, "ok": ok}
