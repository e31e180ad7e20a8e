"""Fixed-point iteration ``x_{k+1} = T x_k`` for ``T = G`` or ``T = Z``.

Iteration stops as soon as ``f(x_k) <= tol_f``. For strictly convex ``f``
the iterates typically never enter ``C`` exactly, so ``tol_f = 0`` may only
terminate through ``max_iter``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO, Union

import numpy as np

from ._fmt import fmt17
from .analysis import PropertyReport, _scan
from .core import FunctionHandle, Vector, as_vector, evaluate_projector
from .errors import BadParameter, MissingOracle

STATUSES = ("converged", "max_iter", "infeasible_flag", "error")

# tolerance on f(x_{k+1}) - f(x_k) before flagging a 1-D run as infeasible
INCREASE_TOL = 1e-12


@dataclass(frozen=True)
class IterationRecord:
    k: int
    x: Vector
    f: float
    step_norm: float = math.nan   # ||x_{k+1} - x_k||; nan on the last record
    dist_c: Optional[float] = None


@dataclass
class IterationTrace:
    records: list = field(default_factory=list)
    status: str = "max_iter"
    operator: str = "G"
    message: str = ""

    @property
    def final_x(self) -> Vector:
        return self.records[-1].x

    @property
    def steps(self) -> int:
        """Number of operator applications performed."""
        return len(self.records) - 1

    def xs(self) -> np.ndarray:
        return np.array([r.x for r in self.records])

    def fejer_gaps(self) -> list:
        """``||x_k - c|| - ||x_{k+1} - c||`` for the monitored ``c``."""
        d = [r.dist_c for r in self.records]
        if any(v is None for v in d):
            raise ValueError("trace was recorded without c_monitor")
        return [a - b for a, b in zip(d, d[1:])]

    def write_csv(self, out: Union[str, TextIO]) -> None:
        """Header ``k, x_0..x_{n-1}, f, step_norm[, dist_c]``; 17 digits."""
        if isinstance(out, str):
            with open(out, "w", newline="") as fh:
                self.write_csv(fh)
            return
        n = self.records[0].x.size
        monitored = self.records[0].dist_c is not None
        w = csv.writer(out, lineterminator="\n")
        header = ["k"] + [f"x_{i}" for i in range(n)] + ["f", "step_norm"]
        w.writerow(header + (["dist_c"] if monitored else []))
        for r in self.records:
            row = [str(r.k)] + [fmt17(v) for v in r.x] + [fmt17(r.f), fmt17(r.step_norm)]
            if monitored:
                row.append(fmt17(r.dist_c))
            w.writerow(row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _operator(f: FunctionHandle, operator: str, yy_params) -> Callable[[Vector], Vector]:
    if operator == "G":
        return lambda x: evaluate_projector(f, x).Gx
    if operator == "Z":
        if yy_params is None:
            raise BadParameter("operator Z needs yy_params")
        from .yy import yy_operator
        return lambda x: yy_operator(f, yy_params, x)
    raise BadParameter(f"unknown operator {operator!r}; use 'G' or 'Z'")


def iterate(f: FunctionHandle, x0, operator: str = "G", yy_params=None,
            max_iter: int = 100_000, tol_f: float = 1e-10,
            c_monitor=None) -> IterationTrace:
    """Run ``x_{k+1} = T x_k`` from ``x0``.

    Parameters
    ----------
    operator : {"G", "Z"}
        Subgradient projector, or the Yamagishi-Yamada operator (needs
        ``yy_params``).
    c_monitor : vector, optional
        A point of ``C``; its distance to each iterate is recorded.

    Returns
    -------
    IterationTrace
        ``status`` is ``converged`` once ``f(x_k) <= tol_f``, ``max_iter``
        after ``max_iter`` steps, ``infeasible_flag`` when a one-dimensional
        step increased ``f`` (the last record is the offending iterate), and
        ``error`` if an iterate stopped being finite.

    Raises
    ------
    InfeasibilityCertificate
        Propagated from the projector when ``f(x) > 0`` and ``s(x) = 0``.
    """
    if int(max_iter) < 1:
        raise BadParameter("max_iter must be >= 1")
    if not tol_f >= 0:
        raise BadParameter("tol_f must be >= 0")
    T = _operator(f, operator, yy_params)
    x = as_vector(x0, f.dim)
    c = None if c_monitor is None else as_vector(c_monitor, f.dim)
    trace = IterationTrace(operator=operator)

    def dist(z):
        return None if c is None else float(np.linalg.norm(z - c))

    fx = float(f.value(x))
    for k in range(int(max_iter) + 1):
        if fx <= tol_f:
            trace.records.append(IterationRecord(k, x, fx, math.nan, dist(x)))
            trace.status = "converged"
            return trace
        if k == max_iter:
            trace.records.append(IterationRecord(k, x, fx, math.nan, dist(x)))
            trace.status = "max_iter"
            return trace
        x_next = np.asarray(T(x), dtype=float)
        trace.records.append(IterationRecord(k, x, fx, float(np.linalg.norm(x_next - x)),
                                             dist(x)))
        if not np.all(np.isfinite(x_next)):
            trace.status = "error"
            trace.message = f"non-finite iterate after step {k}"
            return trace
        f_next = float(f.value(x_next))
        if f.dim == 1 and f_next > fx + INCREASE_TOL:
            trace.records.append(IterationRecord(k + 1, x_next, f_next, math.nan,
                                                 dist(x_next)))
            trace.status = "infeasible_flag"
            trace.message = (f"f increased at step {k}: {fx!r} -> {f_next!r}; "
                             "on the real line this certifies C is empty")
            return trace
        x, fx = x_next, f_next
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class RateAssumptions:
    """Growth assumptions behind the linear rate bounds.

    ``quadratic_growth``: ``f >= alpha d_C^2`` with ``L`` a Lipschitz
    constant of the gradient (factor ``1 - alpha^2/L^2``).
    ``linear_growth``: ``f >= alpha d_C`` (factor ``1 - alpha^2/||s(x)||^2``).
    """

    alpha: float
    L: Optional[float] = None
    mode: str = "quadratic_growth"

    def __post_init__(self):
        if not self.alpha > 0:
            raise BadParameter("alpha must be positive")
        if self.mode not in ("quadratic_growth", "linear_growth"):
            raise BadParameter(f"unknown growth mode {self.mode!r}")
        if self.mode == "quadratic_growth" and not (self.L is not None and self.L > 0):
            raise BadParameter("quadratic_growth needs L > 0")


def check_rate(trace: IterationTrace, f: FunctionHandle, assumptions: RateAssumptions,
               d_C_oracle: Optional[Callable[[Vector], float]] = None,
               tol: float = 1e-9) -> PropertyReport:
    """Verify ``d_C(x_{k+1})^2 <= factor * d_C(x_k)^2`` along a ``G`` trace.

    Steps starting in ``C`` are skipped. Steps where the growth assumption
    itself fails at ``x_k`` are counted in ``details["assumption_failures"]``.
    """
    if d_C_oracle is None:
        if f.project_C is None:
            raise MissingOracle(f"no distance oracle for {f.name}")
        d_C_oracle = f.dist_C
    a = assumptions
    assumption_failures = []

    def measure(pair):
        x, y = pair
        fx = float(f.value(x))
        if not fx > 0:
            return None
        dx, dy = float(d_C_oracle(x)), float(d_C_oracle(y))
        if a.mode == "quadratic_growth":
            factor = 1.0 - a.alpha ** 2 / a.L ** 2
            grows = fx >= a.alpha * dx * dx - tol
        else:
            s = f.grad(x)
            factor = 1.0 - a.alpha ** 2 / float(s @ s)
            grows = fx >= a.alpha * dx - tol
        if not grows:
            assumption_failures.append(x.tolist())
        m = dy * dy - factor * dx * dx
        return m > tol, m, {"d_C_x": dx, "d_C_next": dy, "factor": factor}

    xs = [r.x for r in trace.records]
    rep = _scan(f"rate_{a.mode}", f, list(zip(xs, xs[1:])), measure, tol, None,
                {"alpha": a.alpha, "L": a.L})
    rep.details["assumption_failures"] = len(assumption_failures)
    return rep


def newton_equivalence_check(f: FunctionHandle, grid: Sequence[float],
                             tol: float = 1e-12) -> PropertyReport:
    """On the real line ``G`` is the Newton step ``x - f(x)/f'(x)`` off ``C``."""
    if f.dim != 1:
        raise BadParameter("Newton equivalence is a one-dimensional check")

    def measure(t):
        x = np.array([float(t)])
        fx = float(f.value(x))
        if not fx > 0:
            return None
        G = float(evaluate_projector(f, x).Gx[0])
        N = float(t) - fx / float(f.grad(x)[0])
        return abs(G - N) > tol, abs(G - N), {"G": G, "newton": N}

    return _scan("newton_equivalence", f, [float(t) for t in grid], measure, tol, None)
