"""Acceptance suite.

Each criterion is a function returning ``(ok, detail)``. Under pytest every
criterion is its own test and prints one ``PASS``/``FAIL`` line; run the
file directly (``python3 tests/test_acceptance.py``) for the same lines
without pytest.
"""

import contextlib
import io
import json
import math
import sys
import time

import numpy as np
import pytest

from subgradproj import analysis as an, catalog as cat, cli
from subgradproj.core import evaluate_projector, projector
from subgradproj.sets import ConvexSetSpec as S
from subgradproj.solver import iterate
from subgradproj.yy import GridSpec, YYParams, compute_D, reconstruct_y, theta, verify_Z_is_Gy

N = 10_000


def _G(f, x):
    return evaluate_projector(f, x).Gx


def _pts(box, n=N, dim=2, seed=0):
    return an.SampleSpec(box, n, seed).draw(dim)


def crit_01_huber():
    f = cat.make_huber(2).handle
    ball = S.ball([0, 0], 1)
    err = max(float(np.linalg.norm(_G(f, x) - 0.5 * ball.project(x)))
              for x in _pts((-3, 3)))
    return err <= 1e-12, f"max error {err:.3g}"


def crit_02_distance_powers():
    worst = 0.0
    for C in (S.ball([0, 0], 1), S.halfspace([1, 0], 1)):
        for p in (1, 2, 3):
            f = cat.make_dist_power(C, p).handle
            for x in _pts((-3, 3), seed=p):
                ref = (1 - 1 / p) * x + C.project(x) / p
                worst = max(worst, float(np.linalg.norm(_G(f, x) - ref)))
    return worst <= 1e-12, f"max error {worst:.3g} over 6 x {N} samples"


def crit_03_witnesses():
    errs = []
    f = cat.make_ell1().handle
    x, y = np.array([-1.0, 3.0]), np.array([1.0, 3.0])
    Gx, Gy = _G(f, x), _G(f, y)
    errs += [np.abs(Gx - [1, 1]).max(), np.abs(Gy - [-1, 1]).max(),
             abs((x - y) @ (Gx - Gy) + 4)]
    m = cat.axis_diagonal_max_dist().handle
    Gm = _G(m, [2.0, 1.0])
    errs += [np.abs(Gm - [2, 0]).max(), abs(m.value(Gm) - math.sqrt(2)),
             abs(m.value([2.0, 1.0]) - 1)]
    ok_order = m.value(Gm) > m.value([2.0, 1.0])
    g = cat.make_1d("infeasible").handle
    Gi = _G(g, [0.5])
    errs += [abs(Gi[0] + 0.75), abs(g.value(Gi) - 25 / 16), abs(g.value([0.5]) - 5 / 4)]
    worst = float(max(errs))
    ok = worst <= 1e-12 and ok_order and g.value(Gi) > g.value([0.5])
    return ok, f"max deviation {worst:.3g}"


FACT_REQUIRED = ("i_identity", "iii_G_is_P_H", "iv_obtuse", "v_fejer",
                 "vii_sharpened_fejer", "viii_selection_recovery")


def crit_04_fact_suite():
    bad = []
    entries = cat.all_default_entries()
    for e in entries:
        cs = e.c_samples(np.random.default_rng(0), 5)
        r = an.check_fact_identities(e.handle, an.SampleSpec(e.sample_box, N, 0), cs, 1e-10)
        counts = r.details["item_violations"]
        if any(counts[k] for k in FACT_REQUIRED):
            bad.append(e.name)
    return not bad, f"{len(entries)} entries, failing: {bad or 'none'}"


def crit_05_pnorm_bounds():
    worst = -math.inf
    for p in (2, 3, 4, 1.25, 1.5, 1.75):
        f = cat.make_pnorm_power(p).handle
        low = (1 - 2 / p) ** p if p >= 2 else 0.5 * (1 - 1 / p) ** p
        for x in _pts((-5, 5), seed=int(p * 100)):
            fx, fg = f.value(x), f.value(_G(f, x))
            worst = max(worst, fg - fx, low * fx - fg)
    return worst <= 1e-10, f"worst margin {worst:.3g}"


def crit_06_pnorm_nonmonotone():
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(["check", "--function", "pnorm:p=1.5", "--property", "monotone",
                         "--samples", "100", "--seed", "0"])
    w = json.loads(out.getvalue())["report"]["first_witness"]
    ok = code == 1 and w is not None and w["values"]["inner_product"] < 0
    return ok, f"exit {code}, witness {w and w['points']} inner {w and w['values']['inner_product']:.6g}"


def crit_07_one_d_criterion():
    r1 = an.check_1d_nonexpansive_criterion(cat.make_1d("exp_sq").handle, [1.3])
    q13 = r1.details["criterion"][0][1]
    r2 = an.check_1d_nonexpansive_criterion(cat.make_1d("even_power", alpha=1.0, n=4).handle,
                                            np.linspace(1.01, 5, 400))
    e = cat.make_1d("exp_abs").handle
    dev = max(abs(an.projector_derivative_1d(e, t) - (1 - math.exp(-t)))
              for t in np.linspace(0.1, 5, 200))
    ok = (not r1.passed) and q13 < 0 and r2.passed and dev <= 1e-6
    return ok, f"q(1.3) = {q13:.6g}, quartic violations {r2.violations}, |G' - ref| {dev:.3g}"


def crit_08_firm_sampling():
    pairs = an.SampleSpec((-5, 5), 100_000, 0)
    v = {}
    for e in (cat.make_huber(2), cat.make_sq_norm(2)):
        v[e.name] = an.check_pairwise(e.handle, pairs, "firmly_nonexpansive").violations
    r = an.search_jacobian_violation(cat.make_pnorm_power(8).handle,
                                     an.SampleSpec((-2, 2), 2000, 0), "firm", 1e-6)
    found = not r.passed
    norm = r.first_witness["values"]["spectral_norm"] if found else None
    ok = all(c == 0 for c in v.values()) and found
    return ok, f"pair violations {v}, pnorm8 witness norm {norm}"


def crit_09_yy_example():
    f = cat.make_1d("quad_minus_one").handle
    P = YYParams(3.0, 1.0)
    D = compute_D(f, P)
    r6 = math.sqrt(6) / 2
    d_err = max(abs(D.lo + r6), abs(D.hi - r6))
    grid = np.round(np.arange(-5, 5.0001, 0.05), 10)
    rec = reconstruct_y(f, P, GridSpec(points=tuple(grid)))
    right = np.linspace(1.3, 5, 75)
    qref = lambda t: 1.2 * math.log(5 * t / 6 - math.sqrt(6) / 3)
    q_err = max(abs((rec.q(t) - rec.q(2.0)) - (qref(t) - qref(2.0))) for t in right)
    yref = lambda t: 72 ** 0.2 / 6 * (5 * t - 2 * math.sqrt(6)) ** 1.2
    y_err = max(abs(rec.y(t) - yref(t)) for t in right)
    vz = verify_Z_is_Gy(rec, grid, 1e-8).details["max_deviation"]
    inside = [t for t in grid if theta(f, P, [t]) <= 0]
    zg = max(abs(rec.Z(t) - _G(f, [t])[0]) for t in inside)
    ok = d_err <= 1e-10 and q_err <= 1e-6 and y_err <= 1e-6 and vz <= 1e-8 and zg == 0
    return ok, (f"D err {d_err:.3g}, q err {q_err:.3g}, y err {y_err:.3g}, "
                f"max|G_y - Z| {vz:.3g}, Z = G on {len(inside)} points")


def crit_10_solver():
    f = cat.make_max_dist([S.halfspace([0.2, 1], 0), S.halfspace([0.2, -1], 0)]).handle
    tr = iterate(f, [5.0, 4.0], max_iter=100_000, tol_f=1e-10, c_monitor=[-1.0, 0.0])
    fejer = min(tr.fejer_gaps())
    d = cat.make_dist_power(S.ball([0, 0], 1), 1).handle
    one = iterate(d, [3.0, 4.0], tol_f=0.0)
    ok = (tr.status == "converged" and fejer >= 0 and one.status == "converged"
          and one.steps == 1)
    return ok, f"{tr.steps} steps, min Fejer gap {fejer:.3g}; d_C steps {one.steps}"


def crit_11_continuity():
    f = cat.make_1d("kink_max").handle
    radii = [10.0 ** -k for k in range(1, 7)]
    at1 = an.continuity_probe(f, [1.0], radii)
    at0 = an.continuity_probe(f, [0.0], radii)
    ok = all(v > 0.2 for _, v in at1) and at0[-1][1] < 1e-3
    return ok, f"t=1 min {min(v for _, v in at1):.3g}; t=0 at 1e-6 {at0[-1][1]:.3g}"


def crit_12_calculus():
    from test_calculus import _rules
    worst, names = 0.0, []
    rng = np.random.default_rng(2024)
    for name, g, transformed, dim in _rules():
        Gg = projector(g)
        for x in rng.uniform(-5, 5, (1000, dim)):
            worst = max(worst, float(np.abs(Gg(x) - transformed(x)).max()))
        names.append(name.split("_")[0])
    return worst <= 1e-10 and len(names) == 8, f"rules {','.join(names)}, max {worst:.3g}"


CRITERIA = [v for k, v in sorted(globals().items()) if k.startswith("crit_")]


def _line(fn):
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # report, do not hide
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    num = fn.__name__.split("_")[1]
    tag = "PASS" if ok else "FAIL"
    return ok, f"{tag} criterion {int(num)} ({fn.__name__[8:]}): {detail} [{time.perf_counter() - t:.1f}s]"


@pytest.mark.parametrize("fn", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(fn, capsys):
    ok, line = _line(fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_line(fn) for fn in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
