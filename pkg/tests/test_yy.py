import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subgradproj import catalog as cat
from subgradproj.analysis import SampleSpec
from subgradproj.core import evaluate_projector
from subgradproj.errors import BadParameter, HypothesisViolated, QuadratureFailure
from subgradproj.yy import (GridSpec, YYParams, adaptive_simpson, check_reconstruction,
                            compute_D, reconstruct_y, theta, validate_params,
                            verify_Z_is_Gy, yy_operator)

P = YYParams(3.0, 1.0)


@pytest.fixture(scope="module")
def f():
    return cat.make_1d("quad_minus_one").handle


@pytest.fixture(scope="module")
def rec(f):
    return reconstruct_y(f, P, GridSpec(extent=5.0, step=0.05))


def test_params_validation():
    for L, rho in ((0, 1), (-1, 1), (1, -0.5), (math.nan, 1)):
        with pytest.raises(BadParameter):
            YYParams(L, rho)


def test_theta_and_operator(f, oracles):
    o = oracles["yy"]
    assert theta(f, P, [2.0]) == pytest.approx(o["theta_2"], abs=1e-15)
    assert yy_operator(f, P, [2.0])[0] == pytest.approx(o["Z_2"], abs=1e-14)
    assert yy_operator(f, P, [2.0])[0] == pytest.approx((4 + 4 * math.sqrt(6)) / 12, abs=1e-14)
    # inside D, Z is the subgradient projector
    assert yy_operator(f, P, [1.1])[0] == pytest.approx(2.21 / 2.2, abs=1e-15)
    assert yy_operator(f, P, [1.1])[0] == evaluate_projector(f, [1.1]).Gx[0]
    assert yy_operator(f, P, [0.5])[0] == 0.5


@given(st.floats(-50, 50).filter(lambda t: abs(t) > 1))
def test_z_steps_no_further_than_needed(t):
    """Z lands between the subgradient step and the feasible interval."""
    f = cat.make_1d("quad_minus_one").handle
    z = float(yy_operator(f, P, [t])[0])
    g = float(evaluate_projector(f, [t]).Gx[0])
    assert abs(z) >= 1 - 1e-12
    assert abs(z) <= abs(g) + 1e-12
    assert math.copysign(1, z) == math.copysign(1, t)


def test_validate_params(f):
    r = validate_params(f, P, SampleSpec((-5, 5), 500, 0))
    assert r.passed
    assert r.details["lipschitz_failures"] == 0
    assert r.details["lower_bound_failures"] == 0
    bad = validate_params(f, YYParams(1.0, 0.1), SampleSpec((-5, 5), 500, 0))
    assert bad.details["lipschitz_failures"] > 0


def test_compute_D(f, oracles):
    D = compute_D(f, P)
    assert D.lo_boundary and D.hi_boundary
    assert D.hi == pytest.approx(oracles["yy"]["D_hi"], abs=1e-11)
    assert D.lo == pytest.approx(-math.sqrt(6) / 2, abs=1e-11)
    assert D.contains(0.0) and not D.contains(2.0)


def test_compute_D_unbounded_side():
    f = cat.make_huber(1).handle        # |f'| <= 1 < sqrt(2 L rho): D is everything
    D = compute_D(f, YYParams(1.0, 1.0), (-20, 20))
    assert not D.lo_boundary and not D.hi_boundary
    rec = reconstruct_y(f, YYParams(1.0, 1.0), GridSpec(extent=3, step=0.5),
                        search_interval=(-20, 20))
    assert rec.pieces == []


def test_hypothesis_violated(f):
    # small rho puts the boundary of D inside C
    with pytest.raises(HypothesisViolated):
        compute_D(f, YYParams(3.0, 0.01))
    with pytest.raises(HypothesisViolated):
        compute_D(f, P, search_interval=(10.0, 20.0))
    with pytest.raises(BadParameter):
        compute_D(f, P, search_interval=(1.0, 1.0))


def test_reconstruction_matches_closed_form(rec, oracles):
    ys = oracles["yy"]["y"]
    for t, v in ys.items():
        assert rec.y(float(t)) == pytest.approx(v, abs=1e-9)
    for t, v in ys.items():
        t = float(t)
        if t > 1.3:
            closed = 72 ** 0.2 / 6 * (5 * t - 2 * math.sqrt(6)) ** 1.2
            assert rec.y(t) == pytest.approx(closed, rel=1e-10)
    q2 = rec.q(2.0)
    for t, v in oracles["yy"]["q_minus_q2"].items():
        assert rec.q(float(t)) - q2 == pytest.approx(v, abs=1e-10)


def test_reconstruction_symmetric(rec):
    for t in (1.5, 2.0, 4.0):
        assert rec.y(-t) == pytest.approx(rec.y(t), rel=1e-10)


def test_y_equals_f_on_D(rec, f):
    for t in np.linspace(rec.D.lo, rec.D.hi, 11):
        assert rec.y(float(t)) == float(f.value([t]))


def test_Z_is_G_y(rec, f):
    grid = np.concatenate([np.linspace(-5, 5, 101), [2.0, 1.1, rec.D.hi + 1e-3]])
    r = verify_Z_is_Gy(rec, grid)
    assert r.passed, r.summary()
    assert r.details["max_deviation"] <= 1e-8


def test_reconstruction_invariants(rec):
    chk = check_reconstruction(rec)
    assert chk["ok"] and chk["convex"]
    assert set(chk["anchors"]) == {"I-", "I+"}
    for a in chk["anchors"].values():
        assert a["value_gap"] <= 1e-12 and a["slope_gap"] <= 1e-9


def test_csv(rec):
    text = rec.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["x", "region", "q", "y", "Zx", "G_y_x"]
    xs = [float(r[0]) for r in rows[1:]]
    assert xs == sorted(xs)
    assert {r[1] for r in rows[1:]} == {"I-", "D", "I+"}
    assert all(r[2] == "" for r in rows[1:] if r[1] == "D")
    assert text == reconstruct_y(rec.f, P, GridSpec(extent=5.0, step=0.05)).to_csv()


def test_explicit_grid_points(f):
    rec = reconstruct_y(f, P, GridSpec(points=(-3.0, 0.0, 2.0, 5.0)))
    xs = [r[0] for r in rec.rows()]
    assert xs == [-3.0, 0.0, 2.0, 5.0]


def test_grid_spec_validation():
    with pytest.raises(BadParameter):
        GridSpec(extent=0.0)


def test_adaptive_simpson():
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)
    assert adaptive_simpson(math.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1), abs=1e-10)
    with pytest.raises(QuadratureFailure):
        adaptive_simpson(lambda t: 1.0 / t if t else math.inf, 0.0, 1.0, max_depth=8)


def test_handle_is_usable(rec):
    h = rec.handle()
    assert h.value([3.0]) == pytest.approx(rec.y(3.0))
    assert evaluate_projector(h, [3.0]).Gx[0] == pytest.approx(rec.Z(3.0), abs=1e-8)
