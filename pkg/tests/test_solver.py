import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subgradproj import catalog as cat
from subgradproj.errors import BadParameter, InfeasibilityCertificate, MissingOracle
from subgradproj.sets import ConvexSetSpec as S
from subgradproj.solver import (IterationTrace, RateAssumptions, check_rate, iterate,
                                newton_equivalence_check)
from subgradproj.yy import YYParams


def wedge():
    return cat.make_max_dist([S.halfspace([0.2, 1.0], 0.0), S.halfspace([0.2, -1.0], 0.0)])


def test_wedge_converges_fejer():
    f = wedge().handle
    c = np.array([-1.0, 0.0])
    tr = iterate(f, [5.0, 4.0], tol_f=1e-10, c_monitor=c)
    assert tr.status == "converged"
    assert f.value(tr.final_x) <= 1e-10
    assert min(tr.fejer_gaps()) >= -1e-12
    assert tr.steps == len(tr.records) - 1


def test_one_step_for_distance():
    f = cat.make_dist_power(S.ball([0, 0], 1), 1).handle
    tr = iterate(f, [3.0, 4.0], tol_f=0.0)
    assert tr.status == "converged" and tr.steps == 1
    assert np.allclose(tr.final_x, [0.6, 0.8], atol=1e-15)


def test_max_iter_and_start_in_C():
    f = cat.make_sq_norm(2).handle
    tr = iterate(f, [1.0, 1.0], max_iter=5, tol_f=0.0)
    assert tr.status == "max_iter" and tr.steps == 5
    # G x = x/2 for ||x||^2
    assert np.allclose(tr.final_x, [1 / 32, 1 / 32], rtol=0, atol=1e-15)
    tr = iterate(f, [0.0, 0.0])
    assert tr.status == "converged" and tr.steps == 0


def test_infeasible_flag_and_certificate():
    f = cat.make_1d("infeasible").handle   # t^2 + 1
    tr = iterate(f, [0.3])
    assert tr.status == "infeasible_flag"
    assert tr.records[-1].f > tr.records[-2].f
    with pytest.raises(InfeasibilityCertificate):
        iterate(f, [0.0])


def test_bad_arguments():
    f = cat.make_sq_norm(2).handle
    with pytest.raises(BadParameter):
        iterate(f, [1, 1], max_iter=0)
    with pytest.raises(BadParameter):
        iterate(f, [1, 1], tol_f=-1)
    with pytest.raises(BadParameter):
        iterate(f, [1, 1], operator="Q")
    with pytest.raises(BadParameter):
        iterate(f, [1, 1], operator="Z")


def test_z_iteration_quadratic():
    f = cat.make_1d("quad_minus_one").handle
    tr = iterate(f, [2.0], operator="Z", yy_params=YYParams(3.0, 1.0), tol_f=1e-12)
    assert tr.status == "converged"
    assert abs(tr.final_x[0]) <= 1.0 + 1e-12


def test_csv_layout_and_determinism(tmp_path):
    f = wedge().handle
    tr = iterate(f, [5.0, 4.0], c_monitor=[-1.0, 0.0], max_iter=20)
    text = tr.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["k", "x_0", "x_1", "f", "step_norm", "dist_c"]
    assert len(rows) == len(tr.records) + 1
    assert float(rows[1][1]) == 5.0
    assert rows[-1][4] == ""    # no step after the last record
    p = tmp_path / "t.csv"
    tr.write_csv(str(p))
    assert p.read_text() == text
    assert iterate(f, [5.0, 4.0], c_monitor=[-1.0, 0.0], max_iter=20).to_csv() == text
    # 17 significant digits round-trip
    assert np.array_equal(np.array([[float(v) for v in r[1:3]] for r in rows[1:]]), tr.xs())


@given(st.floats(0.5, 10), st.floats(-10, 10))
def test_fejer_property_ball(a, b):
    f = cat.make_dist_power(S.ball([0, 0], 1), 2).handle
    tr = iterate(f, [a, b], c_monitor=[0.3, -0.2], max_iter=50, tol_f=0.0)
    assert min(tr.fejer_gaps(), default=0.0) >= -1e-12


def test_rate_quadratic_growth():
    f = cat.make_dist_power(S.ball([0, 0], 1), 2).handle
    tr = iterate(f, [4.0, -3.0], max_iter=40, tol_f=0.0)
    r = check_rate(tr, f, RateAssumptions(alpha=1.0, L=2.0))
    assert r.passed and r.details["assumption_failures"] == 0
    assert r.samples_run == tr.steps


def test_rate_linear_growth():
    f = cat.make_dist_power(S.halfspace([1.0, 0.0], 1.0), 1).handle
    tr = iterate(f, [4.0, 2.0], tol_f=0.0)
    assert check_rate(tr, f, RateAssumptions(1.0, mode="linear_growth")).passed


def test_rate_detects_false_assumption():
    # claiming a growth constant larger than the truth makes the bound too tight
    f = cat.make_dist_power(S.ball([0, 0], 1), 2).handle
    tr = iterate(f, [4.0, -3.0], max_iter=10, tol_f=0.0)
    r = check_rate(tr, f, RateAssumptions(alpha=1.9, L=2.0))
    assert not r.passed
    assert r.details["assumption_failures"] > 0


def test_rate_errors():
    with pytest.raises(BadParameter):
        RateAssumptions(alpha=0.0, L=1.0)
    with pytest.raises(BadParameter):
        RateAssumptions(alpha=1.0)
    with pytest.raises(BadParameter):
        RateAssumptions(alpha=1.0, mode="cubic")
    f = cat.make_pnorm_power(4).handle
    tr = iterate(f, [1.0, 1.0], max_iter=3, tol_f=0.0)
    if f.project_C is None:
        with pytest.raises(MissingOracle):
            check_rate(tr, f, RateAssumptions(1.0, 2.0))
    r = check_rate(tr, f, RateAssumptions(1.0, 2.0), d_C_oracle=lambda x: float(np.linalg.norm(x)))
    assert r.samples_run == 3


@pytest.mark.parametrize("kind", ["quad", "even_power", "exp_abs", "exp_sq", "quad_minus_one"])
def test_newton_equivalence(kind):
    f = cat.make_1d(kind).handle
    assert newton_equivalence_check(f, np.linspace(-4, 4, 201)).passed


def test_newton_equivalence_requires_1d():
    with pytest.raises(BadParameter):
        newton_equivalence_check(cat.make_sq_norm(2).handle, [1.0])


def test_empty_trace_helpers():
    tr = IterationTrace()
    assert tr.fejer_gaps() == []
