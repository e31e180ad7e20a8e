import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from subgradproj.errors import BadParameter, DimensionMismatch, UnsupportedSet, ZeroNormal
from subgradproj.sets import ConvexSetSpec as S, dykstra

pts = arrays(np.float64, 2, elements=st.floats(-10, 10, allow_nan=False))

SETS = [
    S.ball([1.0, -1.0], 2.0), S.halfspace([1.0, 2.0], 1.0), S.hyperplane([1.0, -1.0], 0.5),
    S.box([-1.0, 0.0], [1.0, 3.0]), S.affine_subspace([[1.0, 1.0]], [0.0, 2.0]),
    S.singleton([1.0, 2.0]), S.nonneg_orthant(2), S.ray([1.0, 2.0]), S.whole_space(2),
]


@pytest.mark.parametrize("C", SETS, ids=lambda C: C.describe())
@given(x=pts, y=pts)
def test_projection_characterization(C, x, y):
    """P_C is idempotent, lands in C, is firmly nonexpansive and obtuse."""
    p, q = C.project(x), C.project(y)
    np.testing.assert_allclose(C.project(p), p, atol=1e-12)
    assert C.contains(p, 1e-10)
    assert (p - q) @ (x - y) >= (p - q) @ (p - q) - 1e-10
    # <c - Px, x - Px> <= 0 for c = P y in C
    assert (q - p) @ (x - p) <= 1e-9


def test_examples():
    np.testing.assert_allclose(S.ball([0, 0], 1).project([3, 4]), [0.6, 0.8])
    np.testing.assert_allclose(S.halfspace([1, 0], 1).project([3, 2]), [1, 2])
    np.testing.assert_allclose(S.hyperplane([0, 1], 0).project([3, 2]), [3, 0])
    np.testing.assert_allclose(S.box([0, 0], [1, 1]).project([2, -1]), [1, 0])
    np.testing.assert_allclose(S.affine_subspace([[1, 1]], [0, 0]).project([2, 0]), [1, 1])
    np.testing.assert_allclose(S.nonneg_orthant(2).project([2, -3]), [2, 0])
    assert S.ball([0, 0], 1).distance([3, 4]) == pytest.approx(4.0)


def test_validation():
    with pytest.raises(BadParameter):
        S.ball([0, 0], 0)
    with pytest.raises(ZeroNormal):
        S.halfspace([0, 0], 1)
    with pytest.raises(BadParameter):
        S.box([1, 0], [0, 0])
    with pytest.raises(DimensionMismatch):
        S.box([0, 0], [1, 1, 1])
    with pytest.raises(BadParameter):
        S.affine_subspace([[1, 0], [2, 0]], [0, 0])


@pytest.mark.parametrize("C", [S.halfspace([1, 2], 0), S.hyperplane([1, -1], 0),
                               S.affine_subspace([[1, 1]], [0, 0]), S.ray([1, 2]),
                               S.nonneg_orthant(2), S.whole_space(2), S.singleton([0, 0])],
                         ids=lambda C: C.describe())
def test_polar_cone(C):
    assert C.is_cone
    if C.kind == "nonneg_orthant":
        with pytest.raises(UnsupportedSet):
            C.polar()
        return
    K = C.polar()
    rng = np.random.default_rng(0)
    for _ in range(200):
        u = K.project(rng.uniform(-5, 5, 2))
        k = C.project(rng.uniform(-5, 5, 2))
        assert u @ k <= 1e-10
    # Moreau decomposition x = P_C x + P_K x
    x = np.array([1.3, -2.1])
    np.testing.assert_allclose(C.project(x) + K.project(x), x, atol=1e-12)


def test_non_cone_polar_rejected():
    with pytest.raises(UnsupportedSet):
        S.ball([0, 0], 1).polar()


def test_dykstra_intersection():
    C1, C2 = S.ball([0, 0], 1), S.halfspace([1, 0], 0.5)
    p = dykstra([C1.project, C2.project], [2.0, 2.0])
    # exact answer: minimize distance over the lens-shaped intersection
    assert C1.contains(p, 1e-9) and C2.contains(p, 1e-9)
    rng = np.random.default_rng(1)
    for c in rng.uniform(-1, 1, (200, 2)):
        c = C1.project(C2.project(c))
        if C1.contains(c, 0) and C2.contains(c, 0):
            assert (c - p) @ (np.array([2.0, 2.0]) - p) <= 1e-8


def test_describe_roundtrip_text():
    assert S.ball([0, 0], 1).describe() == "ball(0,0;1)"
    assert S.halfspace([1, 0], 1).describe() == "halfspace(1,0;1)"
    assert S.nonneg_orthant(3).describe() == "orthant(3)"
