import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tpzmc.lorentz import (
    ETA,
    CausalClass,
    causal_classify,
    lorentz_normal,
    line_rotation,
    minkowski_inner,
    plane_causal_class,
    plane_reflection,
    preserves_minkowski,
)

finite = st.floats(-10, 10, allow_nan=False)
vec = st.tuples(finite, finite, finite).map(np.array)


def test_inner_products():
    assert minkowski_inner([1, 0, 0], [1, 0, 0]) == -1
    assert minkowski_inner([0, 1, 0], [0, 1, 0]) == 1
    u = np.random.default_rng(0).normal(size=(5, 3))
    assert np.allclose(minkowski_inner(u, u), np.einsum("ij,jk,ik->i", u, ETA, u))


def test_causal_classify():
    assert causal_classify([0, 1, 0]) is CausalClass.SPACELIKE
    assert causal_classify([1, 0, 0]) is CausalClass.TIMELIKE
    assert causal_classify([1, 1, 0]) is CausalClass.LIGHTLIKE
    with pytest.raises(ValueError):
        causal_classify([1, 0, 0], tol=-1)
    assert [c.code for c in CausalClass] == [0, 1, 2]


def test_plane_classes():
    assert plane_causal_class([0, 1, 0], [0, 0, 1]) is CausalClass.SPACELIKE
    assert plane_causal_class([1, 0, 0], [0, 1, 0]) is CausalClass.TIMELIKE
    assert plane_causal_class([1, 1, 0], [0, 0, 1]) is CausalClass.LIGHTLIKE
    with pytest.raises(ValueError):
        plane_causal_class([1, 0, 0], [2, 0, 0])


@given(vec, vec)
def test_normal_is_orthogonal(u, v):
    n = lorentz_normal(u, v)
    scale = 1 + np.linalg.norm(u) ** 2 * np.linalg.norm(v)
    assert abs(minkowski_inner(n, u)) <= 1e-9 * scale
    assert abs(minkowski_inner(n, v)) <= 1e-9 * scale


@settings(max_examples=50)
@given(vec)
def test_reflection_and_rotation_are_isometries(d):
    q = minkowski_inner(d, d)
    if abs(q) < 1e-3 * (1 + d @ d):
        return
    for m in (plane_reflection(d), line_rotation(d)):
        assert preserves_minkowski(m, tol=1e-8)
        assert np.allclose(m @ m, np.eye(3), atol=1e-8)
    assert np.allclose(line_rotation(d) @ d, d)
    assert np.allclose(plane_reflection(d) @ d, -d)


def test_euclidean_variants():
    d = np.array([1.0, 2.0, 2.0])
    r = line_rotation(d, "euclid")
    assert np.allclose(r.T @ r, np.eye(3))
    assert np.allclose(plane_reflection(d, "euclid") @ d, -d)
