import json

import numpy as np
import pytest
from hypothesis import given

from conftest import vec2, vec3, velocities
from planarspin.errors import SuperluminalVelocity
from planarspin.minkowski import (
    DEFAULT,
    Convention,
    bivector_inner,
    cross3,
    hodge_star_spatial,
    inverse_hodge_star_spatial,
    lorentz_factor,
    lower,
    metric_dot,
    raise_index,
    star_twice_sign,
    wedge_scalar,
)


def test_metric_dot_examples():
    assert metric_dot([1, 0, 0], [1, 0, 0]) == 1
    assert metric_dot([0, 1], [0, 1]) == -1
    assert 1 + metric_dot([0.6, 0], [0.6, 0]) == pytest.approx(0.64)


def test_metric_dot_stacks():
    a = np.array([[0.1, 0.2], [0.3, 0.4]])
    assert np.allclose(metric_dot(a, a), [-0.05, -0.25])


def test_hodge_star_basis():
    assert np.allclose(hodge_star_spatial([1, 0]), [0, 1])
    assert np.allclose(hodge_star_spatial([0, 0]), [0, 0])


def test_star_twice_is_minus_identity():
    assert star_twice_sign() == -1
    w = np.array([0.4, -1.3])
    assert np.allclose(hodge_star_spatial(hodge_star_spatial(w)), -w)
    assert np.allclose(hodge_star_spatial(inverse_hodge_star_spatial(w)), w)


def test_wedge_examples():
    assert wedge_scalar([1, 0], [0, 1]) == 1
    assert wedge_scalar([0.3, 0.2], [0.3, 0.2]) == 0
    flipped = Convention(eps2=-1)
    assert wedge_scalar([1, 0], [0, 1], flipped) == -1


@given(vec2(), vec2(), vec2())
def test_wedge_bilinear_antisymmetric(a, b, c):
    assert wedge_scalar(a, b) == pytest.approx(-wedge_scalar(b, a), abs=1e-15)
    assert wedge_scalar(a + 2 * c, b) == pytest.approx(wedge_scalar(a, b) + 2 * wedge_scalar(c, b), abs=1e-12)


def test_cross_basis_sign():
    # (e0 x e1)_2 = eps_201 = +1, raised with g_22 = -1
    assert np.allclose(cross3([1, 0, 0], [0, 1, 0]), [0, 0, -1])


@given(vec3(), vec3())
def test_cross_orthogonal_and_antisymmetric(a, b):
    c = cross3(a, b)
    assert abs(metric_dot(c, a)) < 1e-12
    assert abs(metric_dot(c, b)) < 1e-12
    assert np.allclose(c, -cross3(b, a), atol=1e-14)
    assert np.allclose(cross3(a, a), 0)


def test_bivector_inner_examples():
    e1, e2 = np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])
    assert bivector_inner(e1, e2, e1, e2) == 1
    a, c, d = np.array([1.0, 2.0, 3.0]), np.array([0.5, 0.1, 0.2]), np.array([0.3, 0.3, 0.1])
    assert bivector_inner(a, a, c, d) == 0
    b = np.array([0.2, -0.4, 0.9])
    assert bivector_inner(a, b, c, d) == pytest.approx(-bivector_inner(b, a, c, d))


def test_lorentz_factor_examples():
    assert lorentz_factor([0, 0]) == 1
    assert lorentz_factor([0.6, 0]) == pytest.approx(0.8)
    with pytest.raises(SuperluminalVelocity):
        lorentz_factor([1, 0])


@given(velocities())
def test_lorentz_factor_range(v):
    gamma = lorentz_factor(v)
    assert 0 < gamma <= 1
    if v @ v > 1e-12:
        assert gamma < 1


@given(vec3())
def test_lower_raise_roundtrip(a):
    assert np.array_equal(raise_index(lower(a)), a)


def test_convention_json_roundtrip():
    conv = Convention(eps2=-1, sgn_g=1)
    data = json.loads(conv.to_json())
    assert data == {"metric": [1, -1, -1], "eps2": -1, "eps3": 1, "sgn_g": 1}
    assert Convention.from_json(conv.to_json()) == conv
    assert DEFAULT.sgn_g == -1


@pytest.mark.parametrize("bad", [dict(metric=(-1, -1, -1)), dict(eps2=0), dict(sgn_g=2)])
def test_convention_validation(bad):
    with pytest.raises(ValueError):
        Convention(**bad)
