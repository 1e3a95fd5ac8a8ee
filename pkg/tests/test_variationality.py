import json

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import vec2, velocities
from planarspin.equation import Jet, residual_ep
from planarspin.variationality import (
    CONDITIONS,
    MUTATIONS,
    CoefficientField,
    free_coefficients,
    d1_apply,
    helmholtz_residuals,
    mutate,
    report_json,
)

ORIGIN = (0.0, np.zeros(2), np.zeros(2))


def _samples(n, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        r, a = 0.9 * np.sqrt(rng.uniform()), rng.uniform(0, 2 * np.pi)
        out.append((rng.uniform(-1, 1), rng.uniform(-1, 1, 2), r * np.array([np.cos(a), np.sin(a)])))
    return out


def test_coefficients_at_rest():
    cf = free_coefficients(1.5)
    A = cf.A(*ORIGIN)
    assert A[0, 1] == 1.0 and A[1, 0] == -1.0
    # B_ab = -mu [v_a v_b - g_ab] at v = 0, i.e. mu g_ab
    assert np.allclose(cf.B(*ORIGIN), -1.5 * np.eye(2))
    assert np.array_equal(cf.c(*ORIGIN), [0, 0])


@given(velocities())
def test_A_is_skew_and_invertible(v):
    A = free_coefficients(1.0).A(0.0, np.zeros(2), v)
    assert np.array_equal(A, -A.T)
    assert abs(np.linalg.det(A)) > 0


@settings(max_examples=100)
@given(velocities(), vec2(), vec2())
def test_assembly_reproduces_equation(v, vp, vpp):
    cf = free_coefficients(0.7)
    assembled = cf.assemble(0.0, np.zeros(2), v, vp, vpp)
    assert np.max(np.abs(assembled - residual_ep(Jet(0.0, [0, 0], v, vp, vpp), 0.7))) < 1e-10


def test_d1_examples():
    point = (0.2, np.array([0.1, -0.3]), np.array([0.3, 0.4]))
    assert d1_apply(lambda t, x, v: v[0] ** 2, point) == 0.0
    assert d1_apply(lambda t, x, v: t, point) == pytest.approx(1.0)
    assert d1_apply(lambda t, x, v: x[0], point) == pytest.approx(0.3)
    assert d1_apply(lambda t, x, v: t**3, point, power=3) == pytest.approx(6.0, rel=1e-8)


def test_free_field_passes_all_conditions():
    cf = free_coefficients(1.0)
    for sample in _samples(20):
        res = helmholtz_residuals(cf, sample)
        assert set(res) == set(CONDITIONS)
        assert max(res.values()) < 1e-6


def test_skew_B_example():
    eps = np.array([[0.0, 1.0], [-1.0, 0.0]])
    cf = CoefficientField(lambda t, x, v: eps, lambda t, x, v: eps, lambda t, x, v: np.zeros(2))
    res = helmholtz_residuals(cf, ORIGIN)
    assert res["ii"] == pytest.approx(2.0)
    assert all(res[c] < 1e-9 for c in CONDITIONS if c != "ii")


@pytest.mark.parametrize(
    "kind, expected",
    [("skew_b", {"ii"}), ("linear_c", {"iv"}), ("time_a", {"ii", "iii"})],
)
def test_mutations_fire_exactly_their_conditions(kind, expected):
    cf = mutate(free_coefficients(1.0), kind)
    fired = set()
    for sample in _samples(5, seed=1):
        res = helmholtz_residuals(cf, sample)
        fired |= {c for c in CONDITIONS if res[c] > 1e-2}
        assert all(res[c] < 1e-4 for c in CONDITIONS if c not in expected)
    assert fired == expected
    assert kind in MUTATIONS


def test_exponent_mutation_stays_variational():
    # A = eps / (1 + v.v) still admits a Lagrangian; none of the conditions fires
    cf = mutate(free_coefficients(1.0), "a_power")
    for sample in _samples(5, seed=2):
        assert max(helmholtz_residuals(cf, sample).values()) < 1e-6


def test_report_json():
    rows = json.loads(report_json(free_coefficients(1.0), _samples(2)))
    assert len(rows) == 12
    assert {r["condition"] for r in rows} == set(CONDITIONS)
    assert all(r["residual"] < 1e-6 for r in rows)


def test_unknown_mutation():
    with pytest.raises(ValueError):
        mutate(free_coefficients(1.0), "nope")
