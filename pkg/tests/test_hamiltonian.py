import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import vec2, velocities
from planarspin.equation import Jet, integrate_worldline
from planarspin.errors import NewtonDivergence, SingularJacobian, SuperluminalVelocity
from planarspin.hamiltonian import (
    CSV_HEADER,
    CanonicalState,
    canonical_flow,
    contact_kernel_residual,
    first_momentum,
    hamiltonian_value,
    inverse_legendre,
    jacobi_block,
    legendre_roundtrip_error,
    momenta,
    closed_form_inverse_jacobian,
)
from planarspin.lagrangian import LagrangianSpec, momenta_from_lagrangian


def test_momenta_examples():
    p, pp = momenta([0, 0], [0, 0], 1.0)
    assert np.array_equal(p, [0, 0]) and np.array_equal(pp, [0, 0])
    p, pp = momenta([0, 0], [1, 0], 2.0)
    assert np.allclose(p, [0, 1]) and np.allclose(pp, [0, 0])
    _, pp = momenta([0.6, 0], [0, 0], 1.0)
    assert np.allclose(pp, [0, -0.375])


def test_momenta_errors():
    with pytest.raises(SuperluminalVelocity):
        momenta([0.9, 0.9], [0, 0], 1.0)


@settings(max_examples=10, deadline=None)
@given(velocities(0.8), vec2())
def test_momenta_match_ostrogradsky_definition(v, vp):
    jet = Jet(0.0, [0, 0], v, vp, [0.0, 0.0])
    p_fd, pp_fd = momenta_from_lagrangian(LagrangianSpec("mean", 0.9), jet)
    p, pp = momenta(v, vp, 0.9)
    # p depends on v'' only through total derivative of dL/dv'; with v'' = 0 the closed form applies
    assert np.max(np.abs(pp - pp_fd)) < 1e-6
    assert np.max(np.abs(p - p_fd)) < 1e-5


def test_hamiltonian_at_rest():
    assert hamiltonian_value([0, 0], [0.4, -0.2], 1.7) == pytest.approx(1.7)
    with pytest.raises(ValueError):
        hamiltonian_value([0, 0], [0, 0], 1.0, form="other")


@given(velocities(), vec2(), st.floats(-2, 2))
def test_hamiltonian_forms_agree(v, vp, mu):
    closed = hamiltonian_value(v, vp, mu)
    assert abs(closed - hamiltonian_value(v, vp, mu, form="momentum")) < 1e-12
    assert abs(closed - hamiltonian_value(v, vp, mu, form="legendre")) < 1e-12


def test_inverse_legendre_examples():
    v, vp = inverse_legendre([0, 0], [0, 0], 1.0)
    assert np.allclose(v, 0) and np.allclose(vp, 0)
    v, _ = inverse_legendre([0, 0], [0, -0.375], 1.0)
    assert np.allclose(v, [0.6, 0], atol=1e-12)


@settings(max_examples=200)
@given(velocities(), vec2(), st.floats(-2, 2))
def test_legendre_roundtrip(v, vp, mu):
    assert legendre_roundtrip_error(v, vp, mu) < 1e-10


def test_inverse_legendre_out_of_range():
    with pytest.raises(NewtonDivergence):
        inverse_legendre([0, 0], [50.0, 50.0], 1.0)


def test_jacobi_block_at_rest():
    block = jacobi_block([0, 0])
    assert np.allclose(block.dpp_dv, [[0, 0.5], [-0.5, 0]])
    assert np.allclose(block.dv_dpp, [[0, -2], [2, 0]])
    assert np.array_equal(block.dv_dp, np.zeros((2, 2)))


@given(velocities())
def test_jacobi_block_matches_closed_form(v):
    try:
        block = jacobi_block(v)
    except SingularJacobian:
        return
    closed, delta = closed_form_inverse_jacobian(v)
    assert np.max(np.abs(block.dv_dpp @ block.dpp_dv - np.eye(2))) < 1e-8
    assert np.max(np.abs(block.dv_dpp - closed)) < 1e-8 * max(1.0, np.max(np.abs(closed)))
    assert block.delta == pytest.approx(delta, rel=1e-10, abs=1e-12)


@settings(max_examples=50)
@given(velocities(0.7), vec2())
def test_contact_kernel(v, vp):
    assert contact_kernel_residual(v, vp, 1.3) < 1e-8


def test_canonical_rest_is_stationary():
    traj = canonical_flow(CanonicalState(0.0, [1.0, 2.0], [0, 0], [0, 0]), 1.5, (0.0, 0.5), 1e-2)
    assert np.allclose(traj.x, [1.0, 2.0]) and np.allclose(traj.pp, 0)
    assert np.allclose(traj.H, 1.5)


def test_canonical_matches_direct_flow(tmp_path):
    direct = integrate_worldline([0, 0], [0.3, 0.0], [0.0, 0.4], 1.0, (0.0, 2.0), 1e-3)
    p0, pp0 = momenta(direct.v[0], direct.vp[0], 1.0)
    canon = canonical_flow(CanonicalState(0.0, direct.x[0], p0, pp0), 1.0, (0.0, 2.0), 1e-3)
    assert np.max(np.abs(canon.x - direct.x)) < 1e-6
    assert np.max(np.abs(canon.p - p0)) == 0.0
    assert max(np.max(np.abs(first_momentum(v) - pp)) for v, pp in zip(canon.v, canon.pp)) < 1e-8
    assert np.ptp(canon.H) / abs(canon.H[0]) < 1e-6
    canon.to_csv(tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_text().splitlines()[0] == ",".join(CSV_HEADER)
