"""Poincare invariance of the third-order system.

The generator acts on velocities by

    dv  = pi + (pi.v) v - Omega v
    dv' = 2 (pi.v) v' + (pi.v') v - Omega v'

with Omega = omega * eps the rotation part and pi the boost vector.  Rows
built from pi (``outer(., pi)``, ``pi A^-1 c``) use its lowered components.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .equation import Jet
from .errors import SingularA, SuperluminalVelocity
from .fdiff import line_derivative
from .minkowski import DEFAULT, Convention, as_vec, levi_civita2, metric_dot
from .variationality import LEVELS, CoefficientField

IDENTITIES = ("rotation_A", "rotation_B", "rotation_c", "boost_A", "boost_B", "boost_c")
OUTER_STEP = 1e-2


@dataclass(frozen=True)
class PoincareGen:
    omega: float = 0.0
    piv: np.ndarray = field(default_factory=lambda: np.zeros(2))
    translations: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "piv", as_vec(self.piv, 2))
        object.__setattr__(self, "translations", as_vec(self.translations, 3))

    def Omega(self, conv: Convention = DEFAULT) -> np.ndarray:
        return self.omega * levi_civita2(conv)

    def is_zero(self) -> bool:
        return self.omega == 0.0 and not np.any(self.piv)


@dataclass(frozen=True)
class Multipliers:
    Phi: np.ndarray
    Xi: np.ndarray
    Pi: np.ndarray


def velocity_flow(v, gen: PoincareGen, conv: Convention = DEFAULT) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return gen.piv + metric_dot(gen.piv, v, conv) * v - gen.Omega(conv) @ v


def acceleration_flow(v, vp, gen: PoincareGen, conv: Convention = DEFAULT) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    vp = np.asarray(vp, dtype=float)
    pi = gen.piv
    return 2 * metric_dot(pi, v, conv) * vp + metric_dot(pi, vp, conv) * v - gen.Omega(conv) @ vp


def _inv(A: np.ndarray) -> np.ndarray:
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) < 1e-14:
        raise SingularA(f"det A = {det:.3g}")
    return np.linalg.inv(A)


class _Field:
    """Coefficient field frozen at (t, x) with directional v-derivatives."""

    def __init__(self, cf: CoefficientField, t: float, x: np.ndarray):
        self.cf, self.t, self.x = cf, t, x

    def A(self, v):
        return self.cf.A(self.t, self.x, v)

    def B(self, v):
        return self.cf.B(self.t, self.x, v)

    def c(self, v):
        return self.cf.c(self.t, self.x, v)

    def along(self, fn, v, w, h=None):
        h = self.cf.fd_step if h is None else h
        return line_derivative(lambda s: fn(v + s * w), 1, h, LEVELS)

    def Aprime(self, v, vp):
        return self.along(self.A, v, vp)


def multipliers(
    cf: CoefficientField, v, vp, gen: PoincareGen, conv: Convention = DEFAULT, t: float = 0.0, x=None
) -> Multipliers:
    v = as_vec(v, 2)
    vp = as_vec(vp, 2)
    F = _Field(cf, t, np.zeros(2) if x is None else as_vec(x, 2))
    A = F.A(v)
    Ainv = _inv(A)
    pi_low = conv.g2 * gen.piv
    Om = gen.Omega(conv)
    lhs = F.along(F.A, v, velocity_flow(v, gen, conv)) + 2 * metric_dot(gen.piv, v, conv) * A
    lhs = lhs + np.outer(A @ v, pi_low) - A @ Om
    Phi = lhs @ Ainv
    k = F.Aprime(v, vp) @ vp + F.B(v) @ vp + F.c(v)
    Xi = -np.outer(k, pi_low)
    Pi = 2 * np.outer(A @ vp, pi_low) + metric_dot(gen.piv, vp, conv) * A
    return Multipliers(Phi, Xi, Pi)


def multiplier_residual(
    cf: CoefficientField, v, vp, gen: PoincareGen, conv: Convention = DEFAULT, t: float = 0.0, x=None
) -> float:
    """max |X(k) - Phi k + Xi v + Pi v'| with X acting on k(v, v')."""
    v = as_vec(v, 2)
    vp = as_vec(vp, 2)
    xx = np.zeros(2) if x is None else as_vec(x, 2)
    m = multipliers(cf, v, vp, gen, conv, t, xx)
    dv = velocity_flow(v, gen, conv)
    dvp = acceleration_flow(v, vp, gen, conv)
    Xk = line_derivative(lambda s: cf.k(t, xx, v + s * dv, vp + s * dvp), 1, OUTER_STEP, LEVELS)
    k = cf.k(t, xx, v, vp)
    return float(np.max(np.abs(Xk - m.Phi @ k + m.Xi @ v + m.Pi @ vp)))


def invariance_terms(
    cf: CoefficientField,
    v,
    vp,
    gen: PoincareGen,
    conv: Convention = DEFAULT,
    t: float = 0.0,
    x=None,
    boost_A_variant: str = "A_vp",
) -> dict[str, np.ndarray]:
    """Left minus right side of each invariance identity.

    Identities are named by generator part (rotation or boost) and by the
    coefficient they constrain.  ``boost_A_variant`` selects the last term of
    the boost identity for A': ``"A_vp"`` uses
    -3 (pi.v') A v', ``"Aprime_v"`` uses -3 (pi.v') A' v.
    """
    v = as_vec(v, 2)
    vp = as_vec(vp, 2)
    F = _Field(cf, t, np.zeros(2) if x is None else as_vec(x, 2))
    A, B, c = F.A(v), F.B(v), F.c(v)
    Ainv = _inv(A)
    Om = gen.Omega(conv)
    pi = gen.piv
    pi_low = conv.g2 * pi
    pv = metric_dot(pi, v, conv)
    pvp = metric_dot(pi, vp, conv)
    rot_dir = -Om @ v  # Omega.(v ^ d_v)
    rot_dir_p = -Om @ vp  # Omega.(v' ^ d_v)
    boost_dir = pi + pv * v  # pi.d_v + (pi.v) v.d_v

    Ap = F.Aprime(v, vp)

    def Aprime_at(w):
        return F.Aprime(w, vp)

    dA_rot = F.along(F.A, v, rot_dir)
    dA_boost = F.along(F.A, v, boost_dir)

    res_rot_A = (
        line_derivative(lambda s: Aprime_at(v + s * rot_dir), 1, OUTER_STEP, LEVELS) @ vp
        + F.along(F.A, v, rot_dir_p) @ vp
        - Ap @ Om @ vp
        - (dA_rot @ Ainv @ Ap @ vp - A @ Om @ Ainv @ Ap @ vp)
    )
    res_rot_B = F.along(F.B, v, rot_dir) - B @ Om - (dA_rot @ Ainv @ B - A @ Om @ Ainv @ B)
    res_rot_c = F.along(F.c, v, rot_dir) - (dA_rot @ Ainv @ c - A @ Om @ Ainv @ c)

    last = Ap @ v if boost_A_variant == "Aprime_v" else A @ vp
    res_boost_A = (
        line_derivative(lambda s: Aprime_at(v + s * boost_dir), 1, OUTER_STEP, LEVELS) @ vp
        + pv * Ap @ vp
        + pvp * F.along(F.A, v, v) @ vp
        + pvp * Ap @ v
        - (dA_boost @ Ainv @ Ap @ vp + (pi_low @ Ainv @ Ap @ vp) * (A @ v) - 3 * pvp * last)
    )
    res_boost_B = (
        F.along(F.B, v, boost_dir)
        + np.outer(B @ v, pi_low)
        - (dA_boost @ Ainv @ B + np.outer(A @ v, pi_low) @ Ainv @ B + pv * B)
    )
    res_boost_c = F.along(F.c, v, boost_dir) - (dA_boost @ Ainv @ c + 3 * pv * c + (pi_low @ Ainv @ c) * (A @ v))
    return dict(zip(IDENTITIES, (res_rot_A, res_rot_B, res_rot_c, res_boost_A, res_boost_B, res_boost_c)))


def invariance_residuals(
    cf: CoefficientField,
    v,
    vp,
    gen: PoincareGen,
    conv: Convention = DEFAULT,
    t: float = 0.0,
    x=None,
    boost_A_variant: str = "A_vp",
) -> dict[str, float]:
    if gen.is_zero():
        return {name: 0.0 for name in IDENTITIES}
    terms = invariance_terms(cf, v, vp, gen, conv, t, x, boost_A_variant)
    return {name: float(np.max(np.abs(arr))) for name, arr in terms.items()}


def report(cf: CoefficientField, samples, conv: Convention = DEFAULT) -> list[dict]:
    rows = []
    for v, vp, gen in samples:
        res = invariance_residuals(cf, v, vp, gen, conv)
        sample = {
            "v": np.asarray(v, float).tolist(),
            "vp": np.asarray(vp, float).tolist(),
            "omega": float(gen.omega),
            "pi": gen.piv.tolist(),
        }
        for name in IDENTITIES:
            rows.append({"identity": name, "sample": sample, "residual": res[name]})
    return rows


def report_json(cf: CoefficientField, samples, conv: Convention = DEFAULT) -> str:
    return json.dumps(report(cf, samples, conv), indent=2)


# finite transformations


def generator_matrix(gen: PoincareGen, conv: Convention = DEFAULT) -> np.ndarray:
    """Linear part of the generator on events (t, x^1, x^2)."""
    pi = gen.piv
    G = np.zeros((3, 3))
    G[0, 1:] = -conv.g2 * pi  # dt = -(pi.x)
    G[1:, 0] = conv.g3[0] * pi  # dx = g00 t pi - Omega x
    G[1:, 1:] = -gen.Omega(conv)
    return G


def lorentz_matrix(gen: PoincareGen, lam: float, conv: Convention = DEFAULT) -> np.ndarray:
    return expm(lam * generator_matrix(gen, conv))


def lorentz_transform_jet(jet: Jet, gen: PoincareGen, finite_parameter: float, conv: Convention = DEFAULT) -> Jet:
    """Image of a jet under exp(lambda X), derivatives re-taken in the new time."""
    lam = float(finite_parameter)
    Lam = lorentz_matrix(gen, lam, conv)
    event = Lam @ np.concatenate([[jet.t], jet.x]) + lam * gen.translations
    vpp = np.zeros(2) if jet.vpp is None else jet.vpp
    W = Lam @ np.concatenate([[1.0], jet.v])
    W1 = Lam @ np.concatenate([[0.0], jet.vp])
    W2 = Lam @ np.concatenate([[0.0], vpp])
    if W[0] <= 0 or 1.0 + metric_dot(W[1:] / W[0], W[1:] / W[0], conv) <= 0:
        raise SuperluminalVelocity("transformed velocity is not subluminal")
    v_new = W[1:] / W[0]
    num = W1[1:] - v_new * W1[0]
    vp_new = num / W[0] ** 2
    dv_dt = vp_new * W[0]
    dnum = W2[1:] - dv_dt * W1[0] - v_new * W2[0]
    vpp_new = (dnum / W[0] ** 2 - 2 * num * W1[0] / W[0] ** 3) / W[0]
    return Jet(
        float(event[0]),
        event[1:],
        v_new,
        vp_new,
        vpp_new if jet.vpp is not None else None,
        None,
    )
