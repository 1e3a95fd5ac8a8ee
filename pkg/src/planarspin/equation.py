"""The third-order equation of motion and its worldlines.

The residual is returned with covariant (lower) components:

    R_a = -(*v'')_a / L^3 + 3 (*v')_a (v.v') / L^5
          + mu [L^2 v'_a - (v'.v) v_a] / L^3,        L^2 = 1 + v.v

which is exactly the Euler-Poisson expression of the Lagrangians in
:mod:`planarspin.lagrangian` (no extra sign), and maps onto the proper-time
form ``u'' x u + mu u' = 0`` with the default orientation.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp

from .errors import NegativeRadicand, StepUnderflow, SuperluminalVelocity
from .minkowski import (
    DEFAULT,
    Convention,
    as_vec,
    cross3,
    hodge_star_spatial,
    levi_civita2,
    lower,
    metric_dot,
)

CSV_HEADER = ["t", "x1", "x2", "v1", "v2", "vp1", "vp2"]


@dataclass(frozen=True)
class Jet:
    t: float
    x: np.ndarray
    v: np.ndarray
    vp: np.ndarray
    vpp: Optional[np.ndarray] = None
    vppp: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("x", "v", "vp", "vpp", "vppp"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, as_vec(val, 2))

    def with_vpp(self, vpp, vppp=None) -> "Jet":
        return Jet(self.t, self.x, self.v, self.vp, vpp, vppp if vppp is not None else self.vppp)


@dataclass(frozen=True)
class ProperJet:
    x: np.ndarray  # event (t, x1, x2)
    u: np.ndarray
    ud: np.ndarray
    udd: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        for name in ("x", "u", "ud", "udd"):
            object.__setattr__(self, name, as_vec(getattr(self, name), 3))


def _check_monotone(param: np.ndarray) -> None:
    if param.ndim != 1 or (param.size > 1 and np.any(np.diff(param) <= 0)):
        raise ValueError("trajectory parameter must be strictly increasing")


@dataclass
class Trajectory:
    """Time-parametrized samples of a worldline (arrays of shape (N,) / (N, 2))."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    vp: np.ndarray
    vpp: np.ndarray
    mu: float
    method: str = "rk4"
    step: float = 0.0
    convention: Convention = DEFAULT

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        _check_monotone(self.t)

    def __len__(self) -> int:
        return self.t.size

    def __getitem__(self, i: int) -> Jet:
        return Jet(self.t[i], self.x[i], self.v[i], self.vp[i], self.vpp[i])

    def __iter__(self) -> Iterator[Jet]:
        return (self[i] for i in range(len(self)))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for i in range(len(self)):
                writer.writerow(
                    [repr(float(val)) for val in (self.t[i], *self.x[i], *self.v[i], *self.vp[i])]
                )

    def manifest(self) -> dict:
        return {
            "initial": {
                "x": self.x[0].tolist(),
                "v": self.v[0].tolist(),
                "vp": self.vp[0].tolist(),
            },
            "t_span": [float(self.t[0]), float(self.t[-1])],
            "mu": self.mu,
            "method": self.method,
            "step": self.step,
            "convention": json.loads(self.convention.to_json()),
            "samples": len(self),
        }

    def write_manifest(self, path) -> None:
        Path(path).write_text(json.dumps(self.manifest(), indent=2, sort_keys=True))


@dataclass
class ProperTrajectory:
    tau: np.ndarray
    x: np.ndarray
    u: np.ndarray
    ud: np.ndarray
    udd: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        _check_monotone(np.asarray(self.tau, dtype=float))

    def __len__(self) -> int:
        return len(self.tau)

    def __getitem__(self, i: int) -> ProperJet:
        return ProperJet(self.x[i], self.u[i], self.ud[i], self.udd[i], float(self.tau[i]))

    def __iter__(self) -> Iterator[ProperJet]:
        return (self[i] for i in range(len(self)))


def _radicand(v, conv: Convention):
    r = 1.0 + metric_dot(v, v, conv)
    if np.any(r <= 0.0):
        raise SuperluminalVelocity(f"1 + v.v = {np.min(r):.3g} <= 0")
    return r


def _residual(v, vp, vpp, mu, conv: Convention = DEFAULT) -> np.ndarray:
    v, vp, vpp = (np.asarray(a, dtype=float) for a in (v, vp, vpp))
    r = _radicand(v, conv)[..., None]
    vvp = metric_dot(v, vp, conv)[..., None]
    curv = -hodge_star_spatial(vpp, conv) / r**1.5 + 3.0 * hodge_star_spatial(vp, conv) * vvp / r**2.5
    mass = mu * (r * lower(vp, conv) - vvp * lower(v, conv)) / r**1.5
    return curv + mass


def residual_ep(jet: Jet, mu: float, conv: Convention = DEFAULT) -> np.ndarray:
    """Left side of the invariant third-order equation at a jet (covariant)."""
    if jet.vpp is None:
        raise ValueError("residual_ep needs the second derivative vpp")
    return _residual(jet.v, jet.vp, jet.vpp, mu, conv)


def solve_jerk(v, vp, mu: float, conv: Convention = DEFAULT) -> np.ndarray:
    """The unique v'' that makes the residual vanish.

    The v''-coefficient is the skew matrix eps_ab / L^3, whose inverse is
    -L^3 eps (eps @ eps = -1 for the 2x2 symbol).
    """
    v = np.asarray(v, dtype=float)
    rest = _residual(v, vp, np.zeros_like(v), mu, conv)
    r = _radicand(v, conv)[..., None]
    return r**1.5 * np.einsum("ab,...b->...a", levi_civita2(conv), rest)


def _rhs_factory(mu: float, conv: Convention):
    # scalar fast path for the integrator; same algebra as _residual/solve_jerk
    g1, g2 = float(conv.metric[1]), float(conv.metric[2])
    e = float(conv.eps2)

    def rhs(t, y):
        v1, v2, w1, w2 = y[2], y[3], y[4], y[5]
        r = 1.0 + g1 * v1 * v1 + g2 * v2 * v2
        if r <= 0.0:
            raise SuperluminalVelocity(f"1 + v.v = {r:.3g} <= 0 at t = {t:.6g}")
        vw = g1 * v1 * w1 + g2 * v2 * w2
        # residual with vpp = 0; (*w)_1 = -e w2, (*w)_2 = e w1
        c = 3.0 * vw / r**2.5
        m = mu / r**1.5
        rest1 = -e * w2 * c + m * (r * g1 * w1 - vw * g1 * v1)
        rest2 = e * w1 * c + m * (r * g2 * w2 - vw * g2 * v2)
        s = r**1.5 * e
        return np.array([v1, v2, w1, w2, s * rest2, -s * rest1])

    return rhs


def _rk4(rhs, y0: np.ndarray, t: np.ndarray) -> np.ndarray:
    ys = np.empty((t.size, y0.size))
    ys[0] = y = y0
    for i in range(t.size - 1):
        h = t[i + 1] - t[i]
        ti = t[i]
        k1 = rhs(ti, y)
        k2 = rhs(ti + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(ti + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(ti + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[i + 1] = y
    return ys


def time_grid(t_span, step: float) -> np.ndarray:
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must satisfy t1 > t0")
    if not step > 0:
        raise ValueError("step must be positive")
    n = max(1, int(round((t1 - t0) / step)))
    return np.linspace(t0, t1, n + 1)


def integrate_worldline(
    x0,
    v0,
    vp0,
    mu: float,
    t_span=(0.0, 10.0),
    step: float = 1e-3,
    method: str = "rk4",
    conv: Convention = DEFAULT,
    rtol: float = 1e-11,
    atol: float = 1e-13,
) -> Trajectory:
    """Integrate the equation as a first-order system in (x, v, v').

    ``method`` is ``"rk4"`` (classical fixed step) or ``"dopri"`` (adaptive
    Dormand-Prince 5(4), samples reported on the same uniform grid).
    """
    x0, v0, vp0 = as_vec(x0, 2), as_vec(v0, 2), as_vec(vp0, 2)
    _radicand(v0, conv)
    t = time_grid(t_span, step)
    y0 = np.concatenate([x0, v0, vp0])
    rhs = _rhs_factory(mu, conv)
    if method == "rk4":
        ys = _rk4(rhs, y0, t)
    elif method == "dopri":
        g1, g2 = conv.metric[1], conv.metric[2]

        def light_cone(_t, y):
            return 1.0 + g1 * y[2] ** 2 + g2 * y[3] ** 2 - 1e-12

        light_cone.terminal = True
        sol = solve_ivp(rhs, (t[0], t[-1]), y0, method="RK45", t_eval=t, rtol=rtol, atol=atol, events=light_cone)
        if sol.status == 1:
            raise SuperluminalVelocity(f"worldline reached the light cone at t = {sol.t_events[0][0]:.6g}")
        if sol.status != 0:
            raise StepUnderflow(sol.message)
        ys = sol.y.T
    else:
        raise ValueError(f"unknown method {method!r}")
    x, v, vp = ys[:, 0:2], ys[:, 2:4], ys[:, 4:6]
    vpp = solve_jerk(v, vp, mu, conv)
    return Trajectory(t, x, v, vp, vpp, mu=mu, method=method, step=float(t[1] - t[0]), convention=conv)


def proper_kinematics(v, vp, vpp, conv: Convention = DEFAULT):
    """(u, du/dtau, d2u/dtau2) from the time derivatives of the velocity.

    Analytic chain rule with dtau/dt = L = sqrt(1 + v.v); works on stacks.
    """
    v, vp, vpp = (np.asarray(a, dtype=float) for a in (v, vp, vpp))
    r = _radicand(v, conv)[..., None]
    L = np.sqrt(r)
    vvp = metric_dot(v, vp, conv)[..., None]
    vpvp = metric_dot(vp, vp, conv)[..., None]
    vvpp = metric_dot(v, vpp, conv)[..., None]
    one_v = np.concatenate([np.ones(v.shape[:-1] + (1,)), v], axis=-1)
    zero = np.zeros(v.shape[:-1] + (1,))
    vp3 = np.concatenate([zero, vp], axis=-1)
    vpp3 = np.concatenate([zero, vpp], axis=-1)
    u = one_v / L
    ud = vp3 / r - one_v * vvp / r**2
    dud_dt = vpp3 / r - 3.0 * vp3 * vvp / r**2 - one_v * (vpvp + vvpp) / r**2 + 4.0 * one_v * vvp**2 / r**3
    return u, ud, dud_dt / L


def to_proper_time(traj: Trajectory, conv: Convention | None = None) -> ProperTrajectory:
    conv = conv or traj.convention
    u, ud, udd = proper_kinematics(traj.v, traj.vp, traj.vpp, conv)
    L = 1.0 / u[:, 0]
    tau = cumulative_simpson(L, x=traj.t, initial=0.0) if len(traj) > 2 else np.concatenate(
        [[0.0], np.cumsum(0.5 * (L[1:] + L[:-1]) * np.diff(traj.t))]
    )
    events = np.column_stack([traj.t, traj.x])
    return ProperTrajectory(tau, events, u, ud, udd, meta={"mu": traj.mu, "source": traj.method})


def residual_proper(pjet: ProperJet, mu: float, conv: Convention = DEFAULT) -> np.ndarray:
    """u'' x u + mu u' (contravariant components)."""
    return cross3(pjet.udd, pjet.u, conv) + mu * pjet.ud


def residual_proper_stack(ptraj: ProperTrajectory, mu: float, conv: Convention = DEFAULT) -> np.ndarray:
    return cross3(ptraj.udd, ptraj.u, conv) + mu * ptraj.ud


def curvature(pjet: ProperJet, conv: Convention = DEFAULT, tol: float = 1e-12) -> float:
    """First curvature |u'| = sqrt(-u'.u') of the worldline."""
    rad = -float(metric_dot(pjet.ud, pjet.ud, conv))
    if rad < -tol:
        raise NegativeRadicand(f"-u'.u' = {rad:.3g} < 0: acceleration is not spacelike")
    return math.sqrt(max(rad, 0.0))


def curvature_stack(ptraj: ProperTrajectory, conv: Convention = DEFAULT) -> np.ndarray:
    rad = -metric_dot(ptraj.ud, ptraj.ud, conv)
    if np.any(rad < -1e-12):
        raise NegativeRadicand("acceleration is not spacelike along the trajectory")
    return np.sqrt(np.maximum(rad, 0.0))


def relative_drift(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    scale = max(abs(values[0]), 1e-300)
    if values[0] == 0.0:
        return float(np.max(np.abs(values)))
    return float(np.max(np.abs(values - values[0])) / scale)


def calibrate_orientation(
    mu: float = 1.0,
    x0=(0.0, 0.0),
    v0=(0.3, -0.2),
    vp0=(0.1, 0.4),
    conv: Convention = DEFAULT,
    horizon: float = 2.0,
    tol: float = 1e-6,
) -> list[int]:
    """Values of eps_012 for which solutions map onto proper-time solutions.

    Integrates once with ``conv`` (the time-parametrized equation only uses
    eps_12) and evaluates the proper-time residual under both orientations of
    the space-time symbol.
    """
    traj = integrate_worldline(x0, v0, vp0, mu, (0.0, horizon), 1e-3, "rk4", conv)
    closing = []
    for eps3 in (1, -1):
        trial = conv.replace(eps3=eps3)
        ptraj = to_proper_time(traj, trial)
        worst = float(np.max(np.abs(residual_proper_stack(ptraj, mu, trial))))
        if worst < tol:
            closing.append(eps3)
    return closing
