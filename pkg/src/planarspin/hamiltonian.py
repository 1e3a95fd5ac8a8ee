"""Ostrogradsky momenta, the Hamilton function, the inverse Legendre map and
the canonical flow for the averaged Lagrangian L = (L1 + L2) / 2.

Momenta are covariant.  p' depends on v only; p is linear in v'.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .equation import _rk4, time_grid
from .errors import DegenerateDenominator, NewtonDivergence, SingularJacobian, SuperluminalVelocity
from .minkowski import DEFAULT, Convention, as_vec

CSV_HEADER = ["t", "x1", "x2", "p1", "p2", "pp1", "pp2", "H"]
NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50


@dataclass(frozen=True)
class CanonicalState:
    t: float
    x: np.ndarray
    p: np.ndarray
    pp: np.ndarray

    def __post_init__(self):
        for name in ("x", "p", "pp"):
            object.__setattr__(self, name, as_vec(getattr(self, name), 2))


@dataclass(frozen=True)
class JacobiBlock:
    dv_dpp: np.ndarray
    delta: float
    dpp_dv: np.ndarray
    dv_dp: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))


# scalar kernels; g1, g2 metric diagonal, e = eps_12


def _consts(conv: Convention):
    return float(conv.metric[1]), float(conv.metric[2]), float(conv.eps2)


def _radicand(v1, v2, g1, g2):
    r = 1.0 + g1 * v1 * v1 + g2 * v2 * v2
    if r <= 0.0:
        raise SuperluminalVelocity(f"1 + v.v = {r:.3g} <= 0")
    return r


def _denoms(v1, v2, r, g1, g2):
    # 1 + g_bb |v ^ e_b|^2 = 1 + v.v - g_bb (v^b)^2
    d1 = r - g1 * v1 * v1
    d2 = r - g2 * v2 * v2
    if abs(d1) < 1e-14 or abs(d2) < 1e-14:
        raise DegenerateDenominator("Legendre denominator vanishes")
    return d1, d2


def _pp(v1, v2, g1, g2, e):
    r = _radicand(v1, v2, g1, g2)
    d1, d2 = _denoms(v1, v2, r, g1, g2)
    L = math.sqrt(r)
    return 0.5 * e * v2 / (L * d2), -0.5 * e * v1 / (L * d1)


def _dpp_dv(v1, v2, g1, g2, e):
    """Analytic Jacobian d p'_a / d v^c."""
    r = _radicand(v1, v2, g1, g2)
    d1, d2 = _denoms(v1, v2, r, g1, g2)
    L = math.sqrt(r)
    gv = (g1 * v1, g2 * v2)
    vb = (v1, v2)
    dd = (d1, d2)

    def df(b, c):
        # d/dv^c of f_b = v^b / (L D_b)
        dD = 2.0 * gv[c] - (2.0 * gv[b] if b == c else 0.0)
        out = (1.0 if b == c else 0.0) / (L * dd[b])
        out -= vb[b] * gv[c] / (L**3 * dd[b])
        out -= vb[b] * dD / (L * dd[b] ** 2)
        return out

    return np.array(
        [
            [0.5 * e * df(1, 0), 0.5 * e * df(1, 1)],
            [-0.5 * e * df(0, 0), -0.5 * e * df(0, 1)],
        ]
    )


def _star(w1, w2, e):
    # (*w)_1 = eps_21 w^2, (*w)_2 = eps_12 w^1
    return -e * w2, e * w1


def _p(v1, v2, w1, w2, mu, g1, g2, e):
    r = _radicand(v1, v2, g1, g2)
    L = math.sqrt(r)
    s1, s2 = _star(w1, w2, e)
    return s1 / r**1.5 - mu * g1 * v1 / L, s2 / r**1.5 - mu * g2 * v2 / L


def _vp_from_p(p1, p2, v1, v2, mu, g1, g2, e):
    r = _radicand(v1, v2, g1, g2)
    L = math.sqrt(r)
    s1 = r**1.5 * (p1 + mu * g1 * v1 / L)
    s2 = r**1.5 * (p2 + mu * g2 * v2 / L)
    # *(*w) = -w
    t1, t2 = _star(s1, s2, e)
    return -t1, -t2


# public API


def momenta(v, vp, mu: float, conv: Convention = DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """(p, p') for the averaged Lagrangian, covariant components."""
    v = as_vec(v, 2)
    vp = as_vec(vp, 2)
    g1, g2, e = _consts(conv)
    p = np.array(_p(v[0], v[1], vp[0], vp[1], mu, g1, g2, e))
    pp = np.array(_pp(v[0], v[1], g1, g2, e))
    return p, pp


def first_momentum(v, conv: Convention = DEFAULT) -> np.ndarray:
    v = as_vec(v, 2)
    return np.array(_pp(v[0], v[1], *_consts(conv)))


def hamiltonian_value(v, vp, mu: float, conv: Convention = DEFAULT, form: str = "closed") -> float:
    """Hamilton function.

    ``closed``    *(v' ^ v) / L^3 + mu / L
    ``momentum``  p.v + mu L
    ``legendre``  -L + p.v + p'.v' with the averaged Lagrangian
    """
    v = as_vec(v, 2)
    vp = as_vec(vp, 2)
    g1, g2, e = _consts(conv)
    r = _radicand(v[0], v[1], g1, g2)
    L = math.sqrt(r)
    if form == "closed":
        wedge = e * (vp[0] * v[1] - vp[1] * v[0])
        return wedge / r**1.5 + mu / L
    p, pp = momenta(v, vp, mu, conv)
    if form == "momentum":
        return float(p @ v + mu * L)
    if form == "legendre":
        from .lagrangian import LagrangianSpec, eval_L

        return float(-eval_L(LagrangianSpec("mean", mu), v, vp, conv) + p @ v + pp @ vp)
    raise ValueError(f"unknown form {form!r}")


def jacobi_block(v, conv: Convention = DEFAULT, cond_limit: float = 1e12) -> JacobiBlock:
    """Inverse of d p'/d v together with Delta = 4 L^6 det(d p'/d v).

    With this normalization dv/dp' = 2 L^3 / Delta * M, M the matrix whose
    determinant is Delta.
    """
    v = as_vec(v, 2)
    g1, g2, e = _consts(conv)
    J = _dpp_dv(v[0], v[1], g1, g2, e)
    r = _radicand(v[0], v[1], g1, g2)
    det = float(np.linalg.det(J))
    scale = float(np.max(np.abs(J)))
    if scale == 0.0 or abs(det) < scale**2 / cond_limit:
        raise SingularJacobian(f"d p'/d v is singular at v = {v.tolist()}")
    return JacobiBlock(np.linalg.inv(J), 4.0 * r**3 * det, J)


def closed_form_inverse_jacobian(v, conv: Convention = DEFAULT) -> tuple[np.ndarray, float]:
    """The closed-form inverse block (prefactor 2 L^3 / Delta times M) and Delta = det M.

    Written for the default orientation eps_12 = +1; other orientations flip
    the overall sign.
    """
    v = as_vec(v, 2)
    g1, g2, e = _consts(conv)
    v1, v2 = v
    low1, low2 = g1 * v1, g2 * v2
    r = _radicand(v1, v2, g1, g2)
    M = np.array(
        [
            [low2 * v1 * (3 + 3 * low2 * v2 + 2 * low1 * v1) / (1 + low2 * v2) ** 2, -1.0],
            [1.0, -low1 * v2 * (3 + 3 * low1 * v1 + 2 * low2 * v2) / (1 + low1 * v1) ** 2],
        ]
    )
    delta = float(np.linalg.det(M))
    if abs(delta) < 1e-14:
        raise SingularJacobian("Delta vanishes")
    return e * 2.0 * r**1.5 / delta * M, delta


def contact_kernel_residual(v, vp, mu: float, conv: Convention = DEFAULT) -> float:
    """max | -dH/dp' + 4 L^3 / Delta * (dp'/dt) | along the holonomic direction.

    dH/dp' is taken through v(p') at fixed p, i.e. (dH/dv) (dv/dp'), and
    dp'/dt = (dp'/dv) v'.
    """
    v = as_vec(v, 2)
    vp = as_vec(vp, 2)
    g1, g2, e = _consts(conv)
    r = _radicand(v[0], v[1], g1, g2)
    block = jacobi_block(v, conv)
    p, _ = momenta(v, vp, mu, conv)
    L = math.sqrt(r)
    # H(p, v) = p_a v^a + mu L  at fixed p
    dH_dv = p + mu * np.array([g1 * v[0], g2 * v[1]]) / L
    dH_dpp = dH_dv @ block.dv_dpp
    dpp_dt = block.dpp_dv @ vp
    star_dpp = np.array(_star(dpp_dt[0], dpp_dt[1], e))
    return float(np.max(np.abs(-dH_dpp + 4.0 * r**1.5 / block.delta * star_dpp)))


def _newton(pp_target, guess, g1, g2, e, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER):
    v = np.array(guess, dtype=float)

    def resid(w):
        a, b = _pp(w[0], w[1], g1, g2, e)
        return np.array([a - pp_target[0], b - pp_target[1]])

    try:
        F = resid(v)
    except (SuperluminalVelocity, DegenerateDenominator) as exc:
        raise NewtonDivergence("Newton seed is not admissible") from exc
    norm = float(np.max(np.abs(F)))
    for _ in range(maxiter):
        if norm < tol:
            return v
        J = _dpp_dv(v[0], v[1], g1, g2, e)
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence("singular Jacobian in Newton iteration") from exc
        lam = 1.0
        while True:
            trial = v - lam * step
            try:
                F_trial = resid(trial)
                trial_norm = float(np.max(np.abs(F_trial)))
            except (SuperluminalVelocity, DegenerateDenominator):
                trial_norm = math.inf
            if trial_norm < norm or lam < 1e-10:
                break
            lam *= 0.5
        if not math.isfinite(trial_norm):
            raise NewtonDivergence("Newton step left the admissible region")
        v, F, norm = trial, F_trial, trial_norm
    if norm < tol:
        return v
    raise NewtonDivergence(f"Newton did not converge: |F| = {norm:.3g}")


def inverse_legendre(p, pp, mu: float, conv: Convention = DEFAULT, guess=None) -> tuple[np.ndarray, np.ndarray]:
    """(v, v') from (p, p').

    v solves p'(v) = pp by damped Newton started from the small-velocity
    inverse (or ``guess``); v' then follows from p linearly.
    """
    p = as_vec(p, 2)
    pp = as_vec(pp, 2)
    g1, g2, e = _consts(conv)
    seeds = [guess] if guess is not None else _seeds(pp, g1, g2, e)
    last_error: Exception | None = None
    for seed in seeds:
        try:
            v = _newton(pp, seed, g1, g2, e)
            break
        except NewtonDivergence as exc:
            last_error = exc
    else:
        raise NewtonDivergence(f"no preimage of p' = {pp.tolist()} found") from last_error
    vp = np.array(_vp_from_p(p[0], p[1], v[0], v[1], mu, g1, g2, e))
    return v, vp


def _admissible(v1, v2, g1, g2) -> bool:
    r = 1.0 + g1 * v1 * v1 + g2 * v2 * v2
    return r > 0.0 and abs(r - g1 * v1 * v1) > 1e-14 and abs(r - g2 * v2 * v2) > 1e-14


def _seeds(pp, g1, g2, e) -> list:
    """Starting points for Newton: the small-velocity inverse first.

    p' ~ (e v^2, -e v^1) / 2 near v = 0.  When that guess is not subluminal
    it is pulled back along its ray to where |p'| matches, and a ring of
    further seeds covers the region beyond the fold of the map.
    """
    lin = np.array([-2.0 * e * pp[1], 2.0 * e * pp[0]])
    seeds = []
    if _admissible(lin[0], lin[1], g1, g2):
        seeds.append(lin)
    norm = float(np.hypot(*lin))
    if norm > 0.0:
        direction = lin / norm
        target = float(np.hypot(*pp))
        lo, hi = 0.0, 0.999999
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            try:
                size = float(np.hypot(*_pp(*(mid * direction), g1, g2, e)))
            except (SuperluminalVelocity, DegenerateDenominator):
                size = math.inf
            if size < target:
                lo = mid
            else:
                hi = mid
        seeds.append(lo * direction)
        for radius in (0.5, 0.8, 0.9, 0.95):
            for angle in np.linspace(0.0, 2 * np.pi, 8, endpoint=False):
                seeds.append(radius * np.array([np.cos(angle), np.sin(angle)]))
    else:
        seeds.append(np.zeros(2))
    return seeds


def legendre_roundtrip_error(v, vp, mu: float, conv: Convention = DEFAULT) -> float:
    """Momentum-space roundtrip |momenta(inverse_legendre(momenta(v, v'))) - momenta(v, v')|."""
    p, pp = momenta(v, vp, mu, conv)
    v2, vp2 = inverse_legendre(p, pp, mu, conv)
    p2, pp2 = momenta(v2, vp2, mu, conv)
    return float(max(np.max(np.abs(p2 - p)), np.max(np.abs(pp2 - pp))))


@dataclass
class CanonicalTrajectory:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    pp: np.ndarray
    v: np.ndarray
    vp: np.ndarray
    H: np.ndarray
    mu: float
    step: float
    convention: Convention = DEFAULT

    def __len__(self) -> int:
        return self.t.size

    def __getitem__(self, i: int) -> CanonicalState:
        return CanonicalState(self.t[i], self.x[i], self.p[i], self.pp[i])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for i in range(len(self)):
                row = (self.t[i], *self.x[i], *self.p[i], *self.pp[i], self.H[i])
                writer.writerow([repr(float(val)) for val in row])

    def manifest(self) -> dict:
        return {
            "initial": {"x": self.x[0].tolist(), "p": self.p[0].tolist(), "pp": self.pp[0].tolist()},
            "t_span": [float(self.t[0]), float(self.t[-1])],
            "mu": self.mu,
            "method": "rk4-canonical",
            "step": self.step,
            "convention": json.loads(self.convention.to_json()),
            "samples": len(self),
        }

    def write_manifest(self, path) -> None:
        Path(path).write_text(json.dumps(self.manifest(), indent=2, sort_keys=True))


def canonical_flow(
    state0: CanonicalState,
    mu: float,
    t_span=(0.0, 10.0),
    step: float = 1e-3,
    conv: Convention = DEFAULT,
    v_guess=None,
) -> CanonicalTrajectory:
    """RK4 on (x, p') with p held constant.

    At every stage v comes from p' by Newton (warm-started from the previous
    stage) and v' from p, then dx/dt = v and dp'/dt = (dp'/dv) v'.
    """
    g1, g2, e = _consts(conv)
    p1, p2 = float(state0.p[0]), float(state0.p[1])
    t = time_grid((state0.t, t_span[1]) if t_span is None else t_span, step)
    last = {"v": None}
    first_v, _ = inverse_legendre(state0.p, state0.pp, mu, conv, guess=v_guess)
    last["v"] = first_v

    def reconstruct(pp):
        v = _newton(pp, last["v"], g1, g2, e)
        last["v"] = v
        vp = _vp_from_p(p1, p2, v[0], v[1], mu, g1, g2, e)
        return v, vp

    def rhs(_t, y):
        v, vp = reconstruct(y[2:4])
        J = _dpp_dv(v[0], v[1], g1, g2, e)
        return np.array([v[0], v[1], J[0, 0] * vp[0] + J[0, 1] * vp[1], J[1, 0] * vp[0] + J[1, 1] * vp[1]])

    y0 = np.concatenate([state0.x, state0.pp])
    ys = _rk4(rhs, y0, t)
    n = t.size
    v = np.empty((n, 2))
    vp = np.empty((n, 2))
    H = np.empty(n)
    last["v"] = first_v
    for i in range(n):
        vi, vpi = reconstruct(ys[i, 2:4])
        v[i], vp[i] = vi, vpi
        H[i] = p1 * vi[0] + p2 * vi[1] + mu * math.sqrt(_radicand(vi[0], vi[1], g1, g2))
    p = np.tile([p1, p2], (n, 1))
    return CanonicalTrajectory(t, ys[:, 0:2], p, ys[:, 2:4], v, vp, H, mu, float(t[1] - t[0]), conv)
