"""Spin tensor, Pirani condition and the Dixon momentum of the planar
spinning particle, plus the coincidence of that momentum with the canonical
one.

Space-time vectors are contravariant, spin tensors carry upper indices.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .equation import ProperJet, ProperTrajectory
from .errors import NotSkew, SuperluminalVelocity, ZeroMu, ZeroSpin
from .hamiltonian import momenta
from .minkowski import (
    DEFAULT,
    Convention,
    as_vec,
    cross3,
    hodge_star_spatial,
    levi_civita3,
    levi_civita3_upper,
    lower,
    metric_dot,
    raise_index,
)


@dataclass(frozen=True)
class SpinState:
    m0: float
    s3: float
    S: np.ndarray
    a: np.ndarray


@dataclass(frozen=True)
class DixonMomentum:
    P: np.ndarray  # planar three-vector part
    P3: np.ndarray  # embedded space-time vector


def _check_skew(S: np.ndarray, tol: float = 1e-12) -> None:
    if S.shape != (3, 3):
        raise NotSkew(f"spin tensor must be 3x3, got {S.shape}")
    scale = max(1.0, float(np.max(np.abs(S))))
    if np.max(np.abs(S + S.T)) > tol * scale:
        raise NotSkew("spin tensor is not antisymmetric")


def dual_spin(S, conv: Convention = DEFAULT) -> np.ndarray:
    """a_mu = 1/2 eps_{nu lambda mu} S^{nu lambda}, returned raised."""
    S = np.asarray(S, dtype=float)
    _check_skew(S)
    a_low = 0.5 * np.einsum("nlm,nl->m", levi_civita3(conv), S)
    return raise_index(a_low, conv)


def _undual_raw(a, conv: Convention) -> np.ndarray:
    return np.einsum("nlk,k->nl", levi_civita3_upper(conv), lower(a, conv))


@lru_cache(maxsize=8)
def _undual_norm(conv: Convention) -> float:
    # fixed by requiring dual(undual(a)) = a on a probe vector
    probe = np.array([0.7, -0.2, 0.4])
    back = dual_spin(_undual_raw(probe, conv), conv)
    return float(np.dot(probe, probe) / np.dot(back, probe))


def undual_spin(a, conv: Convention = DEFAULT) -> np.ndarray:
    """Skew S^{nu lambda} with dual_spin(S) = a."""
    a = as_vec(a, 3)
    return _undual_norm(conv) * _undual_raw(a, conv)


def pirani_check(S, u, conv: Convention = DEFAULT) -> float:
    """max(|u_nu S^{mu nu}|, |a x u|) with a the dual of S."""
    S = np.asarray(S, dtype=float)
    u = as_vec(u, 3)
    contraction = S @ lower(u, conv)
    a = dual_spin(S, conv)
    return float(max(np.max(np.abs(contraction)), np.max(np.abs(cross3(a, u, conv)))))


def mass_renormalization(m0: float, s3: float) -> float:
    if s3 == 0:
        raise ZeroSpin("spin magnitude must be nonzero")
    return m0 / s3


def pirani_spin_from_motion(pjet: ProperJet, m0: float, mu: float, conv: Convention = DEFAULT) -> SpinState:
    """Spin fixed by the Pirani condition: a = -(m0 / mu) u."""
    if mu == 0:
        raise ZeroMu("mu must be nonzero to build the Pirani spin")
    a = -(m0 / mu) * pjet.u
    S = undual_spin(a, conv)
    s3 = -float(metric_dot(a, pjet.u, conv))
    return SpinState(m0, s3, S, a)


def decomposition_residual(a, u, conv: Convention = DEFAULT) -> float:
    """|a - (a.u) u + (a x u) x u| for unit timelike u."""
    a = as_vec(a, 3)
    u = as_vec(u, 3)
    rebuilt = metric_dot(a, u, conv) * u - cross3(cross3(a, u, conv), u, conv)
    return float(np.max(np.abs(a - rebuilt)))


def mathisson_residual(pjet: ProperJet, spin: SpinState, conv: Convention = DEFAULT) -> np.ndarray:
    """m0 u' + a x u'' (the free planar equation written with the dual vector)."""
    return spin.m0 * pjet.ud + cross3(spin.a, pjet.udd, conv)


def dixon_momentum(v, vp, m0: float, s3: float, conv: Convention = DEFAULT) -> DixonMomentum:
    """P = m0 v / L - sgn_g s3 (*v') / L^3 in the time parametrization.

    The embedded vector is m0 u / |u| - sgn_g s3 (u' x u) / |u|^3 with
    u = (1, v), u' = (0, v'); its spatial part is checked to equal P.
    """
    v = as_vec(v, 2)
    vp = as_vec(vp, 2)
    r = 1.0 + float(metric_dot(v, v, conv))
    if r <= 0:
        raise SuperluminalVelocity(f"1 + v.v = {r:.3g} <= 0")
    L = np.sqrt(r)
    P = m0 * v / L - conv.sgn_g * s3 * hodge_star_spatial(vp, conv) / r**1.5
    u = np.concatenate([[1.0], v])
    ud = np.concatenate([[0.0], vp])
    P3 = m0 * u / L - conv.sgn_g * s3 * cross3(ud, u, conv) / r**1.5
    return DixonMomentum(P, P3)


def embedded_momentum(pjet: ProperJet, m0: float, s3: float, conv: Convention = DEFAULT) -> np.ndarray:
    """Resolved momentum for unit u: m0 u - sgn_g s3 (u' x u)."""
    return m0 * pjet.u - conv.sgn_g * s3 * cross3(pjet.ud, pjet.u, conv)


def momentum_coincidence(
    v, vp, m0: float, s3: float, conv: Convention = DEFAULT, sigma: int | None = None
) -> float:
    """max |P - sigma s3 p| with p the canonical momentum at mu = m0 / s3."""
    mu = mass_renormalization(m0, s3)
    if sigma is None:
        sigma = SIGMA
    P = dixon_momentum(v, vp, m0, s3, conv).P
    p, _ = momenta(v, vp, mu, conv)
    return float(np.max(np.abs(P - sigma * s3 * p)))


# global sign of the coincidence; confirmed by calibrate_spin_signs
SIGMA = 1


def calibrate_spin_signs(
    conv: Convention = DEFAULT, samples: int = 50, seed: int = 0, tol: float = 1e-10
) -> list[tuple[int, int]]:
    """All (sigma, sgn_g) pairs for which P = sigma s3 p holds on random samples."""
    rng = np.random.default_rng(seed)
    data = []
    for _ in range(samples):
        radius = 0.9 * np.sqrt(rng.uniform())
        angle = rng.uniform(0, 2 * np.pi)
        v = radius * np.array([np.cos(angle), np.sin(angle)])
        data.append((v, rng.uniform(-1, 1, 2), rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0) * rng.choice([-1, 1])))
    closing = []
    for sigma, sgn_g in itertools.product((1, -1), (1, -1)):
        trial = conv.replace(sgn_g=sgn_g)
        worst = max(momentum_coincidence(v, vp, m0, s3, trial, sigma) for v, vp, m0, s3 in data)
        if worst < tol:
            closing.append((sigma, sgn_g))
    return closing


def _central4(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central first derivative on interior points (2 lost at each end)."""
    return (-values[4:] + 8 * values[3:-1] - 8 * values[1:-3] + values[:-4]) / (12 * h)


def dixon_residuals(
    ptraj: ProperTrajectory, m0: float, mu: float, conv: Convention = DEFAULT
) -> tuple[float, float]:
    """(momentum drift, spin-law residual) along a proper-time trajectory.

    The trajectory must come from a uniform time grid (event times in
    ``ptraj.x[:, 0]``); tau-derivatives are time derivatives divided by
    d tau / dt = 1 / u^0.  The free force vanishes, so the force constraint
    holds trivially.
    """
    s3 = m0 / mu if mu != 0 else 0.0
    n = len(ptraj)
    if n < 5:
        raise ValueError("need at least 5 samples for central differences")
    P = np.array([embedded_momentum(pj, m0, s3, conv) for pj in ptraj])
    drift = float(np.max(np.abs(P - P[0])))
    times = ptraj.x[:, 0]
    h = float(times[1] - times[0])
    if not np.allclose(np.diff(times), h, rtol=1e-9, atol=1e-12):
        raise ValueError("dixon_residuals needs a uniform time grid")
    if mu == 0:
        raise ZeroMu("mu must be nonzero to build the Pirani spin")
    S = np.array([undual_spin(-(m0 / mu) * u, conv) for u in ptraj.u])
    dS_dt = _central4(S, h)
    dS_dtau = dS_dt * ptraj.u[2:-2, 0][:, None, None]
    Pi, ui = P[2:-2], ptraj.u[2:-2]
    wedge = np.einsum("ni,nj->nij", Pi, ui) - np.einsum("ni,nj->nij", ui, Pi)
    spin_law = float(np.max(np.abs(dS_dtau - wedge)))
    return drift, spin_law


def force_constraint(ptraj: ProperTrajectory) -> float:
    """F.u for the free particle (F = 0)."""
    return 0.0


# the normal-axis component of the four-dimensional split

_G4 = np.diag([1.0, -1.0, -1.0, -1.0])


def _levi_civita4_upper(conv: Convention) -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for i, j in itertools.combinations(perm, 2) if i > j)
        eps[perm] = conv.eps3 * (-1) ** inversions
    # raising four indices of the Minkowski metric multiplies by det g = -1
    return -eps


def embed_spin_4d(u, s3: float, conv: Convention = DEFAULT) -> np.ndarray:
    """Pirani spin tensor in four dimensions for planar u and spin along the normal axis."""
    u4 = np.concatenate([as_vec(u, 3), [0.0]])
    # sign chosen so that the planar block equals undual_spin(-s3 u)
    s_low = np.array([0.0, 0.0, 0.0, s3])
    norm = np.sqrt(float(u4 @ _G4 @ u4))
    return np.einsum("pqmn,m,n->pq", _levi_civita4_upper(conv), _G4 @ u4, s_low) / norm


def normal_axis_residual(pjet: ProperJet, s3: float, conv: Convention = DEFAULT) -> float:
    """|S_{3 mu} u''^mu| with the four-dimensional Pirani spin."""
    S4 = embed_spin_4d(pjet.u, s3, conv)
    S4_low = _G4 @ S4 @ _G4
    udd4 = np.concatenate([pjet.udd, [0.0]])
    return float(abs(S4_low[3] @ udd4))


def report(checks: dict[str, float], samples: int, conv: Convention = DEFAULT) -> str:
    rows = [
        {"check": name, "max_residual": value, "samples": samples, "sigma": SIGMA, "sgn_g": conv.sgn_g}
        for name, value in checks.items()
    ]
    return json.dumps(rows, indent=2)
