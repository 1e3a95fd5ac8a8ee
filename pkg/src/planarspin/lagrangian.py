"""The two second-order Lagrangians of the equation, their mean, and a
numeric Euler-Poisson operator for Lagrangians depending on (v, v')."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .equation import Jet
from .errors import DegenerateDenominator, SuperluminalVelocity
from .fdiff import line_derivative
from .minkowski import DEFAULT, Convention, bivector_inner, metric_dot, wedge_scalar

LagrangianFn = Callable[[np.ndarray, np.ndarray], float]

# partials by Richardson-extrapolated central differences, total derivatives
# by differentiating along the Taylor curve of the jet
PARTIAL_STEP = 1e-3
CURVE_STEP = 1e-2
LEVELS = 2


@dataclass(frozen=True)
class LagrangianSpec:
    which: Literal["L1", "L2", "mean"] = "mean"
    mu: float = 1.0


def _single(a: int, mu: float, v: np.ndarray, vp: np.ndarray, conv: Convention) -> float:
    radicand = 1.0 + metric_dot(v, v, conv)
    if radicand <= 0.0:
        raise SuperluminalVelocity(f"1 + v.v = {radicand:.3g} <= 0")
    e = np.zeros(2)
    e[a] = 1.0
    g_aa = conv.g2[a]
    denom = 1.0 + g_aa * bivector_inner(v, e, v, e, conv)
    if abs(denom) < 1e-14:
        raise DegenerateDenominator(f"1 + g_aa |v ^ e_a|^2 vanishes for a = {a + 1}")
    sqrt_r = np.sqrt(radicand)
    return float(wedge_scalar(vp, e, conv) / (sqrt_r * denom) * v[a] - mu * sqrt_r)


def eval_L(spec: LagrangianSpec, v, vp, conv: Convention = DEFAULT) -> float:
    v = np.asarray(v, dtype=float)
    vp = np.asarray(vp, dtype=float)
    if spec.which == "L1":
        return _single(0, spec.mu, v, vp, conv)
    if spec.which == "L2":
        return _single(1, spec.mu, v, vp, conv)
    if spec.which == "mean":
        return 0.5 * (_single(0, spec.mu, v, vp, conv) + _single(1, spec.mu, v, vp, conv))
    raise ValueError(f"unknown Lagrangian {spec.which!r}")


def as_function(spec: LagrangianSpec, conv: Convention = DEFAULT) -> LagrangianFn:
    return lambda v, vp: eval_L(spec, v, vp, conv)


def _resolve(lagr, conv: Convention) -> LagrangianFn:
    return as_function(lagr, conv) if isinstance(lagr, LagrangianSpec) else lagr


def partial_v(lagr: LagrangianFn, v, vp) -> np.ndarray:
    v = np.asarray(v, float)
    vp = np.asarray(vp, float)
    return np.array(
        [line_derivative(lambda s: lagr(v + s * e, vp), 1, PARTIAL_STEP, LEVELS) for e in np.eye(2)]
    )


def partial_vp(lagr: LagrangianFn, v, vp) -> np.ndarray:
    v = np.asarray(v, float)
    vp = np.asarray(vp, float)
    return np.array(
        [line_derivative(lambda s: lagr(v, vp + s * e), 1, PARTIAL_STEP, LEVELS) for e in np.eye(2)]
    )


def _jet_curve(jet: Jet):
    vpp = jet.vpp if jet.vpp is not None else np.zeros(2)
    vppp = jet.vppp if jet.vppp is not None else np.zeros(2)

    def at(s: float):
        v = jet.v + jet.vp * s + vpp * s**2 / 2 + vppp * s**3 / 6
        vp = jet.vp + vpp * s + vppp * s**2 / 2
        return v, vp

    return at


def total_derivative(fn: Callable[[np.ndarray, np.ndarray], np.ndarray], jet: Jet, order: int = 1) -> np.ndarray:
    """D_t^order of a function of (v, v') evaluated through the jet."""
    curve = _jet_curve(jet)
    return line_derivative(lambda s: fn(*curve(s)), order, CURVE_STEP, LEVELS)


def euler_poisson_operator(lagr, jet: Jet, conv: Convention = DEFAULT) -> np.ndarray:
    """E_a = -D(dL/dv^a) + D^2(dL/dv'^a) for an autonomous L(v, v')."""
    fn = _resolve(lagr, conv)
    first = total_derivative(lambda v, vp: partial_v(fn, v, vp), jet, 1)
    second = total_derivative(lambda v, vp: partial_vp(fn, v, vp), jet, 2)
    return -first + second


def momenta_from_lagrangian(lagr, jet: Jet, conv: Convention = DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """Ostrogradsky momenta p = dL/dv - D dL/dv', p' = dL/dv'."""
    fn = _resolve(lagr, conv)
    pp = partial_vp(fn, jet.v, jet.vp)
    p = partial_v(fn, jet.v, jet.vp) - total_derivative(lambda v, vp: partial_vp(fn, v, vp), jet, 1)
    return p, pp


def gauge_function(v, conv: Convention = DEFAULT) -> float:
    v = np.asarray(v, dtype=float)
    radicand = 1.0 + metric_dot(v, v, conv)
    if radicand <= 0.0:
        raise SuperluminalVelocity(f"1 + v.v = {radicand:.3g} <= 0")
    return float(np.arctan(v[0] * v[1] / np.sqrt(radicand)))


def gauge_difference_check(v, vp, conv: Convention = DEFAULT) -> float:
    """|(L2 - L1) - D_t arctan(v1 v2 / sqrt(1 + v.v))| at (v, v')."""
    v = np.asarray(v, dtype=float)
    vp = np.asarray(vp, dtype=float)
    lhs = _single(1, 0.0, v, vp, conv) - _single(0, 0.0, v, vp, conv)
    # the gauge function depends on v only, so D_t is the derivative along v'
    rhs = line_derivative(lambda s: gauge_function(v + s * vp, conv), 1, PARTIAL_STEP, LEVELS)
    return float(abs(lhs - rhs))


def calibrate_ep_sign(mu: float = 1.0, conv: Convention = DEFAULT, seed: int = 0, samples: int = 5) -> int:
    """Global sign s with EP(L) = s * residual, decided on a few random jets."""
    from .equation import residual_ep  # local: equation does not depend on this module

    rng = np.random.default_rng(seed)
    votes = []
    for _ in range(samples):
        v = rng.uniform(-0.5, 0.5, 2)
        jet = Jet(0.0, np.zeros(2), v, rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2))
        ep = euler_poisson_operator(LagrangianSpec("L1", mu), jet, conv)
        res = residual_ep(jet, mu, conv)
        votes.append(int(np.sign(np.dot(ep, res))))
    if len(set(votes)) != 1:
        raise RuntimeError("Euler-Poisson operator is not proportional to the residual")
    return votes[0]
