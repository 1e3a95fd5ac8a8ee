"""Helmholtz-type variationality test for planar third-order systems

    A v'' + (v'.d_v)A v' + B v' + c = 0,

with A skew and A, B, c fields over (t, x, v).  All derivatives are taken
numerically, so the checker works for any coefficient field.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DerivativeNoise
from .fdiff import line_derivative
from .minkowski import DEFAULT, Convention, levi_civita2, lorentz_factor, metric_dot

MatrixField = Callable[[float, np.ndarray, np.ndarray], np.ndarray]
VectorField = Callable[[float, np.ndarray, np.ndarray], np.ndarray]

CONDITIONS = ("i", "ii", "iii", "iv", "v", "vi")

# steps per power of D1; nested differences need larger outer steps
D1_STEPS = {1: 1e-3, 2: 1e-2, 3: 2e-2}
LEVELS = 2


@dataclass(frozen=True)
class CoefficientField:
    A: MatrixField
    B: MatrixField
    c: VectorField
    fd_step: float = 1e-3
    name: str = "custom"
    meta: dict = field(default_factory=dict, compare=False)

    def k(self, t: float, x, v, vp) -> np.ndarray:
        """k = (v'.d_v)A v' + B v' + c."""
        x, v, vp = (np.asarray(a, dtype=float) for a in (x, v, vp))
        return self.dA(t, x, v, vp) @ vp + self.B(t, x, v) @ vp + self.c(t, x, v)

    def dA(self, t: float, x, v, direction) -> np.ndarray:
        """Directional v-derivative of A."""
        x, v, direction = (np.asarray(a, dtype=float) for a in (x, v, direction))
        return line_derivative(lambda s: self.A(t, x, v + s * direction), 1, self.fd_step, LEVELS)

    def assemble(self, t: float, x, v, vp, vpp) -> np.ndarray:
        """Left side of the third-order system at a jet."""
        vpp = np.asarray(vpp, dtype=float)
        return self.A(t, np.asarray(x, float), np.asarray(v, float)) @ vpp + self.k(t, x, v, vp)


def free_coefficients(mu: float, conv: Convention = DEFAULT, a_power: float = 1.5) -> CoefficientField:
    """Coefficients of the invariant equation.

    A_ab = eps_ab / (1 + v.v)^(3/2), B_ab = -mu (1 + v.v)^(-3/2) [v_a v_b - (1 + v.v) g_ab], c = 0.
    ``a_power`` replaces the 3/2 in A and exists only for mutation testing.
    """
    eps = levi_civita2(conv)
    g = np.diag(conv.g2)

    def A(t, x, v):
        lorentz_factor(v, conv)
        return eps / (1.0 + metric_dot(v, v, conv)) ** a_power

    def B(t, x, v):
        r = 1.0 + metric_dot(v, v, conv)
        v_low = conv.g2 * v
        return -mu * r**-1.5 * (np.outer(v_low, v_low) - r * g)

    def c(t, x, v):
        return np.zeros(2)

    return CoefficientField(A, B, c, name="free", meta={"mu": mu, "a_power": a_power})


def d1_apply(f: Callable, point, v=None, power: int = 1, h: float | None = None) -> np.ndarray:
    """(d_t + v.d_x)^power f at point = (t, x, v).

    D1 moves along the line (t + s, x + s v) at fixed v, so its powers are
    ordinary derivatives along that line.  ``v`` overrides the velocity of
    the point when given.
    """
    t, x, pv = point
    x = np.asarray(x, dtype=float)
    v = np.asarray(pv if v is None else v, dtype=float)
    if power == 0:
        return np.asarray(f(t, x, v))
    step = D1_STEPS[power] if h is None else h
    return line_derivative(lambda s: f(t + s, x + s * v, v), power, step, LEVELS)


def _grad(f: Callable, t, x, v, wrt: str, h: float) -> np.ndarray:
    """Stack of partials with the differentiation index first."""
    out = []
    for e in np.eye(2):
        if wrt == "v":
            out.append(line_derivative(lambda s: f(t, x, v + s * e), 1, h, LEVELS))
        else:
            out.append(line_derivative(lambda s: f(t, x + s * e, v), 1, h, LEVELS))
    return np.stack(out)


def _skew(m):
    return 0.5 * (m - np.swapaxes(m, -1, -2))


def _sym(m):
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def _alternate3(T: np.ndarray) -> np.ndarray:
    out = np.zeros_like(T)
    for perm in itertools.permutations(range(3)):
        inversions = sum(1 for i, j in itertools.combinations(perm, 2) if i > j)
        out += (-1) ** inversions * np.transpose(T, perm)
    return out / 6.0


def helmholtz_terms(cf: CoefficientField, sample, conv: Convention = DEFAULT) -> dict[str, np.ndarray]:
    """Left sides of the six conditions as index arrays (first index = a)."""
    t, x, v = sample
    t = float(t)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    h = cf.fd_step
    lorentz_factor(v, conv)

    def d1(f, power=1):
        return d1_apply(f, (t, x, v), power=power)

    def dvA(tt, xx, vv):
        return _grad(cf.A, tt, xx, vv, "v", h)  # [c, a, b] = d_{v^c} A_ab

    dA_v = dvA(t, x, v)
    dA_x = _grad(cf.A, t, x, v, "x", h)
    dBskew_v = _grad(lambda *p: _skew(cf.B(*p)), t, x, v, "v", h)
    dBskew_x = _grad(lambda *p: _skew(cf.B(*p)), t, x, v, "x", h)
    dc_v = _grad(cf.c, t, x, v, "v", h)  # [a, b] = d_{v^a} c_b
    dc_x = _grad(cf.c, t, x, v, "x", h)
    ddc_v = _grad(lambda *p: _grad(cf.c, *p, "v", h), t, x, v, "v", 10 * h)  # [c, a, b]
    d1_dvA = d1(dvA)
    d1_sq_dvA = d1(dvA, 2)

    # (i) alternated over all three indices
    t_i = _alternate3(dA_v)
    # (ii) [a, b]
    t_ii = 2 * _skew(cf.B(t, x, v)) - 3 * d1(cf.A)
    # (iii) [a, b, c]
    t_iii = (
        2 * dBskew_v
        - 4 * dA_x
        + np.einsum("cab->abc", dA_x)
        + 2 * np.einsum("cab->abc", d1_dvA)
    )
    # (iv) [a, b]
    t_iv = dc_v - _sym(d1(cf.B))
    # (v) [a, b, c]
    t_v = (
        2 * np.einsum("cab->abc", ddc_v)
        - 4 * dBskew_x
        + np.einsum("cab->abc", d1_sq_dvA)
        + 6 * d1(lambda *p: _grad(cf.A, *p, "x", h))
    )
    # (vi) [a, b]
    t_vi = 4 * dc_x - 2 * d1(lambda *p: _grad(cf.c, *p, "v", h)) - d1(cf.A, 3)
    return dict(zip(CONDITIONS, (t_i, t_ii, t_iii, t_iv, t_v, t_vi)))


def helmholtz_residuals(cf: CoefficientField, sample, conv: Convention = DEFAULT) -> dict[str, float]:
    """Max-norm residual of each condition (i)-(vi) at a sample (t, x, v)."""
    terms = helmholtz_terms(cf, sample, conv)
    out = {}
    for name, arr in terms.items():
        value = float(np.max(np.abs(arr)))
        if not np.isfinite(value):
            raise DerivativeNoise(f"non-finite derivative in condition ({name})")
        out[name] = value
    return out


# mutations used to show that the checker is sensitive


def mutate(cf: CoefficientField, kind: str, amount: float = 0.5, conv: Convention = DEFAULT) -> CoefficientField:
    """Non-variational (or deliberately altered) copies of a coefficient field.

    kinds:
      skew_b     B + amount * eps          violates (ii)
      linear_c   c = amount * v            violates (iv)
      time_a     A * (1 + amount * t)      violates (ii) and (iii)
      a_power    exponent of A set to 1    (still variational; kept as a control)
    """
    eps = levi_civita2(conv)
    if kind == "skew_b":
        return CoefficientField(cf.A, lambda t, x, v: cf.B(t, x, v) + amount * eps, cf.c, cf.fd_step, f"{cf.name}+skew_b")
    if kind == "linear_c":
        return CoefficientField(cf.A, cf.B, lambda t, x, v: cf.c(t, x, v) + amount * np.asarray(v, float), cf.fd_step, f"{cf.name}+linear_c")
    if kind == "time_a":
        return CoefficientField(lambda t, x, v: (1.0 + amount * t) * cf.A(t, x, v), cf.B, cf.c, cf.fd_step, f"{cf.name}+time_a")
    if kind == "a_power":
        mu = cf.meta.get("mu", 1.0)
        base = free_coefficients(mu, conv, a_power=1.0)
        return CoefficientField(base.A, cf.B, cf.c, cf.fd_step, f"{cf.name}+a_power")
    raise ValueError(f"unknown mutation {kind!r}")


MUTATIONS = ("skew_b", "linear_c", "time_a")


def report(cf: CoefficientField, samples, conv: Convention = DEFAULT) -> list[dict]:
    rows = []
    for sample in samples:
        t, x, v = sample
        res = helmholtz_residuals(cf, sample, conv)
        for name in CONDITIONS:
            rows.append(
                {
                    "condition": name,
                    "sample": {"t": float(t), "x": np.asarray(x, float).tolist(), "v": np.asarray(v, float).tolist()},
                    "residual": res[name],
                }
            )
    return rows


def report_json(cf: CoefficientField, samples, conv: Convention = DEFAULT) -> str:
    return json.dumps(report(cf, samples, conv), indent=2)
