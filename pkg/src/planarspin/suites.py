"""Seeded verification suites.

Every suite returns a list of check records

    {"suite", "check", "value", "tolerance", "bound", "passed", "samples", ...}

``bound`` is ``"upper"`` when the value must stay below the tolerance and
``"lower"`` for mutation controls that must exceed it.  Records contain no
timings, so a fixed seed gives byte-identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import hamiltonian as ham
from . import lagrangian as lag
from . import spin as sp
from . import symmetry as sym
from . import variationality as var
from .equation import (
    Jet,
    Trajectory,
    calibrate_orientation,
    curvature_stack,
    integrate_worldline,
    relative_drift,
    residual_ep,
    residual_proper_stack,
    solve_jerk,
    to_proper_time,
)
from .errors import SuperluminalVelocity
from .minkowski import DEFAULT, Convention, metric_dot

SUITES = ("equation", "helmholtz", "symmetry", "lagrangian", "hamiltonian", "spin")


@dataclass
class SuiteContext:
    mu: float = 1.0
    m0: float = 1.0
    s3: float = 1.0
    x0: np.ndarray = field(default_factory=lambda: np.zeros(2))
    v0: np.ndarray = field(default_factory=lambda: np.array([0.3, 0.0]))
    vp0: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.4]))
    t_span: tuple = (0.0, 10.0)
    step: float = 1e-3
    method: str = "rk4"
    conv: Convention = DEFAULT
    seed: int = 0
    mutation: str | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def trajectory(self) -> Trajectory:
        if "traj" not in self._cache:
            self._cache["traj"] = integrate_worldline(
                self.x0, self.v0, self.vp0, self.mu, self.t_span, self.step, self.method, self.conv
            )
        return self._cache["traj"]


def sample_velocity(rng: np.random.Generator, vmax: float = 0.9) -> np.ndarray:
    """Uniform on the disk |v| <= vmax."""
    radius = vmax * np.sqrt(rng.uniform())
    angle = rng.uniform(0.0, 2 * np.pi)
    return radius * np.array([np.cos(angle), np.sin(angle)])


def sample_vp(rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, 2)


def _record(suite, check, value, tol, samples, bound="upper", **extra) -> dict:
    value = float(value)
    passed = value < tol if bound == "upper" else value > tol
    rec = {
        "suite": suite,
        "check": check,
        "value": value,
        "tolerance": tol,
        "bound": bound,
        "passed": bool(passed),
        "samples": int(samples),
    }
    rec.update(extra)
    return rec


def _flag(suite, check, ok: bool, samples, **extra) -> dict:
    return _record(suite, check, 0.0 if ok else 1.0, 0.5, samples, **extra)


# suites


def suite_equation(ctx: SuiteContext) -> list[dict]:
    name = "equation"
    conv, mu = ctx.conv, ctx.mu
    rng = ctx.rng(1)
    out = []
    worst = 0.0
    n = 1000
    for _ in range(n):
        v, vp, m = sample_velocity(rng), sample_vp(rng), rng.uniform(-2, 2)
        jet = Jet(0.0, np.zeros(2), v, vp, solve_jerk(v, vp, m, conv))
        worst = max(worst, float(np.max(np.abs(residual_ep(jet, m, conv)))))
    out.append(_record(name, "solve_jerk_roundtrip", worst, 1e-12, n))

    traj = ctx.trajectory()
    res_ep = np.max(np.abs(residual_ep_stack(traj, conv)))
    out.append(_record(name, "residual_along_trajectory", res_ep, 1e-8, len(traj)))
    ptraj = to_proper_time(traj, conv)
    res_pt = np.max(np.abs(residual_proper_stack(ptraj, mu, conv)))
    out.append(_record(name, "proper_time_residual", res_pt, 1e-6, len(traj)))
    kappa = curvature_stack(ptraj, conv)
    out.append(_record(name, "curvature_relative_drift", relative_drift(kappa), 1e-6, len(traj), curvature=float(kappa[0])))
    unit = np.max(np.abs(metric_dot(ptraj.u, ptraj.u, conv) - 1.0))
    out.append(_record(name, "unit_velocity", unit, 1e-12, len(traj)))
    orth = np.max(np.abs(metric_dot(ptraj.u, ptraj.ud, conv)))
    out.append(_record(name, "velocity_acceleration_orthogonal", orth, 1e-9, len(traj)))
    witness = np.max(np.abs(metric_dot(ptraj.u, ptraj.udd, conv) + metric_dot(ptraj.ud, ptraj.ud, conv)))
    out.append(_record(name, "normalization_witness", witness, 1e-8, len(traj)))
    closing = calibrate_orientation(mu if mu != 0 else 1.0, conv=conv)
    out.append(_flag(name, "orientation_calibration", closing == [conv.eps3], 1, closing=closing))
    return out


def residual_ep_stack(traj: Trajectory, conv: Convention) -> np.ndarray:
    from .equation import _residual

    return _residual(traj.v, traj.vp, traj.vpp, traj.mu, conv)


def _helmholtz_sample(rng):
    return (float(rng.uniform(-1, 1)), rng.uniform(-1, 1, 2), sample_velocity(rng))


def suite_helmholtz(ctx: SuiteContext) -> list[dict]:
    name = "helmholtz"
    conv = ctx.conv
    cf = var.free_coefficients(ctx.mu, conv)
    if ctx.mutation:
        cf = var.mutate(cf, ctx.mutation, conv=conv)
    rng = ctx.rng(2)
    n = 50
    worst = {c: 0.0 for c in var.CONDITIONS}
    for _ in range(n):
        res = var.helmholtz_residuals(cf, _helmholtz_sample(rng), conv)
        for c in var.CONDITIONS:
            worst[c] = max(worst[c], res[c])
    out = [_record(name, f"condition_{c}", worst[c], 1e-6, n, condition=c) for c in var.CONDITIONS]

    base = var.free_coefficients(ctx.mu, conv)
    diff = 0.0
    for _ in range(100):
        t, x, v = _helmholtz_sample(rng)
        vp, vpp = sample_vp(rng), sample_vp(rng)
        diff = max(diff, float(np.max(np.abs(base.assemble(t, x, v, vp, vpp) - residual_ep(Jet(t, x, v, vp, vpp), ctx.mu, conv)))))
    out.append(_record(name, "assembly_matches_equation", diff, 1e-10, 100))

    d1 = max(abs(float(np.max(np.abs(var.d1_apply(base.B, _helmholtz_sample(rng)))))) for _ in range(10))
    out.append(_record(name, "d1_of_static_field", d1, 1e-14, 10))

    if ctx.mutation is None:
        for kind in var.MUTATIONS:
            mutated = var.mutate(base, kind, conv=conv)
            fired = {c: 0.0 for c in var.CONDITIONS}
            for _ in range(10):
                res = var.helmholtz_residuals(mutated, _helmholtz_sample(rng), conv)
                for c in var.CONDITIONS:
                    fired[c] = max(fired[c], res[c])
            names = [c for c in var.CONDITIONS if fired[c] > 1e-2]
            out.append(
                _record(name, f"mutation_{kind}_detected", max(fired.values()), 1e-2, 10, bound="lower", fired=names)
            )
    return out


def _symmetry_gen(rng) -> sym.PoincareGen:
    return sym.PoincareGen(float(rng.uniform(-1, 1)), rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 3))


def suite_symmetry(ctx: SuiteContext) -> list[dict]:
    name = "symmetry"
    conv, mu = ctx.conv, ctx.mu
    cf = var.free_coefficients(mu, conv)
    rng = ctx.rng(3)
    n = 50
    worst = {k: 0.0 for k in sym.IDENTITIES}
    mult_res = 0.0
    for _ in range(n):
        v, vp, gen = sample_velocity(rng), sample_vp(rng), _symmetry_gen(rng)
        res = sym.invariance_residuals(cf, v, vp, gen, conv)
        for k in sym.IDENTITIES:
            worst[k] = max(worst[k], res[k])
        mult_res = max(mult_res, sym.multiplier_residual(cf, v, vp, gen, conv))
    out = [_record(name, f"identity_{k}", worst[k], 1e-6, n, identity=k) for k in sym.IDENTITIES]
    out.append(_record(name, "multiplier_equation", mult_res, 1e-6, n))

    boosted = 0.0
    translated = 0.0
    count = 0
    while count < 10:
        v, vp = sample_velocity(rng, 0.6), sample_vp(rng)
        jet = Jet(float(rng.uniform(-1, 1)), rng.uniform(-1, 1, 2), v, vp, solve_jerk(v, vp, mu, conv))
        gen = _symmetry_gen(rng)
        try:
            image = sym.lorentz_transform_jet(jet, gen, 0.5, conv)
        except SuperluminalVelocity:
            continue
        boosted = max(boosted, float(np.max(np.abs(residual_ep(image, mu, conv)))))
        shifted = sym.lorentz_transform_jet(jet, sym.PoincareGen(0.0, np.zeros(2), gen.translations), 1.0, conv)
        translated = max(translated, float(np.max(np.abs(residual_ep(shifted, mu, conv) - residual_ep(jet, mu, conv)))))
        count += 1
    out.append(_record(name, "finite_boost_maps_solutions", boosted, 1e-8, count))
    out.append(_record(name, "translation_invariance", translated, 1e-14, count))
    return out


def _basket():
    """Smooth f(v) with their gradients; D_t f = grad f . v'."""
    return [
        lambda v: np.array([v[1], v[0]]),  # v1 v2
        lambda v: np.array([np.cos(v[0]), 2 * v[1]]),  # sin v1 + v2^2
        lambda v: np.exp(v[0] * v[1]) * np.array([v[1], v[0]]),  # exp(v1 v2)
    ]


def suite_lagrangian(ctx: SuiteContext) -> list[dict]:
    name = "lagrangian"
    conv, mu = ctx.conv, ctx.mu
    rng = ctx.rng(4)
    sigma = lag.calibrate_ep_sign(mu if mu != 0 else 1.0, conv)
    n = 200
    worst = {"L1": 0.0, "L2": 0.0}
    for _ in range(n):
        jet = Jet(0.0, np.zeros(2), sample_velocity(rng), sample_vp(rng), sample_vp(rng), np.zeros(2))
        target = sigma * residual_ep(jet, mu, conv)
        for which in worst:
            ep = lag.euler_poisson_operator(lag.LagrangianSpec(which, mu), jet, conv)
            worst[which] = max(worst[which], float(np.max(np.abs(ep - target))))
    out = [_record(name, f"euler_poisson_{w}", worst[w], 1e-5, n, sigma=sigma) for w in worst]

    gauge = max(lag.gauge_difference_check(sample_velocity(rng), sample_vp(rng), conv) for _ in range(100))
    out.append(_record(name, "gauge_difference", gauge, 1e-7, 100))

    traj = ctx.trajectory()
    diff = np.array([lag.eval_L(lag.LagrangianSpec("L2", mu), v, vp, conv) - lag.eval_L(lag.LagrangianSpec("L1", mu), v, vp, conv) for v, vp in zip(traj.v, traj.vp)])
    integral = simpson(diff, x=traj.t)
    ends = lag.gauge_function(traj.v[-1], conv) - lag.gauge_function(traj.v[0], conv)
    out.append(_record(name, "gauge_quadrature", abs(integral - ends), 1e-6, len(traj)))

    total = 0.0
    for grad in _basket():
        for _ in range(5):
            jet = Jet(0.0, np.zeros(2), sample_velocity(rng, 0.7), sample_vp(rng), sample_vp(rng), np.zeros(2))
            ep = lag.euler_poisson_operator(lambda v, vp, g=grad: float(g(v) @ vp), jet, conv)
            total = max(total, float(np.max(np.abs(ep))))
    out.append(_record(name, "total_derivatives_annihilated", total, 1e-5, 15))

    lin = 0.0
    for _ in range(100):
        v, vp = sample_velocity(rng), sample_vp(rng)
        for which in ("L1", "L2"):
            spec = lag.LagrangianSpec(which, mu)
            second = lag.eval_L(spec, v, 2 * vp, conv) - 2 * lag.eval_L(spec, v, vp, conv) + lag.eval_L(spec, v, 0 * vp, conv)
            lin = max(lin, abs(second))
    out.append(_record(name, "linear_in_acceleration", lin, 1e-8, 100))
    return out


def suite_hamiltonian(ctx: SuiteContext) -> list[dict]:
    name = "hamiltonian"
    conv, mu = ctx.conv, ctx.mu
    rng = ctx.rng(5)
    n = 1000
    roundtrip = forms = legendre = 0.0
    for _ in range(n):
        v, vp = sample_velocity(rng), sample_vp(rng)
        roundtrip = max(roundtrip, ham.legendre_roundtrip_error(v, vp, mu, conv))
        closed = ham.hamiltonian_value(v, vp, mu, conv, "closed")
        forms = max(forms, abs(closed - ham.hamiltonian_value(v, vp, mu, conv, "momentum")))
        legendre = max(legendre, abs(closed - ham.hamiltonian_value(v, vp, mu, conv, "legendre")))
    out = [
        _record(name, "legendre_roundtrip", roundtrip, 1e-10, n),
        _record(name, "hamiltonian_forms_agree", forms, 1e-12, n),
        _record(name, "hamiltonian_matches_legendre_definition", legendre, 1e-12, n),
    ]

    closed = ident = kernel = 0.0
    m = 100
    for _ in range(m):
        v, vp = sample_velocity(rng), sample_vp(rng)
        block = ham.jacobi_block(v, conv)
        closed_form, delta = ham.closed_form_inverse_jacobian(v, conv)
        closed = max(closed, float(np.max(np.abs(block.dv_dpp - closed_form))), abs(block.delta - delta))
        ident = max(ident, float(np.max(np.abs(block.dv_dpp @ block.dpp_dv - np.eye(2)))))
        kernel = max(kernel, ham.contact_kernel_residual(v, vp, mu, conv))
    out.append(_record(name, "jacobi_block_matches_closed_form", closed, 1e-8, m))
    out.append(_record(name, "jacobi_block_inverse", ident, 1e-10, m))
    out.append(_record(name, "contact_kernel", kernel, 1e-8, m))

    # v depends on p' alone: perturbing p leaves the Newton solve untouched
    v_dp = 0.0
    for _ in range(10):
        p, pp = ham.momenta(sample_velocity(rng, 0.6), sample_vp(rng), mu, conv)
        base, _ = ham.inverse_legendre(p, pp, mu, conv)
        for e in np.eye(2):
            moved, _ = ham.inverse_legendre(p + 1e-3 * e, pp, mu, conv)
            v_dp = max(v_dp, float(np.max(np.abs(moved - base))))
    out.append(_record(name, "velocity_independent_of_p", v_dp, 1e-15, 10))

    defect = 0.0
    for _ in range(100):
        jet = Jet(0.0, np.zeros(2), sample_velocity(rng), sample_vp(rng), sample_vp(rng))
        _, pp1 = lag.momenta_from_lagrangian(lag.LagrangianSpec("L1", mu), jet, conv)
        _, pp2 = lag.momenta_from_lagrangian(lag.LagrangianSpec("L2", mu), jet, conv)
        defect = max(defect, abs(pp1[0]), abs(pp2[1]))
    out.append(_record(name, "single_lagrangian_momentum_defect", defect, 1e-12, 100))

    traj = ctx.trajectory()
    p0, pp0 = ham.momenta(traj.v[0], traj.vp[0], mu, conv)
    canon = ham.canonical_flow(ham.CanonicalState(traj.t[0], traj.x[0], p0, pp0), mu, (traj.t[0], traj.t[-1]), traj.step, conv)
    H_direct = np.array([ham.hamiltonian_value(v, vp, mu, conv) for v, vp in zip(traj.v, traj.vp)])
    p_direct = np.array([ham.momenta(v, vp, mu, conv)[0] for v, vp in zip(traj.v, traj.vp)])
    pp_check = max(float(np.max(np.abs(ham.first_momentum(v, conv) - pp))) for v, pp in zip(canon.v, canon.pp))
    out += [
        _record(name, "H_drift_direct", relative_drift(H_direct), 1e-6, len(traj)),
        _record(name, "H_drift_canonical", relative_drift(canon.H), 1e-6, len(canon)),
        _record(name, "p_drift_direct", float(np.max(np.abs(p_direct - p_direct[0]))), 1e-8, len(traj)),
        _record(name, "p_drift_canonical", float(np.max(np.abs(canon.p - canon.p[0]))), 1e-15, len(canon)),
        _record(name, "first_momentum_consistency", pp_check, 1e-8, len(canon)),
        _record(name, "worldline_deviation", float(np.max(np.abs(canon.x - traj.x))), 1e-6, len(traj)),
    ]
    return out


def suite_spin(ctx: SuiteContext) -> list[dict]:
    name = "spin"
    conv = ctx.conv
    rng = ctx.rng(6)
    closing = sp.calibrate_spin_signs(conv, seed=ctx.seed)
    out = [
        _flag(
            name,
            "sign_calibration_unique",
            closing == [(sp.SIGMA, conv.sgn_g)],
            1,
            closing=[list(c) for c in closing],
        )
    ]

    n = 1000
    coinc = 0.0
    for _ in range(n):
        s3 = rng.uniform(0.2, 2.0) * rng.choice([-1.0, 1.0])
        coinc = max(coinc, sp.momentum_coincidence(sample_velocity(rng), sample_vp(rng), rng.uniform(0.2, 2.0), s3, conv))
    out.append(_record(name, "momentum_coincidence", coinc, 1e-10, n, sigma=sp.SIGMA, sgn_g=conv.sgn_g))

    perturbed = 0.0
    for _ in range(10):
        v, vp = sample_velocity(rng, 0.6), sample_vp(rng)
        m0, s3 = 1.0, 0.5
        P = sp.dixon_momentum(v, vp, m0, s3, conv).P
        p, _ = ham.momenta(v, vp, 1.1 * m0 / s3, conv)
        perturbed = max(perturbed, float(np.max(np.abs(P - sp.SIGMA * s3 * p))))
    out.append(_record(name, "coincidence_needs_renormalized_mass", perturbed, 1e-3, 10, bound="lower"))

    dual = decomp = 0.0
    for _ in range(100):
        S = rng.normal(size=(3, 3))
        S = S - S.T
        dual = max(dual, float(np.max(np.abs(sp.undual_spin(sp.dual_spin(S, conv), conv) - S))))
        w = sample_velocity(rng)
        u = np.concatenate([[1.0], w]) / np.sqrt(1.0 + metric_dot(w, w, conv))
        decomp = max(decomp, sp.decomposition_residual(rng.normal(size=3), u, conv))
    out.append(_record(name, "dual_roundtrip", dual, 1e-12, 100))
    out.append(_record(name, "vector_decomposition", decomp, 1e-10, 100))

    m0, s3 = ctx.m0, ctx.s3
    mu = sp.mass_renormalization(m0, s3)
    traj = ctx.trajectory() if np.isclose(mu, ctx.mu) else integrate_worldline(
        ctx.x0, ctx.v0, ctx.vp0, mu, ctx.t_span, ctx.step, ctx.method, conv
    )
    ptraj = to_proper_time(traj, conv)
    aud = au = pirani = normal = 0.0
    for pj in ptraj:
        state = sp.pirani_spin_from_motion(pj, m0, mu, conv)
        aud = max(aud, abs(float(metric_dot(state.a, pj.ud, conv))))
        au = max(au, abs(float(metric_dot(state.a, pj.u, conv)) + m0 / mu))
        pirani = max(pirani, sp.pirani_check(state.S, pj.u, conv))
        normal = max(normal, sp.normal_axis_residual(pj, state.s3, conv))
    drift, spin_law = sp.dixon_residuals(ptraj, m0, mu, conv)
    samples = len(ptraj)
    out += [
        _record(name, "spin_orthogonal_to_acceleration", aud, 1e-8, samples),
        _record(name, "spin_projection_on_velocity", au, 1e-8, samples),
        _record(name, "pirani_condition", pirani, 1e-12, samples),
        _record(name, "dixon_momentum_conserved", drift, 1e-5, samples),
        _record(name, "dixon_spin_law", spin_law, 1e-5, samples),
        _record(name, "normal_axis_equation", normal, 1e-10, samples),
        _record(name, "force_constraint", sp.force_constraint(ptraj), 1e-15, samples),
    ]

    # straight worldline carrying a curved acceleration: not a solution
    t = traj.t[:200]
    w = np.array([0.3, 0.0])
    L = np.sqrt(1.0 + metric_dot(w, w, conv))
    u = np.tile(np.concatenate([[1.0], w]) / L, (t.size, 1))
    ud = np.tile([0.0, 0.0, 0.5], (t.size, 1))
    fake = type(ptraj)(t * L, np.column_stack([t, w[0] * t, w[1] * t]), u, ud, np.zeros_like(u))
    out.append(_record(name, "dixon_detects_non_solution", sp.dixon_residuals(fake, m0, mu, conv)[1], 1e-2, t.size, bound="lower"))
    return out


RUNNERS = {
    "equation": suite_equation,
    "helmholtz": suite_helmholtz,
    "symmetry": suite_symmetry,
    "lagrangian": suite_lagrangian,
    "hamiltonian": suite_hamiltonian,
    "spin": suite_spin,
}


def run_suite(name: str, ctx: SuiteContext) -> list[dict]:
    if name == "all":
        records = []
        for suite in SUITES:
            records += RUNNERS[suite](ctx)
        return records
    if name not in RUNNERS:
        raise KeyError(f"unknown suite {name!r}")
    return RUNNERS[name](ctx)
