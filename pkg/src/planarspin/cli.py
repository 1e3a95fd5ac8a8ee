"""Command-line driver: ``planarspin {simulate,verify,compare}``.

Exit codes: 0 ok, 1 tolerance breach, 2 configuration error, 3 integration
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hamiltonian as ham
from .equation import (
    CSV_HEADER,
    curvature_stack,
    integrate_worldline,
    relative_drift,
    to_proper_time,
)
from .errors import ConfigError, PlanarSpinError, SuperluminalVelocity
from .minkowski import DEFAULT, Convention, as_vec, metric_dot
from .spin import mass_renormalization
from .suites import SUITES, SuiteContext, run_suite
from .variationality import MUTATIONS

EXIT_OK, EXIT_BREACH, EXIT_CONFIG, EXIT_INTEGRATION = 0, 1, 2, 3
COMPARE_TOL = 1e-6


@dataclass
class RunConfig:
    mu: float = 1.0
    m0: float | None = None
    s3: float | None = None
    x: np.ndarray = field(default_factory=lambda: np.zeros(2))
    v: np.ndarray = field(default_factory=lambda: np.array([0.3, 0.0]))
    vp: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.4]))
    t_span: tuple = (0.0, 10.0)
    step: float = 1e-3
    method: str = "rk4"
    convention: Convention = DEFAULT
    seed: int = 0
    out: str = "out"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        try:
            has_mu = "mu" in data
            has_pair = "m0" in data or "s3" in data
            if has_mu and has_pair:
                raise ConfigError("give either mu or (m0, s3), not both")
            if has_pair:
                if "m0" not in data or "s3" not in data:
                    raise ConfigError("m0 and s3 must be given together")
                m0, s3 = float(data["m0"]), float(data["s3"])
                mu = mass_renormalization(m0, s3)
            else:
                m0 = s3 = None
                mu = float(data.get("mu", 1.0))
            initial = data.get("initial", {})
            conv = Convention.from_dict(data.get("convention", {}))
            cfg = cls(
                mu=mu,
                m0=m0,
                s3=s3,
                x=as_vec(initial.get("x", [0.0, 0.0]), 2),
                v=as_vec(initial.get("v", [0.3, 0.0]), 2),
                vp=as_vec(initial.get("vp", [0.0, 0.4]), 2),
                t_span=tuple(float(t) for t in data.get("t_span", (0.0, 10.0))),
                step=float(data.get("step", 1e-3)),
                method=str(data.get("method", "rk4")),
                convention=conv,
                seed=int(data.get("seed", 0)),
                out=str(data.get("out", "out")),
            )
        except ConfigError:
            raise
        except (PlanarSpinError, TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if len(self.t_span) != 2 or not self.t_span[1] > self.t_span[0]:
            raise ConfigError("t_span must be [t0, t1] with t1 > t0")
        if not self.step > 0:
            raise ConfigError("step must be positive")
        if self.method not in ("rk4", "dopri"):
            raise ConfigError(f"unknown method {self.method!r}")
        if 1.0 + float(metric_dot(self.v, self.v, self.convention)) <= 0.0:
            raise ConfigError(f"SuperluminalVelocity: initial v = {self.v.tolist()} is not subluminal")

    def suite_context(self, mutation: str | None = None) -> SuiteContext:
        m0 = self.m0 if self.m0 is not None else self.mu
        s3 = self.s3 if self.s3 is not None else 1.0
        return SuiteContext(
            mu=self.mu,
            m0=m0,
            s3=s3,
            x0=self.x,
            v0=self.v,
            vp0=self.vp,
            t_span=self.t_span,
            step=self.step,
            method=self.method,
            conv=self.convention,
            seed=self.seed,
            mutation=mutation,
        )


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return RunConfig.from_dict(data)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def cmd_simulate(cfg: RunConfig, fmt: str = "csv") -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        traj = integrate_worldline(cfg.x, cfg.v, cfg.vp, cfg.mu, cfg.t_span, cfg.step, cfg.method, cfg.convention)
    except PlanarSpinError as exc:
        print(f"integration failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    if fmt == "csv":
        traj.to_csv(out / "trajectory.csv")
    else:
        rows = [dict(zip(CSV_HEADER, (t, *x, *v, *vp))) for t, x, v, vp in zip(traj.t.tolist(), traj.x.tolist(), traj.v.tolist(), traj.vp.tolist())]
        (out / "trajectory.json").write_text(json.dumps(rows))
    traj.write_manifest(out / "manifest.json")
    kappa = curvature_stack(to_proper_time(traj, cfg.convention), cfg.convention)
    H = np.array([ham.hamiltonian_value(v, vp, cfg.mu, cfg.convention) for v, vp in zip(traj.v, traj.vp)])
    p_all = np.array([ham.momenta(v, vp, cfg.mu, cfg.convention)[0] for v, vp in zip(traj.v, traj.vp)])
    summary = {
        "final_H": float(H[-1]),
        "final_p": p_all[-1].tolist(),
        "H_relative_drift": relative_drift(H),
        "p_drift": float(np.max(np.abs(p_all - p_all[0]))),
        "curvature": float(kappa[0]),
        "curvature_relative_drift": relative_drift(kappa),
        "samples": len(traj),
    }
    print(_dump(summary))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, suite: str = "all", fmt: str = "json", mutation: str | None = None) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        records = run_suite(suite, cfg.suite_context(mutation))
    except PlanarSpinError as exc:
        print(f"verification aborted: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    failed = [r for r in records if not r["passed"]]
    report = {
        "suite": suite,
        "seed": cfg.seed,
        "mutation": mutation,
        "passed": not failed,
        "failed_checks": [r["check"] for r in failed],
        "records": records,
    }
    (out / f"verify_{suite}.json").write_text(_dump(report))
    if fmt == "csv":
        with open(out / f"verify_{suite}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["suite", "check", "value", "tolerance", "bound", "passed", "samples"])
            for r in records:
                writer.writerow([r["suite"], r["check"], repr(r["value"]), r["tolerance"], r["bound"], r["passed"], r["samples"]])
    for r in records:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"{status} {r['suite']}.{r['check']} value={r['value']:.3e} tol={r['tolerance']:.0e}")
    return EXIT_OK if not failed else EXIT_BREACH


def cmd_compare(cfg: RunConfig, fmt: str = "csv", canonical_mu: float | None = None) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    mu_c = cfg.mu if canonical_mu is None else canonical_mu
    conv = cfg.convention
    try:
        direct = integrate_worldline(cfg.x, cfg.v, cfg.vp, cfg.mu, cfg.t_span, cfg.step, cfg.method, conv)
        p0, pp0 = ham.momenta(cfg.v, cfg.vp, mu_c, conv)
        canon = ham.canonical_flow(ham.CanonicalState(cfg.t_span[0], cfg.x, p0, pp0), mu_c, cfg.t_span, cfg.step, conv, v_guess=cfg.v)
    except PlanarSpinError as exc:
        print(f"integration failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    n = min(len(direct), len(canon))
    dev = np.max(np.abs(direct.x[:n] - canon.x[:n]), axis=1)
    header = ["t", "x1", "x2", "x1_canonical", "x2_canonical", "deviation"]
    rows = np.column_stack([direct.t[:n], direct.x[:n], canon.x[:n], dev])
    if fmt == "csv":
        with open(out / "compare.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(x)) for x in row])
        canon.to_csv(out / "canonical.csv")
    else:
        (out / "compare.json").write_text(json.dumps([dict(zip(header, r)) for r in rows.tolist()]))
    canon.write_manifest(out / "canonical_manifest.json")
    summary = {"max_deviation": float(dev.max()), "tolerance": COMPARE_TOL, "mu": cfg.mu, "canonical_mu": mu_c}
    print(_dump(summary))
    return EXIT_OK if summary["max_deviation"] < COMPARE_TOL else EXIT_BREACH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planarspin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="seed for randomized suites (overrides config)")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--format", choices=("csv", "json"), default=None)

    common(sub.add_parser("simulate", help="integrate a worldline"))
    verify = sub.add_parser("verify", help="run verification suites")
    common(verify)
    verify.add_argument("--suite", choices=SUITES + ("all",), default="all")
    verify.add_argument("--mutate", choices=MUTATIONS + ("a_power",), help="check a mutated coefficient field instead")
    compare = sub.add_parser("compare", help="third-order flow against the canonical flow")
    common(compare)
    compare.add_argument("--canonical-mu", type=float, help="mu used by the canonical flow (control runs)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.command == "simulate":
        return cmd_simulate(cfg, args.format or "csv")
    if args.command == "verify":
        return cmd_verify(cfg, args.suite, args.format or "json", args.mutate)
    return cmd_compare(cfg, args.format or "csv", args.canonical_mu)


if __name__ == "__main__":
    sys.exit(main())
