"""Acceptance criteria AC1..AC8, one PASS/FAIL line per criterion.

Run directly with ``python3 tests/test_acceptance.py`` or through pytest.
Tolerances are pinned here and compared against the raw suite values, so a
change of tolerance inside the suites cannot loosen acceptance.
"""

import sys
import time
from functools import lru_cache

import numpy as np
import pytest

from planarspin.hamiltonian import jacobi_block
from planarspin.symmetry import IDENTITIES
from planarspin.suites import SuiteContext, run_suite
from planarspin.variationality import MUTATIONS

CTX = SuiteContext(mu=1.0, m0=1.0, s3=1.0, t_span=(0.0, 10.0), step=1e-3, method="rk4", seed=0)
TIMINGS: dict[str, float] = {}


@lru_cache(maxsize=None)
def records(suite: str) -> dict:
    start = time.perf_counter()
    out = {r["check"]: r for r in run_suite(suite, CTX)}
    TIMINGS[suite] = time.perf_counter() - start
    return out


def below(suite, check, tol):
    rec = records(suite)[check]
    return rec["value"] < tol, f"{check}={rec['value']:.2e}<{tol:.0e}"


def above(suite, check, tol):
    rec = records(suite)[check]
    return rec["value"] > tol, f"{check}={rec['value']:.2e}>{tol:.0e}"


def ac1():
    checks = [below("helmholtz", f"condition_{c}", 1e-6) for c in ("i", "ii", "iii", "iv", "v", "vi")]
    for kind in MUTATIONS:
        ok, text = above("helmholtz", f"mutation_{kind}_detected", 1e-2)
        fired = records("helmholtz")[f"mutation_{kind}_detected"]["fired"]
        checks.append((ok and len(fired) >= 1, f"{text} fired={'+'.join(fired)}"))
    checks.append((TIMINGS["helmholtz"] < 5.0, f"runtime={TIMINGS['helmholtz']:.1f}s<5s"))
    return checks


def ac2():
    checks = [below("symmetry", f"identity_{k}", 1e-6) for k in IDENTITIES]
    checks.append(below("symmetry", "finite_boost_maps_solutions", 1e-8))
    checks.append((records("symmetry")["finite_boost_maps_solutions"]["samples"] == 10, "boosted_jets=10"))
    checks.append((TIMINGS["symmetry"] < 5.0, f"runtime={TIMINGS['symmetry']:.1f}s<5s"))
    return checks


def ac3():
    sigma = records("lagrangian")["euler_poisson_L1"]["sigma"]
    return [
        below("lagrangian", "euler_poisson_L1", 1e-5),
        below("lagrangian", "euler_poisson_L2", 1e-5),
        below("lagrangian", "gauge_difference", 1e-7),
        (sigma in (1, -1), f"sigma={sigma:+d}"),
    ]


def ac4():
    return [
        below("equation", "proper_time_residual", 1e-6),
        below("equation", "curvature_relative_drift", 1e-6),
    ]


def ac5():
    return [
        below("hamiltonian", "legendre_roundtrip", 1e-10),
        below("hamiltonian", "hamiltonian_forms_agree", 1e-12),
        below("hamiltonian", "H_drift_direct", 1e-6),
        below("hamiltonian", "H_drift_canonical", 1e-6),
        below("hamiltonian", "p_drift_direct", 1e-6),
        below("hamiltonian", "p_drift_canonical", 1e-6),
        below("hamiltonian", "worldline_deviation", 1e-6),
    ]


def ac6():
    structural = all(not np.any(jacobi_block(v).dv_dp) for v in ([0.0, 0.0], [0.3, -0.5], [-0.6, 0.2]))
    return [
        below("hamiltonian", "jacobi_block_matches_closed_form", 1e-8),
        below("hamiltonian", "velocity_independent_of_p", 1e-15),
        (structural, "dv_dp=0"),
    ]


def ac7():
    calib = records("spin")["sign_calibration_unique"]
    return [
        (calib["passed"] and len(calib["closing"]) == 1, f"closing={calib['closing']}"),
        below("spin", "momentum_coincidence", 1e-10),
        below("spin", "spin_orthogonal_to_acceleration", 1e-8),
        below("spin", "spin_projection_on_velocity", 1e-8),
        below("spin", "dixon_momentum_conserved", 1e-5),
        below("spin", "dixon_spin_law", 1e-5),
        below("spin", "normal_axis_equation", 1e-10),
    ]


def ac8():
    return [below("hamiltonian", "single_lagrangian_momentum_defect", 1e-12)]


CRITERIA = {1: ac1, 2: ac2, 3: ac3, 4: ac4, 5: ac5, 6: ac6, 7: ac7, 8: ac8}


def evaluate(n: int) -> tuple[bool, str]:
    checks = CRITERIA[n]()
    ok = all(c[0] for c in checks)
    line = f"AC{n} {'PASS' if ok else 'FAIL'} " + " ".join(text for _, text in checks)
    return ok, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_acceptance(n, capsys):
    ok, line = evaluate(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_total_runtime(capsys):
    for suite in ("equation", "helmholtz", "symmetry", "lagrangian", "hamiltonian", "spin"):
        records(suite)
    total = sum(TIMINGS.values())
    with capsys.disabled():
        print(f"\nRUNTIME {'PASS' if total < 60 else 'FAIL'} total={total:.1f}s<60s")
    assert total < 60.0


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    total = sum(TIMINGS.values())
    print(f"RUNTIME {'PASS' if total < 60 else 'FAIL'} total={total:.1f}s<60s")
    sys.exit(0 if all(ok for ok, _ in results) and total < 60 else 1)
