"""Acceptance criteria, one test each, at the stated tolerances."""

import dataclasses
import io
import math

import numpy as np
import pytest

from lcmanifold import analysis as an
from lcmanifold.config import RunConfig
from lcmanifold.dynamics import IntegratorConfig, integrate, simulate_full, simulate_reduced, to_polar
from lcmanifold.manifold import (lambda_omega_closed_form, lienard_closed_form, residual_slope,
                                 solve_lambda_omega_manifold, solve_lienard_manifold, solve_manifold)
from lcmanifold.model import SystemSpec, VdpSpec
from lcmanifold.pipeline import HEADERS, analyze_rows, fmt, read_trajectory_csv, simulate_target

SIM = IntegratorConfig(t_end=100.0)
START = (0.5, 0.0, 0.0)


@pytest.fixture(scope="module")
def reduced():
    cache = {}

    def get(lam):
        if lam not in cache:
            cache[lam] = to_polar(simulate_reduced(4.0, lam, START[:2], SIM))
        return cache[lam]
    return get


def test_01_manifold_algebra(criterion):
    lams = [0.1, 0.5, 1, 2, 5, 10]
    worst = max(solve_lambda_omega_manifold(g, lam).max_abs_diff(lambda_omega_closed_form(g, lam))
                for g in [0.5, 1, 2, 4, 9] for lam in lams)
    worst = max(worst, max(solve_lienard_manifold(k, lam).max_abs_diff(lienard_closed_form(k, lam))
                           for k in [0, 0.5, 1, 2] for lam in lams))
    spot = float(np.max(np.abs(solve_lambda_omega_manifold(4, 1).as_array()
                               - np.array([-1, 9, 1]) / 85)))
    criterion(1, "manifold algebra", worst <= 1e-12 and spot <= 1e-12,
              f"grid worst={worst:.2e}, spot={spot:.2e} (tol 1e-12)")


def test_02_centre_manifold_limit(criterion):
    m = solve_lienard_manifold(1e-8, 1.0)
    err = float(np.max(np.abs(m.as_array() - [0.2, 0.2, -0.2])))
    criterion(2, "centre-manifold limit", err <= 1e-6, f"max error={err:.2e} (tol 1e-6)")


def test_03_invariance_residual(criterion):
    spec = SystemSpec.lambda_omega(4.0, 1.0)
    m = solve_manifold(spec)
    slope = residual_slope(spec, m, eps=(1e-1, 1e-2, 1e-3))
    leak = residual_slope(spec, dataclasses.replace(m, a1=m.a1 + 0.1), eps=(1e-1, 1e-2, 1e-3))
    criterion(3, "invariance residual", slope >= 2.9 and abs(leak - 2) <= 0.1,
              f"slope={slope:.3f} (>= 2.9), perturbed slope={leak:.3f} (~2)")


def test_04_base_radius(criterion):
    errs = {}
    for g in (1.0, 4.0, 9.0):
        R = to_polar(simulate_full(SystemSpec.uncoupled(g), START, SIM)).R[-1]
        errs[g] = abs(R - math.sqrt(g)) / math.sqrt(g)
    ok = max(errs.values()) <= 5e-3 and an.base_radius(4.0) == 2.0
    criterion(4, "base radius", ok,
              ", ".join(f"gamma={g:g} rel={e:.1e}" for g, e in errs.items()) + " (tol 5e-3)")


def test_05_modified_radius(criterion, reduced):
    predicted = an.predicted_radius(4.0, 1.0)
    oracle_err = abs(an.averaged_radial_root(4.0, 1.0) - predicted)
    spot_err = abs(predicted - 2.027013)
    red = an.estimate_mean_radius(reduced(1.0))
    red_rel = abs(red - predicted) / predicted
    full_series = to_polar(simulate_full(SystemSpec.lambda_omega(4.0, 1.0), START, SIM))
    full = float(np.mean(an.post_transient(full_series).R))
    full_rel = abs(full - red) / red
    ok = spot_err <= 1e-5 and oracle_err <= 1e-8 and red_rel <= 0.02 and full_rel <= 0.05
    criterion(5, "modified radius", ok,
              f"predicted={predicted:.7f}, oracle diff={oracle_err:.1e} (tol 1e-8), "
              f"reduced rel={red_rel:.2e} (tol 0.02), full={full:.4f} vs reduced={red:.4f} "
              f"rel={full_rel:.3f} (tol 0.05)")


def test_06_increment(criterion):
    gap = min(an.predicted_radius(g, lam) - math.sqrt(g)
              for g in (1.0, 4.0, 9.0) for lam in (0.5, 1.0, 2.0, 5.0, 10.0))
    limit = abs(an.predicted_radius(4.0, 1000.0) - 2) / 2
    criterion(6, "increment claim", gap > 0 and limit <= 1e-3,
              f"min increment={gap:.3e} (> 0), large-lambda rel={limit:.1e} (tol 1e-3)")


def test_07_angular_velocity(criterion, reduced):
    omega = an.predicted_angular_velocity(4.0, 1.0)
    period = an.predicted_period(4.0, 1.0)
    measured = an.measure_angular_velocity(reduced(1.0))
    rel = abs(measured - omega) / omega
    ok = (abs(omega - (1 - 8 / 331)) <= 1e-12 and abs(omega - 0.975831) <= 1e-6
          and abs(period - 6.43885) <= 1e-4 and rel <= 0.02)
    criterion(7, "angular velocity and period", ok,
              f"omega={omega:.6f}, T={period:.5f}, measured={measured:.5f} rel={rel:.2e} (tol 0.02)")


def test_08_oscillation_count(criterion, reduced):
    counts = {lam: an.count_radial_oscillations(reduced(lam)) for lam in (1.0, 2.0, 5.0)}
    criterion(8, "oscillation count", all(c == 4 for c in counts.values()),
              ", ".join(f"lambda={lam:g}: {c}" for lam, c in counts.items()) + " (want 4)")


def test_09_van_der_pol(criterion):
    worst = max(abs(an.vdp_averaged_radius(VdpSpec(mu)) - 2) for mu in (0.1, 1.0, 5.0))
    same = all(an.vdp_modified_radius(lam) == an.predicted_radius(4.0, lam)
               for lam in (0.5, 1.0, 2.0, 5.0, 10.0, 1000.0))
    criterion(9, "Van der Pol", worst <= 1e-6 and same,
              f"worst |r-2|={worst:.1e} (tol 1e-6), identity={same}")


def test_10_integrator_quality(criterion):
    steps = np.array([0.2, 0.1, 0.05, 0.025])
    errs = [abs(integrate(lambda t, z: -z, [1.0],
                          IntegratorConfig(method="rk4", step=h, t_end=1.0, sample_interval=1.0)
                          ).states[-1, 0] - math.exp(-1)) for h in steps]
    order = float(np.polyfit(np.log(steps), np.log(errs), 1)[0])
    period = 2 * math.pi
    traj = integrate(lambda t, s: np.array([s[1], -s[0]]), [1.0, 0.0],
                     IntegratorConfig(tol=1e-10, t_end=period, sample_interval=period / 8))
    ret = float(np.max(np.abs(traj.states[-1] - [1.0, 0.0])))
    criterion(10, "integrator quality", order >= 3.9 and ret <= 1e-6,
              f"rk4 order={order:.3f} (>= 3.9), period return={ret:.1e} (tol 1e-6)")


def test_11_determinism_round_trip(criterion):
    cfg = RunConfig()
    a, b = simulate_target(cfg), simulate_target(cfg)
    identical = np.array_equal(a, b)
    buf = io.StringIO()
    buf.write(",".join(HEADERS["reduced2d"]) + "\n")
    buf.writelines(",".join(fmt(v) for v in row) + "\n" for row in a)
    buf.seek(0)
    rows, target = read_trajectory_csv(buf)
    direct = analyze_rows(cfg, a, "reduced2d").to_dict()
    parsed = analyze_rows(cfg, rows, target).to_dict()
    worst = max(abs(direct[k] - parsed[k]) for k in direct if k != "relative_errors")
    worst = max([worst] + [abs(direct["relative_errors"][k] - parsed["relative_errors"][k])
                           for k in direct["relative_errors"]])
    criterion(11, "determinism and round trip", identical and worst <= 1e-12,
              f"identical={identical}, round-trip diff={worst:.1e} (tol 1e-12)")
