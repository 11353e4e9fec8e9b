"""Self-check suite run by ``lcmanifold verify``.

Each check returns a :class:`CheckResult`; ``margin`` is tolerance minus the
worst observed error (negative means failure) or, for exact checks, ``0``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from . import analysis as an
from .config import RunConfig, VerifySettings
from .dynamics import IntegratorConfig, integrate, simulate_full, simulate_reduced, to_polar
from .errors import InsufficientDataError
from .manifold import (lambda_omega_closed_form, lienard_closed_form, residual_slope,
                       solve_lambda_omega_manifold, solve_lienard_manifold, solve_manifold)
from .model import SystemSpec, VdpSpec

RadiusFn = Callable[[float, float], float]

SIM_CONFIG = IntegratorConfig(t_end=100.0)
SIM_START = (0.5, 0.0, 0.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str


def _result(name: str, worst: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(worst <= tol), tol - worst, detail or f"worst={worst:.3g} tol={tol:g}")


def doubled_denominator_radius(gamma: float, lam: float) -> float:
    """Mean-radius formula with the denominator doubled (negative control only)."""
    s = lam + 2 * gamma
    return an._radius_with_denominator(gamma, lam, 2 * (lam * s + 2 * gamma * s + 4))


@lru_cache(maxsize=None)
def reduced_series(gamma: float, lam: float):
    traj = simulate_reduced(gamma, lam, SIM_START[:2], SIM_CONFIG)
    return to_polar(traj)


@lru_cache(maxsize=None)
def full_series(spec: SystemSpec):
    return to_polar(simulate_full(spec, SIM_START, SIM_CONFIG))


def full_mean_radius(series) -> tuple[float, bool]:
    """Mean radius and whether the trajectory actually rotates.

    A full system stuck at an equilibrium has no rotation to average over; the
    post-transient time-average of R is reported instead.
    """
    try:
        return an.estimate_mean_radius(series), True
    except InsufficientDataError:
        w = an.post_transient(series)
        return float(np.mean(w.R)), False


def check_manifold_algebra(v: VerifySettings) -> CheckResult:
    worst = 0.0
    for g in v.gammas:
        for lam in v.lambdas:
            worst = max(worst, solve_lambda_omega_manifold(g, lam).max_abs_diff(
                lambda_omega_closed_form(g, lam)))
    for k in v.ks:
        for lam in v.lambdas:
            worst = max(worst, solve_lienard_manifold(k, lam).max_abs_diff(
                lienard_closed_form(k, lam)))
    spot = solve_lambda_omega_manifold(4, 1).as_array() - np.array([-1, 9, 1]) / 85
    worst = max(worst, float(np.max(np.abs(spot))))
    return _result("manifold algebra (generic vs closed form)", worst, 1e-12)


def check_centre_limit() -> CheckResult:
    m = solve_lienard_manifold(1e-8, 1.0)
    worst = float(np.max(np.abs(m.as_array() - np.array([0.2, 0.2, -0.2]))))
    return _result("centre-manifold limit k=1e-8", worst, 1e-6)


def check_residual_scaling() -> CheckResult:
    specs = [SystemSpec.lambda_omega(4, 1), SystemSpec.lienard(0.5, 1, friction=((2, 0, 0.5),))]
    slopes, leaks = [], []
    for spec in specs:
        m = solve_manifold(spec)
        slopes.append(residual_slope(spec, m))
        leaks.append(residual_slope(spec, replace(m, a1=m.a1 + 0.1)))
    ok = min(slopes) >= 2.9 and all(abs(s - 2) <= 0.1 for s in leaks)
    margin = min(min(slopes) - 2.9, min(0.1 - abs(s - 2) for s in leaks))
    return CheckResult("invariance residual scaling", ok, margin,
                       f"slopes={[round(s, 3) for s in slopes]} "
                       f"perturbed={[round(s, 3) for s in leaks]}")


def check_base_radius() -> CheckResult:
    worst = 0.0
    for g in (1.0, 4.0, 9.0):
        R = full_series(SystemSpec.uncoupled(g)).R
        worst = max(worst, abs(R[-1] - math.sqrt(g)) / math.sqrt(g))
    return _result("uncoupled radius -> sqrt(gamma)", worst, 5e-3)


def check_radius_oracle(v: VerifySettings, radius_fn: RadiusFn) -> CheckResult:
    worst = abs(radius_fn(4.0, 1.0) - math.sqrt(1360 / 331))
    for g in v.increment_gammas:
        for lam in v.increment_lambdas:
            worst = max(worst, abs(an.averaged_radial_root(g, lam) - radius_fn(g, lam)))
    return _result("mean radius: closed form vs averaging oracle", worst, 1e-8)


def check_reduced_radius(radius_fn: RadiusFn) -> CheckResult:
    measured = an.estimate_mean_radius(reduced_series(4.0, 1.0))
    predicted = radius_fn(4.0, 1.0)
    return _result("reduced simulation mean radius (gamma=4, lambda=1)",
                   abs(measured - predicted) / predicted, 0.02,
                   f"measured={measured:.6f} predicted={predicted:.6f}")


def check_full_vs_reduced(v: VerifySettings) -> list[CheckResult]:
    out = []
    for lam in v.full_lambdas:
        reduced = an.estimate_mean_radius(reduced_series(4.0, lam))
        full, rotating = full_mean_radius(full_series(SystemSpec.lambda_omega(4.0, lam)))
        rel = abs(full - reduced) / reduced
        note = "" if rotating else " (full system settled on an equilibrium)"
        out.append(_result(f"full 3-D vs reduced mean radius (lambda={lam:g})", rel, 0.05,
                           f"full={full:.6f} reduced={reduced:.6f}{note}"))
    return out


def check_increment(v: VerifySettings, radius_fn: RadiusFn) -> CheckResult:
    gap = min(radius_fn(g, lam) - math.sqrt(g)
              for g in v.increment_gammas for lam in v.increment_lambdas)
    limit = abs(radius_fn(4.0, 1000.0) - 2) / 2
    ok = gap > 0 and limit <= 1e-3
    return CheckResult("radius increment and large-lambda limit", ok, min(gap, 1e-3 - limit),
                       f"min increment={gap:.3g} large-lambda rel={limit:.3g}")


def check_angular_velocity() -> CheckResult:
    exact = 1 - 8 / 331
    formula_err = max(abs(an.predicted_angular_velocity(4, 1) - exact),
                      abs(an.predicted_period(4, 1) - 2 * math.pi / exact))
    measured = an.measure_angular_velocity(reduced_series(4.0, 1.0))
    rel = abs(measured - exact) / exact
    ok = formula_err <= 1e-12 and rel <= 0.02
    return CheckResult("angular velocity and period (gamma=4, lambda=1)", ok, 0.02 - rel,
                       f"measured={measured:.6f} predicted={exact:.6f}")


def check_oscillations(v: VerifySettings) -> CheckResult:
    counts = [an.count_radial_oscillations(reduced_series(4.0, lam)) for lam in v.full_lambdas]
    return CheckResult("radial oscillations per rotation == 4", all(c == 4 for c in counts), 0.0,
                       f"counts={counts}")


def check_vdp(v: VerifySettings) -> CheckResult:
    worst = max(abs(an.vdp_averaged_radius(VdpSpec(mu)) - 2) for mu in (0.1, 1.0, 5.0))
    same = all(an.vdp_modified_radius(lam) == an.predicted_radius(4.0, lam)
               for lam in v.increment_lambdas)
    return CheckResult("Van der Pol averaged radius and modified radius", worst <= 1e-6 and same,
                       1e-6 - worst, f"worst={worst:.3g} identity={same}")


def check_integrator() -> CheckResult:
    steps = np.array([0.2, 0.1, 0.05, 0.025])
    errs = []
    for h in steps:
        cfg = IntegratorConfig(method="rk4", step=h, t_end=1.0, sample_interval=1.0)
        errs.append(abs(integrate(lambda t, z: -z, [1.0], cfg).states[-1, 0] - math.exp(-1)))
    order = float(np.polyfit(np.log(steps), np.log(errs), 1)[0])
    period = 2 * math.pi
    cfg = IntegratorConfig(tol=1e-10, t_end=period, sample_interval=period / 8)
    traj = integrate(lambda t, s: np.array([s[1], -s[0]]), [1.0, 0.0], cfg)
    ret = float(np.max(np.abs(traj.states[-1] - [1.0, 0.0])))
    return CheckResult("integrator order and period return", order >= 3.9 and ret <= 1e-6,
                       min(order - 3.9, 1e-6 - ret), f"rk4 order={order:.3f} return={ret:.2e}")


def check_round_trip() -> CheckResult:
    from .pipeline import HEADERS, analyze_rows, fmt, read_trajectory_csv, simulate_target

    cfg = RunConfig()
    a, b = simulate_target(cfg), simulate_target(cfg)
    identical = np.array_equal(a, b)
    buf = io.StringIO()
    buf.write(",".join(HEADERS["reduced2d"]) + "\n")
    for row in a:
        buf.write(",".join(fmt(x) for x in row) + "\n")
    buf.seek(0)
    rows, target = read_trajectory_csv(buf)
    direct = analyze_rows(cfg, a, "reduced2d").to_dict()
    parsed = analyze_rows(cfg, rows, target).to_dict()
    worst = max(abs(direct[k] - parsed[k]) for k in direct if k != "relative_errors")
    return CheckResult("determinism and CSV round trip", identical and worst <= 1e-12,
                       1e-12 - worst, f"identical={identical} worst={worst:.3g}")


def run_checks(v: VerifySettings, radius_fn: RadiusFn = an.predicted_radius) -> list[CheckResult]:
    results = [
        check_manifold_algebra(v),
        check_centre_limit(),
        check_residual_scaling(),
        check_base_radius(),
        check_radius_oracle(v, radius_fn),
        check_reduced_radius(radius_fn),
        *check_full_vs_reduced(v),
        check_increment(v, radius_fn),
        check_angular_velocity(),
        check_oscillations(v),
        check_vdp(v),
        check_integrator(),
        check_round_trip(),
    ]
    return results
