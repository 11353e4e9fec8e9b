"""Config-driven simulate / analyze / sweep steps shared by the CLI commands."""

from __future__ import annotations

import csv
import math
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analysis import AnalysisReport, analyze, predictions_for
from .config import ConfigError, RunConfig
from .dynamics import (PolarSeries, Trajectory, simulate_full, simulate_polar,
                       simulate_reduced, to_polar)
from .errors import InsufficientDataError
from .manifold import solve_manifold
from .model import SystemKind

HEADERS = {
    "full3d": ("t", "x", "y", "z"),
    "reduced2d": ("t", "x", "y", "z"),
    "polar": ("t", "R", "theta"),
}


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def simulate_target(cfg: RunConfig, target: str | None = None) -> np.ndarray:
    """Simulate and return rows matching ``HEADERS[target]``."""
    target = target or cfg.analysis.target
    spec, icfg = cfg.system, cfg.integrator
    x0, y0, z0 = cfg.initial_state
    if target == "full3d":
        traj = simulate_full(spec, (x0, y0, z0), icfg)
        return np.column_stack([traj.times, traj.states])

    if spec.kind is not SystemKind.LAMBDA_OMEGA:
        raise ConfigError(f"target {target!r} needs the lambda_omega family")
    if target == "reduced2d":
        if not (spec.has_default_profile or spec.is_uncoupled):
            raise ConfigError("reduced2d supports the default or zero coupling profile only")
        m = solve_manifold(spec)
        traj = simulate_reduced(spec.gamma, spec.lambda_stable, (x0, y0), icfg, m)
        x, y = traj.states[:, 0], traj.states[:, 1]
        return np.column_stack([traj.times, x, y, m(x, y)])
    if target == "polar":
        if not spec.has_default_profile:
            raise ConfigError("polar target supports the default coupling profile only")
        series = simulate_polar(spec.gamma, spec.lambda_stable, math.hypot(x0, y0),
                                math.atan2(y0, x0), icfg)
        return np.column_stack([series.times, series.R, series.theta])
    raise ConfigError(f"unknown target {target!r}")


def rows_to_series(rows: np.ndarray, target: str) -> PolarSeries:
    if len(rows) == 0:
        raise InsufficientDataError("trajectory has no rows")
    if target == "polar":
        return PolarSeries(rows[:, 0], rows[:, 1], rows[:, 2])
    return to_polar(Trajectory(rows[:, 0], rows[:, 1:]))


def write_csv(path: Path, header, rows) -> None:
    """Write atomically: a failed run never leaves a partial file behind."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".part")
    try:
        with tmp.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
        tmp.replace(path)
    finally:
        tmp.unlink(missing_ok=True)


def read_trajectory_csv(source) -> tuple[np.ndarray, str]:
    """Parse a trajectory CSV from a path or an open text stream."""
    if hasattr(source, "read"):
        header, rows = _parse_csv(source)
    else:
        with open(source, newline="") as fh:
            header, rows = _parse_csv(fh)
    if header == HEADERS["polar"]:
        target = "polar"
    elif header in (HEADERS["full3d"], ("t", "x", "y")):
        target = "full3d"
    else:
        raise ConfigError(f"unrecognized trajectory header {header}")
    return np.array(rows, dtype=float).reshape(len(rows), len(header)), target


def _parse_csv(fh):
    reader = csv.reader(fh)
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise InsufficientDataError("trajectory CSV is empty") from None
    try:
        rows = [[float(v) for v in row] for row in reader if row]
    except ValueError as ex:
        raise ConfigError(f"malformed trajectory CSV: {ex}") from None
    return header, rows


def analyze_rows(cfg: RunConfig, rows: np.ndarray, target: str) -> AnalysisReport:
    series = rows_to_series(rows, target)
    return analyze(series, cfg.system, cfg.analysis.transient_cut,
                   cfg.analysis.min_transient_time)


def run_analysis(cfg: RunConfig) -> AnalysisReport:
    target = cfg.analysis.target
    return analyze_rows(cfg, simulate_target(cfg, target), target)


def sweep_lambdas(cfg: RunConfig) -> list[float]:
    s = cfg.sweep
    if s.lambda_steps == 0:
        return []
    return [float(v) for v in np.linspace(s.lambda_min, s.lambda_max, s.lambda_steps)]


def sweep_row(cfg: RunConfig, lam: float) -> tuple[float, float, float]:
    """(lambda, predicted mean radius, simulated mean radius) for one lambda."""
    c = replace(cfg, system=replace(cfg.system, lambda_stable=lam))
    predicted, _ = predictions_for(c.system)
    return lam, predicted, run_analysis(c).measured_mean_radius
