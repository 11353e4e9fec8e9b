"""Time integration of the full, reduced and polar systems."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, IntegrationError
from .manifold import ManifoldQuadratic, solve_lambda_omega_manifold
from .model import SystemKind, SystemSpec, make_field

__all__ = [
    "Trajectory",
    "PolarSeries",
    "IntegratorConfig",
    "integrate",
    "reduced_rhs",
    "polar_rhs",
    "to_polar",
    "angular_speed_bound",
    "simulate_full",
    "simulate_reduced",
    "simulate_polar",
]

Rhs = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n_samples, dim)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if t.ndim != 1 or len(t) != len(s):
            raise DomainError("times and states must have equal length")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise DomainError("times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(s))):
            raise DomainError("trajectory contains non-finite values")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class PolarSeries:
    """Radius and continuously unwrapped angle sampled in time."""

    times: np.ndarray
    R: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in (self.times, self.R, self.theta)]
        if len({len(a) for a in arrays}) != 1:
            raise DomainError("times, R and theta must have equal length")
        if np.any(arrays[1] < 0):
            raise DomainError("R must be non-negative")
        if len(arrays[2]) > 1 and np.any(np.abs(np.diff(arrays[2])) >= math.pi):
            raise DomainError("theta must be unwrapped (|dtheta| < pi between samples)")
        for name, a in zip(("times", "R", "theta"), arrays):
            object.__setattr__(self, name, a)

    def __len__(self):
        return len(self.times)

    def window(self, start: int, stop: int | None = None) -> "PolarSeries":
        return PolarSeries(self.times[start:stop], self.R[start:stop], self.theta[start:stop])


@dataclass(frozen=True)
class IntegratorConfig:
    """``step`` is used by ``rk4``, ``tol`` (rtol = atol) by ``rk45``."""

    method: Literal["rk4", "rk45"] = "rk45"
    tol: float = 1e-9
    step: float = 0.01
    t_end: float = 100.0
    sample_interval: float = 0.01

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise DomainError(f"unknown integration method {self.method!r}")
        if not (self.tol > 0 and self.step > 0 and self.sample_interval > 0):
            raise DomainError("tol, step and sample_interval must be > 0")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise DomainError(f"t_end must be finite and >= 0, got {self.t_end}")

    def sample_times(self) -> np.ndarray:
        n = int(math.floor(self.t_end / self.sample_interval + 1e-9))
        return np.arange(n + 1) * self.sample_interval


def _rk4_step(f: Rhs, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _integrate_rk4(f: Rhs, y0: np.ndarray, times: np.ndarray, step: float) -> np.ndarray:
    out = np.empty((len(times), len(y0)))
    out[0] = y0
    y = y0
    for i in range(1, len(times)):
        t0, t1 = times[i - 1], times[i]
        n = max(1, math.ceil((t1 - t0) / step - 1e-9))
        h = (t1 - t0) / n
        for j in range(n):
            with np.errstate(over="ignore", invalid="ignore"):
                y_new = _rk4_step(f, t0 + j * h, y, h)
            if not np.all(np.isfinite(y_new)):
                raise IntegrationError("state became non-finite", t0 + j * h)
            y = y_new
        out[i] = y
    return out


class _NonFinite(Exception):
    pass


def _integrate_rk45(f: Rhs, y0: np.ndarray, times: np.ndarray, tol: float) -> np.ndarray:
    last_good = [float(times[0])]

    def guarded(t, y):
        if not np.all(np.isfinite(y)):
            raise _NonFinite
        last_good[0] = max(last_good[0], t)
        dy = f(t, y)
        if not np.all(np.isfinite(dy)):
            raise _NonFinite
        return dy

    try:
        sol = solve_ivp(guarded, (times[0], times[-1]), y0, method="RK45",
                        t_eval=times, rtol=tol, atol=tol)
    except _NonFinite:
        raise IntegrationError("state became non-finite", last_good[0]) from None
    if sol.status != 0:
        raise IntegrationError(sol.message, last_good[0])
    return sol.y.T.copy()


def integrate(rhs: Rhs, y0: Sequence[float], cfg: IntegratorConfig) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` from t=0 and sample every ``cfg.sample_interval``."""
    y0 = np.asarray(y0, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise DomainError(f"initial state must be finite, got {y0}")
    times = cfg.sample_times()
    if len(times) == 1:
        return Trajectory(times, y0[None, :].copy())
    if cfg.method == "rk4":
        states = _integrate_rk4(rhs, y0, times, cfg.step)
    else:
        states = _integrate_rk45(rhs, y0, times, cfg.tol)
    return Trajectory(times, states)


def _denominator(gamma: float, lam: float) -> float:
    s = lam + 2 * gamma
    return lam * s + 2 * gamma * s + 4


def reduced_rhs(gamma: float, lam: float, p: Sequence[float],
                m: ManifoldQuadratic | None = None) -> np.ndarray:
    """Planar flow restricted to ``z = h(x, y)`` under the couplings ``f1 = yz, f2 = xz``.

    ``m`` defaults to the order-2 manifold for ``(gamma, lam)`` with ``f3 = xy``.
    """
    if m is None:
        m = solve_lambda_omega_manifold(gamma, lam)
    x, y = p
    growth = gamma - (x * x + y * y)
    h = m(x, y)
    return np.array([growth * x - y + y * h, x + growth * y + x * h])


def polar_rhs(gamma: float, lam: float, R, theta):
    """``(R', theta')`` of the reduced flow with the default coupling profile.

    ``R`` and ``theta`` may be scalars or broadcastable arrays.
    """
    if np.any(np.asarray(R) < 0):
        raise DomainError(f"R must be >= 0, got {R}")
    s = lam + 2 * gamma
    D = _denominator(gamma, lam)
    bracket = -np.sin(4 * theta) / 2 - (s / 4) * np.cos(4 * theta) + s / 4
    c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
    rdot = (gamma - R * R) * R + R**3 * bracket / D
    thetadot = 1 + R * R * c2 * (-c2 + s2 / 2 * s) / D
    return rdot, thetadot


def angular_speed_bound(gamma: float, lam: float, r_max: float) -> float:
    """Upper bound on ``|theta'|`` of the reduced flow for ``R <= r_max``."""
    s = lam + 2 * gamma
    return 1 + r_max * r_max * (1 + abs(s) / 2) / _denominator(gamma, lam)


def to_polar(traj: Trajectory) -> PolarSeries:
    """Polar form of the first two state components with a continuous angle."""
    x, y = traj.states[:, 0], traj.states[:, 1]
    R = np.hypot(x, y)
    raw = np.arctan2(y, x)
    # carry the angle forward through samples sitting exactly on the origin
    zero = R == 0
    if np.any(zero):
        raw = raw.copy()
        prev = 0.0
        for i in range(len(raw)):
            if zero[i]:
                raw[i] = prev
            prev = raw[i]
    return PolarSeries(traj.times, R, np.unwrap(raw))


def _check_sampling(gamma: float, lam: float, r_max: float, cfg: IntegratorConfig):
    bound = angular_speed_bound(gamma, lam, r_max)
    if cfg.sample_interval * bound >= math.pi:
        raise DomainError(
            f"sample_interval={cfg.sample_interval} too coarse to unwrap the angle "
            f"(angular speed bound {bound:.3g})")


def simulate_full(spec: SystemSpec, s0: Sequence[float], cfg: IntegratorConfig) -> Trajectory:
    if spec.kind is SystemKind.LAMBDA_OMEGA and spec.gamma > 0:
        _check_sampling(spec.gamma, spec.lambda_stable,
                        max(math.hypot(s0[0], s0[1]), 2 * math.sqrt(spec.gamma)), cfg)
    return integrate(make_field(spec), s0, cfg)


def simulate_reduced(gamma: float, lam: float, p0: Sequence[float], cfg: IntegratorConfig,
                     m: ManifoldQuadratic | None = None) -> Trajectory:
    if m is None:
        m = solve_lambda_omega_manifold(gamma, lam)
    if gamma > 0:
        _check_sampling(gamma, lam, max(math.hypot(*p0), 2 * math.sqrt(gamma)), cfg)
    return integrate(lambda t, p: reduced_rhs(gamma, lam, p, m), p0, cfg)


def simulate_polar(gamma: float, lam: float, R0: float, theta0: float,
                   cfg: IntegratorConfig) -> PolarSeries:
    if R0 < 0:
        raise DomainError(f"R0 must be >= 0, got {R0}")

    def f(t, u):
        return np.array(polar_rhs(gamma, lam, max(u[0], 0.0), u[1]))

    traj = integrate(f, (R0, theta0), cfg)
    return PolarSeries(traj.times, np.maximum(traj.states[:, 0], 0.0), traj.states[:, 1])
