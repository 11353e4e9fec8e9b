"""Closed-form limit-cycle predictions, averaging oracles and measured statistics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import bisect
from scipy.signal import find_peaks

from .dynamics import PolarSeries, polar_rhs
from .errors import DomainError, InsufficientDataError
from .manifold import ManifoldQuadratic, solve_manifold
from .model import SystemKind, SystemSpec, VdpSpec, make_field, vdp_field

__all__ = [
    "AnalysisReport",
    "base_radius",
    "predicted_radius",
    "predicted_angular_velocity",
    "predicted_period",
    "averaged_radial_root",
    "averaged_angular_velocity",
    "averaged_prediction",
    "vdp_averaged_radius",
    "vdp_modified_radius",
    "post_transient",
    "estimate_mean_radius",
    "measure_angular_velocity",
    "count_radial_oscillations",
    "predictions_for",
    "analyze",
]

TWO_PI = 2 * math.pi
QUADRATURE_POINTS = 4096
DEFAULT_TRANSIENT_CUT = 0.5
DEFAULT_MIN_TRANSIENT_TIME = 20.0


def _check_positive(gamma: float, lam: float):
    if not (gamma > 0 and lam > 0 and math.isfinite(gamma) and math.isfinite(lam)):
        raise DomainError(f"gamma and lambda must be finite and > 0, got {gamma}, {lam}")


def _denominator(gamma: float, lam: float) -> float:
    s = lam + 2 * gamma
    return lam * s + 2 * gamma * s + 4


def base_radius(gamma: float) -> float:
    """Radius ``sqrt(gamma)`` of the planar lambda-omega limit cycle."""
    if not (gamma >= 0 and math.isfinite(gamma)):
        raise DomainError(f"gamma must be finite and >= 0, got {gamma}")
    return math.sqrt(gamma)


def _radius_with_denominator(gamma: float, lam: float, D: float) -> float:
    shift = (lam + 2 * gamma) / (4 * D)
    assert shift < 1, "averaged cubic correction exceeds the base growth"
    return math.sqrt(gamma / (1 - shift))


def predicted_radius(gamma: float, lam: float) -> float:
    """Mean radius of the limit cycle once the stable direction is coupled in."""
    _check_positive(gamma, lam)
    return _radius_with_denominator(gamma, lam, _denominator(gamma, lam))


def predicted_angular_velocity(gamma: float, lam: float) -> float:
    _check_positive(gamma, lam)
    s = lam + 2 * gamma
    return 1 - 2 * gamma / (4 * _denominator(gamma, lam) - s)


def predicted_period(gamma: float, lam: float) -> float:
    return TWO_PI / predicted_angular_velocity(gamma, lam)


def _theta_grid(n: int = QUADRATURE_POINTS) -> np.ndarray:
    # periodic trapezoid rule == plain mean over an equispaced grid
    return TWO_PI * np.arange(n) / n


def _bisect_root(rate, lo: float, hi: float) -> float:
    f_lo, f_hi = rate(lo), rate(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise DomainError(f"averaged radial rate has no sign change on [{lo:g}, {hi:g}]")
    return bisect(rate, lo, hi, xtol=1e-12, maxiter=200)


def averaged_radial_root(gamma: float, lam: float, m: ManifoldQuadratic | None = None,
                         n: int = QUADRATURE_POINTS) -> float:
    """Radius where the angle-averaged radial rate vanishes.

    Without ``m`` the rate comes from ``polar_rhs``; with ``m`` it is the
    radial projection of the reduced Cartesian flow on that manifold.
    """
    _check_positive(gamma, lam)
    th = _theta_grid(n)
    if m is None:
        def rate(R):
            return float(np.mean(polar_rhs(gamma, lam, R, th)[0]))
    else:
        cos, sin = np.cos(th), np.sin(th)

        def rate(R):
            x, y = R * cos, R * sin
            growth = gamma - R * R
            h = m(x, y)
            xd = growth * x - y + y * h
            yd = x + growth * y + x * h
            return float(np.mean((x * xd + y * yd) / R))

    root = math.sqrt(gamma)
    return _bisect_root(rate, root / 2, 2 * root)


def averaged_angular_velocity(gamma: float, lam: float, R: float,
                              n: int = QUADRATURE_POINTS) -> float:
    """Angle-average of ``theta'`` at fixed radius ``R``."""
    return float(np.mean(polar_rhs(gamma, lam, R, _theta_grid(n))[1]))


def averaged_prediction(spec: SystemSpec, n: int = QUADRATURE_POINTS) -> tuple[float, float]:
    """(mean radius, mean angular velocity) by averaging the flow restricted to the manifold.

    Works for any coupling profile of the lambda-omega family; the angular
    velocity is the angle-average of ``theta'`` at the averaged radius.
    """
    if spec.kind is not SystemKind.LAMBDA_OMEGA:
        raise DomainError("averaged predictions need the lambda_omega family")
    _check_positive(spec.gamma, spec.lambda_stable)
    m = solve_manifold(spec)
    f = make_field(spec)
    th = _theta_grid(n)
    cos, sin = np.cos(th), np.sin(th)

    def planar(R):
        x, y = R * cos, R * sin
        xd, yd, _ = f(0.0, np.array([x, y, m(x, y)]))
        return x, y, xd, yd

    def rate(R):
        x, y, xd, yd = planar(R)
        return float(np.mean((x * xd + y * yd) / R))

    root = math.sqrt(spec.gamma)
    R = _bisect_root(rate, root / 2, 2 * root)
    x, y, xd, yd = planar(R)
    omega = float(np.mean((x * yd - y * xd) / (R * R)))
    return R, omega


def vdp_averaged_radius(spec: VdpSpec, n: int = QUADRATURE_POINTS) -> float:
    """Root of the angle-averaged Van der Pol radial rate (circular-orbit approximation)."""
    th = _theta_grid(n)
    cos, sin = np.cos(th), np.sin(th)

    def rate(r):
        x, y = r * cos, r * sin
        xd, yd = vdp_field(spec, x, y)
        return float(np.mean((x * xd + y * yd) / r))

    return _bisect_root(rate, 1.0, 4.0)


def vdp_modified_radius(lam: float) -> float:
    """Van der Pol mean radius 2 (gamma = 4) shifted by a stable direction of rate ``lam``."""
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    return predicted_radius(4.0, lam)


def post_transient(series: PolarSeries, transient_cut: float = DEFAULT_TRANSIENT_CUT,
                   min_time: float = DEFAULT_MIN_TRANSIENT_TIME) -> PolarSeries:
    """Drop the leading ``transient_cut`` fraction of samples or ``t < t0 + min_time``,
    whichever removes more."""
    if not 0 <= transient_cut < 1:
        raise DomainError(f"transient_cut must lie in [0, 1), got {transient_cut}")
    if len(series) == 0:
        raise InsufficientDataError("empty series")
    by_fraction = math.ceil(transient_cut * len(series))
    by_time = int(np.searchsorted(series.times, series.times[0] + min_time, side="left"))
    start = max(by_fraction, by_time)
    if start >= len(series) - 1:
        raise InsufficientDataError("nothing left after discarding the transient")
    return series.window(start)


def _crossing_time(series: PolarSeries, target: float) -> float:
    """First time at which |theta - theta_0| reaches ``target`` (linear interpolation)."""
    swept = np.abs(series.theta - series.theta[0])
    i = int(np.argmax(swept >= target))
    if swept[i] < target:
        raise InsufficientDataError("series does not sweep the requested angle")
    if i == 0:
        return float(series.times[0])
    w = (target - swept[i - 1]) / (swept[i] - swept[i - 1])
    return float(series.times[i - 1] + w * (series.times[i] - series.times[i - 1]))


def _full_rotations(series: PolarSeries, minimum: int) -> tuple[int, float]:
    swept = abs(series.theta[-1] - series.theta[0])
    n_rot = int(math.floor(swept / TWO_PI))
    if n_rot < minimum:
        raise InsufficientDataError(
            f"post-transient window covers {swept / TWO_PI:.2f} rotations, need >= {minimum}")
    return n_rot, _crossing_time(series, n_rot * TWO_PI)


def estimate_mean_radius(series: PolarSeries, transient_cut: float = DEFAULT_TRANSIENT_CUT,
                         min_time: float = DEFAULT_MIN_TRANSIENT_TIME) -> float:
    """Time-average of R over a whole number of rotations after the transient.

    The radial oscillation has period a quarter rotation, so whole rotations
    are also whole radial periods.
    """
    w = post_transient(series, transient_cut, min_time)
    _, t_stop = _full_rotations(w, 3)
    keep = w.times < t_stop
    t = np.append(w.times[keep], t_stop)
    R = np.append(w.R[keep], np.interp(t_stop, w.times, w.R))
    return float(np.trapezoid(R, t) / (t[-1] - t[0]))


def measure_angular_velocity(series: PolarSeries, transient_cut: float = DEFAULT_TRANSIENT_CUT,
                             min_time: float = DEFAULT_MIN_TRANSIENT_TIME) -> float:
    """Swept angle over elapsed time across a whole number of rotations after the transient."""
    w = post_transient(series, transient_cut, min_time)
    n_rot, t_stop = _full_rotations(w, 3)
    sign = 1.0 if w.theta[-1] >= w.theta[0] else -1.0
    return sign * n_rot * TWO_PI / (t_stop - w.times[0])


def count_radial_oscillations(series: PolarSeries,
                              transient_cut: float = DEFAULT_TRANSIENT_CUT,
                              min_time: float = DEFAULT_MIN_TRANSIENT_TIME,
                              prominence: float = 1e-4) -> int:
    """Number of local maxima of R over the first full rotation after the transient.

    The rotation window is treated as periodic in the angle so a maximum
    that straddles the window edge is counted once. Maxima with prominence
    below ``prominence * mean(R)`` are ignored.
    """
    w = post_transient(series, transient_cut, min_time)
    swept = np.abs(w.theta - w.theta[0])
    if swept[-1] < TWO_PI:
        raise InsufficientDataError("post-transient window is shorter than one rotation")
    R = w.R[swept < TWO_PI]
    if len(R) < 3:
        raise InsufficientDataError("too few samples in one rotation")
    mean = float(np.mean(R))
    if mean == 0.0:
        return 0
    pad = len(R) // 2
    ring = np.concatenate([R[-pad:], R, R[:pad]])
    peaks, _ = find_peaks(ring, prominence=prominence * mean)
    return int(np.count_nonzero((peaks >= pad) & (peaks < pad + len(R))))


@dataclass
class AnalysisReport:
    measured_mean_radius: float
    predicted_radius: float
    base_radius: float
    measured_angular_velocity: float
    predicted_angular_velocity: float
    predicted_period: float
    oscillations_per_cycle: int
    relative_errors: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.relative_errors:
            self.relative_errors = {
                "radius": abs(self.measured_mean_radius - self.predicted_radius)
                / self.predicted_radius,
                "angular_velocity": abs(self.measured_angular_velocity
                                        - self.predicted_angular_velocity)
                / self.predicted_angular_velocity,
            }

    def to_dict(self) -> dict:
        return asdict(self)


def predictions_for(spec: SystemSpec) -> tuple[float, float]:
    """Predicted (mean radius, mean angular velocity) for a lambda-omega system."""
    if spec.kind is not SystemKind.LAMBDA_OMEGA:
        raise DomainError("no limit-cycle prediction for the lienard family")
    if spec.is_uncoupled:
        return base_radius(spec.gamma), 1.0
    if spec.has_default_profile:
        return (predicted_radius(spec.gamma, spec.lambda_stable),
                predicted_angular_velocity(spec.gamma, spec.lambda_stable))
    return averaged_prediction(spec)


def analyze(series: PolarSeries, spec: SystemSpec,
            transient_cut: float = DEFAULT_TRANSIENT_CUT,
            min_time: float = DEFAULT_MIN_TRANSIENT_TIME) -> AnalysisReport:
    radius, omega = predictions_for(spec)
    return AnalysisReport(
        measured_mean_radius=estimate_mean_radius(series, transient_cut, min_time),
        predicted_radius=radius,
        base_radius=base_radius(spec.gamma),
        measured_angular_velocity=measure_angular_velocity(series, transient_cut, min_time),
        predicted_angular_velocity=omega,
        predicted_period=TWO_PI / omega,
        oscillations_per_cycle=count_radial_oscillations(series, transient_cut, min_time),
    )
