"""Quadratic invariant manifold ``z = h(x, y)`` over the stable direction.

The order-2 invariance equation ``z' - h_x x' - h_y y' = 0`` reduces to a
3x3 linear system for the coefficients of ``h``. The generic path builds that
system from the planar linear part of the vector field; the closed forms are
kept separately so the two can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, SingularSystemError
from .model import SystemKind, SystemSpec, full_rhs

__all__ = [
    "ManifoldQuadratic",
    "planar_linear_part",
    "homological_matrix",
    "solve_lambda_omega_manifold",
    "solve_lienard_manifold",
    "solve_manifold",
    "lambda_omega_closed_form",
    "lienard_closed_form",
    "manifold_eval",
    "manifold_residual",
    "residual_slope",
]


@dataclass(frozen=True)
class ManifoldQuadratic:
    """``h(x, y) = a0 x^2 + a1 xy + a2 y^2``."""

    a0: float
    a1: float
    a2: float

    def __call__(self, x, y):
        return self.a0 * x * x + self.a1 * x * y + self.a2 * y * y

    def gradient(self, x, y) -> tuple[float, float]:
        return 2 * self.a0 * x + self.a1 * y, self.a1 * x + 2 * self.a2 * y

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2])

    def max_abs_diff(self, other: "ManifoldQuadratic") -> float:
        return float(np.max(np.abs(self.as_array() - other.as_array())))


def manifold_eval(m: ManifoldQuadratic, p: Sequence[float]) -> float:
    x, y = p
    return m(float(x), float(y))


def planar_linear_part(kind: SystemKind, param: float) -> np.ndarray:
    """Jacobian of the planar block at the origin (``param`` is gamma or k)."""
    if SystemKind(kind) is SystemKind.LAMBDA_OMEGA:
        return np.array([[param, -1.0], [1.0, param]])
    return np.array([[0.0, 1.0], [-1.0, param]])


def homological_matrix(planar: np.ndarray, lam: float) -> np.ndarray:
    """Matrix of ``h -> -lam h - grad(h) . (A p)`` on the basis (x^2, xy, y^2).

    Basis element ``j`` is ``x^(2-j) y^j``; rows are coefficients of the same
    basis in the image.
    """
    A = np.asarray(planar, dtype=float)
    L = np.zeros((3, 3))
    for j in range(3):
        i = 2 - j
        L[j, j] = -lam - (i * A[0, 0] + j * A[1, 1])
        if i:
            # x^(i-1) y^j * A01 y -> shifts one power from x to y
            L[j + 1, j] -= i * A[0, 1]
        if j:
            L[j - 1, j] -= j * A[1, 0]
    return L


def _solve(planar: np.ndarray, lam: float, e0: float, e1: float, e3: float,
           label: str) -> ManifoldQuadratic:
    if not (math.isfinite(lam) and lam > 0):
        raise DomainError(f"lambda must be finite and > 0, got {lam}")
    L = homological_matrix(planar, lam)
    rhs = -np.array([e0, e3, e1], dtype=float)
    scale = float(np.max(np.abs(L)))
    if abs(np.linalg.det(L)) <= 1e-12 * scale**3:
        raise SingularSystemError(f"order-2 manifold system is singular at {label}")
    a = np.linalg.solve(L, rhs)
    return ManifoldQuadratic(*(float(v) for v in a))


def solve_lambda_omega_manifold(gamma: float, lam: float, e0: float = 0.0,
                                e1: float = 0.0, e3: float = 1.0) -> ManifoldQuadratic:
    return _solve(planar_linear_part(SystemKind.LAMBDA_OMEGA, gamma), lam, e0, e1, e3,
                  f"gamma={gamma!r}, lambda={lam!r}")


def solve_lienard_manifold(k: float, lam: float, e0: float = 0.0, e1: float = 0.0,
                           e3: float = 1.0) -> ManifoldQuadratic:
    """Order-2 manifold of the Lienard family.

    The quadratic part of ``F`` is not part of this system: ``F*y`` is at
    least cubic.
    """
    if lam + 2 * k == 0:
        raise SingularSystemError(
            f"closed form has a pole at lambda + 2k = 0 (k={k!r}, lambda={lam!r})")
    return _solve(planar_linear_part(SystemKind.LIENARD, k), lam, e0, e1, e3,
                  f"k={k!r}, lambda={lam!r}")


def solve_manifold(spec: SystemSpec) -> ManifoldQuadratic:
    e0, e1, _, e3, _, _ = spec.e
    if spec.kind is SystemKind.LAMBDA_OMEGA:
        return solve_lambda_omega_manifold(spec.gamma, spec.lambda_stable, e0, e1, e3)
    return solve_lienard_manifold(spec.k, spec.lambda_stable, e0, e1, e3)


def lambda_omega_closed_form(gamma: float, lam: float, e0: float = 0.0,
                             e1: float = 0.0, e3: float = 1.0) -> ManifoldQuadratic:
    s = lam + 2 * gamma
    D = lam * s + 2 * gamma * s + 4
    if s == 0 or D == 0:
        raise SingularSystemError(f"closed form undefined at gamma={gamma!r}, lambda={lam!r}")
    num = e0 * s * s + 2 * (e0 + e1) - e3 * s
    a0 = (e0 * s + 2 * (e0 + e1) / s - e3) / D
    a1 = e0 - num / D
    a2 = (e0 + e1) / s - num / (s * D)
    return ManifoldQuadratic(a0, a1, a2)


def lienard_closed_form(k: float, lam: float, e0: float = 0.0, e1: float = 0.0,
                        e3: float = 1.0) -> ManifoldQuadratic:
    p = lam + 2 * k
    if p == 0:
        raise SingularSystemError(f"closed form has a pole at k={k!r}, lambda={lam!r}")
    delta = lam * lam + 2 + 2 * lam / p + lam * k
    if delta == 0:
        raise SingularSystemError(f"closed form undefined at k={k!r}, lambda={lam!r}")
    a0 = (lam * e0 + e3 + 2 * (e0 + e1) / p + e0 * k) / delta
    a1 = (lam * e3 + 2 * lam * e1 / p - 2 * e0) / delta
    a2 = (lam * lam * e1 + 2 * (e0 + e1) + lam * k * e1 - lam * e3) / (p * delta)
    return ManifoldQuadratic(a0, a1, a2)


def manifold_residual(spec: SystemSpec, m: ManifoldQuadratic, p: Sequence[float]) -> float:
    """Defect ``z' - h_x x' - h_y y'`` of the invariance equation at ``(x, y, h(x, y))``."""
    x, y = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"point must be finite, got {p}")
    xd, yd, zd = full_rhs(spec, (x, y, m(x, y)))
    hx, hy = m.gradient(x, y)
    return float(zd - hx * xd - hy * yd)


def residual_slope(spec: SystemSpec, m: ManifoldQuadratic,
                   direction: Sequence[float] = (1.0, 1.0),
                   eps: Sequence[float] = (1e-1, 1e-2, 1e-3)) -> float:
    """Least-squares log-log slope of ``|residual(eps * direction)|`` against ``eps``.

    A correct order-2 manifold leaves only cubic and higher terms (slope >= 3);
    a wrong quadratic coefficient leaks a quadratic term (slope 2).
    """
    ux, uy = direction
    res = [abs(manifold_residual(spec, m, (t * ux, t * uy))) for t in eps]
    if min(res) == 0.0:
        return math.inf
    slope, _ = np.polyfit(np.log(eps), np.log(res), 1)
    return float(slope)
