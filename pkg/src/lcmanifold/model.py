"""System families and their vector fields.

Two block-diagonal 3-D families share the same quadratic coupling layout:

* ``LAMBDA_OMEGA``: planar lambda-omega oscillator with growth ``gamma``
  (radial law ``r' = (gamma - r^2) r``, unit rotation) plus a stable
  direction ``z' = -lambda z``.
* ``LIENARD``: ``x' = y``, ``y' = k y - x - F(x, y) y`` plus the same stable
  direction.

Each of the three components receives a quadratic coupling over the monomial
basis ``(x^2, y^2, z^2, xy, yz, zx)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "SystemKind",
    "SystemSpec",
    "VdpSpec",
    "LienardClass",
    "MONOMIALS",
    "full_rhs",
    "vdp_rhs",
    "vdp_field",
    "classify_lienard",
    "make_field",
    "coupling",
]

MONOMIALS = ("x^2", "y^2", "z^2", "xy", "yz", "zx")

# Coupling profile that produces the reduced equations z*y in x' and z*x in y'.
DEFAULT_C = (0.0, 0.0, 0.0, 0.0, 1.0, 0.0)
DEFAULT_D = (0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
DEFAULT_E = (0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
ZERO6 = (0.0,) * 6


class SystemKind(str, enum.Enum):
    LAMBDA_OMEGA = "lambda_omega"
    LIENARD = "lienard"


class LienardClass(str, enum.Enum):
    CENTRE = "centre"
    LIMIT_CYCLE = "limit_cycle"
    STABLE_FOCUS = "stable_focus"


def _six(name: str, values: Sequence[float]) -> tuple[float, ...]:
    vals = tuple(float(v) for v in values)
    if len(vals) != 6:
        raise DomainError(f"{name} needs 6 coefficients, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise DomainError(f"{name} has non-finite coefficients: {vals}")
    return vals


@dataclass(frozen=True)
class SystemSpec:
    """Parameterization of a 3-D coupled oscillator.

    ``gamma`` is read for the lambda-omega family and ``k`` for the Lienard
    family. ``friction`` holds the Lienard damping polynomial
    ``F(x, y) = sum(coef * x**i * y**j)`` as ``(i, j, coef)`` triples; every
    term must have total degree >= 2 so that ``F(0, 0) = 0`` and ``F*y``
    enters the dynamics at cubic order.
    """

    kind: SystemKind = SystemKind.LAMBDA_OMEGA
    gamma: float = 4.0
    k: float = 0.0
    lambda_stable: float = 1.0
    c: tuple[float, ...] = DEFAULT_C
    d: tuple[float, ...] = DEFAULT_D
    e: tuple[float, ...] = DEFAULT_E
    friction: tuple[tuple[int, int, float], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "kind", SystemKind(self.kind))
        for name in ("c", "d", "e"):
            object.__setattr__(self, name, _six(name, getattr(self, name)))
        for name in ("gamma", "k", "lambda_stable"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.lambda_stable <= 0:
            raise DomainError(f"lambda_stable must be > 0, got {self.lambda_stable}")
        terms = []
        for term in self.friction:
            i, j, coef = term
            if int(i) != i or int(j) != j or i < 0 or j < 0:
                raise DomainError(f"friction exponents must be non-negative ints: {term}")
            if i + j < 2:
                raise DomainError(f"friction term {term} has degree < 2")
            terms.append((int(i), int(j), float(coef)))
        object.__setattr__(self, "friction", tuple(terms))

    @classmethod
    def lambda_omega(cls, gamma: float, lam: float, *, c=DEFAULT_C, d=DEFAULT_D,
                     e=DEFAULT_E) -> "SystemSpec":
        return cls(SystemKind.LAMBDA_OMEGA, gamma=gamma, lambda_stable=lam, c=c, d=d, e=e)

    @classmethod
    def lienard(cls, k: float, lam: float, *, c=DEFAULT_C, d=DEFAULT_D, e=DEFAULT_E,
                friction=()) -> "SystemSpec":
        return cls(SystemKind.LIENARD, k=k, lambda_stable=lam, c=c, d=d, e=e,
                   friction=friction)

    @classmethod
    def uncoupled(cls, gamma: float, lam: float = 1.0) -> "SystemSpec":
        return cls(SystemKind.LAMBDA_OMEGA, gamma=gamma, lambda_stable=lam,
                   c=ZERO6, d=ZERO6, e=ZERO6)

    @property
    def is_uncoupled(self) -> bool:
        return not any(self.c) and not any(self.d) and not any(self.e)

    @property
    def has_default_profile(self) -> bool:
        return self.c == DEFAULT_C and self.d == DEFAULT_D and self.e == DEFAULT_E


@dataclass(frozen=True)
class VdpSpec:
    mu: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise DomainError(f"mu must be finite and > 0, got {self.mu}")


def coupling(coefs: Sequence[float], x: float, y: float, z: float) -> float:
    """Evaluate a quadratic form over the ``(x^2, y^2, z^2, xy, yz, zx)`` basis."""
    c0, c1, c2, c3, c4, c5 = coefs
    return c0 * x * x + c1 * y * y + c2 * z * z + c3 * x * y + c4 * y * z + c5 * z * x


def _friction(terms, x: float, y: float) -> float:
    return sum(coef * x**i * y**j for i, j, coef in terms)


def make_field(spec: SystemSpec) -> Callable[[float, np.ndarray], np.ndarray]:
    """Return an unchecked ``f(t, s)`` suitable for an integrator."""
    c, d, e, lam = spec.c, spec.d, spec.e, spec.lambda_stable

    if spec.kind is SystemKind.LAMBDA_OMEGA:
        g = spec.gamma

        def f(t, s):
            x, y, z = s
            growth = g - (x * x + y * y)
            return np.array([
                growth * x - y + coupling(c, x, y, z),
                x + growth * y + coupling(d, x, y, z),
                -lam * z + coupling(e, x, y, z),
            ])
    else:
        k, terms = spec.k, spec.friction

        def f(t, s):
            x, y, z = s
            return np.array([
                y + coupling(c, x, y, z),
                k * y - x - _friction(terms, x, y) * y + coupling(d, x, y, z),
                -lam * z + coupling(e, x, y, z),
            ])

    return f


def _finite_state(s, n: int) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    if arr.shape != (n,):
        raise DomainError(f"expected a state of length {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"state must be finite, got {arr}")
    return arr


def full_rhs(spec: SystemSpec, s) -> np.ndarray:
    """Time derivative ``(x', y', z')`` of the 3-D system at state ``s``."""
    return make_field(spec)(0.0, _finite_state(s, 3))


def vdp_field(spec: VdpSpec, x, y):
    """Unchecked Van der Pol field; ``x`` and ``y`` may be arrays."""
    return y, -spec.mu * (x * x - 1.0) * y - x


def vdp_rhs(spec: VdpSpec, s) -> np.ndarray:
    x, y = _finite_state(s, 2)
    return np.array(vdp_field(spec, x, y))


def classify_lienard(k: float) -> LienardClass:
    """Type of the origin for ``x' = y, y' = k y - x`` (trace ``k``, det 1)."""
    if not math.isfinite(k):
        raise DomainError(f"k must be finite, got {k}")
    if k == 0:
        return LienardClass.CENTRE
    return LienardClass.LIMIT_CYCLE if k > 0 else LienardClass.STABLE_FOCUS
