"""JSON run configuration.

Every block is optional; missing fields take the defaults below. Unknown keys
are rejected so that typos fail loudly instead of silently using a default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .dynamics import IntegratorConfig
from .errors import DomainError
from .model import DEFAULT_C, DEFAULT_D, DEFAULT_E, SystemKind, SystemSpec

TARGETS = ("full3d", "reduced2d", "polar")


class ConfigError(DomainError):
    pass


@dataclass(frozen=True)
class AnalysisSettings:
    target: str = "reduced2d"
    transient_cut: float = 0.5
    min_transient_time: float = 20.0
    radius_tol: float = 0.02
    angular_velocity_tol: float = 0.02
    full_tol: float = 0.05


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "."
    formats: tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class SweepSettings:
    lambda_min: float = 1.0
    lambda_max: float = 10.0
    lambda_steps: int = 10


@dataclass(frozen=True)
class VerifySettings:
    gammas: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0, 9.0)
    lambdas: tuple[float, ...] = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
    ks: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)
    increment_gammas: tuple[float, ...] = (1.0, 4.0, 9.0)
    increment_lambdas: tuple[float, ...] = (0.5, 1.0, 2.0, 5.0, 10.0)
    full_lambdas: tuple[float, ...] = (1.0, 2.0, 5.0)


@dataclass(frozen=True)
class RunConfig:
    system: SystemSpec = field(default_factory=SystemSpec)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    initial_state: tuple[float, float, float] = (0.5, 0.0, 0.0)
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)
    output: OutputSettings = field(default_factory=OutputSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    verify: VerifySettings = field(default_factory=VerifySettings)


def _take(block: dict, allowed: set[str], where: str) -> dict:
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    return block


def _number(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where} must be a finite number, got {v!r}")
    return float(v)


def _numbers(v: Any, where: str) -> tuple[float, ...]:
    if not isinstance(v, list):
        raise ConfigError(f"{where} must be a list of numbers")
    return tuple(_number(x, f"{where}[{i}]") for i, x in enumerate(v))


def _system(block: dict) -> SystemSpec:
    b = _take(block, {"kind", "gamma", "k", "lambda", "c", "d", "e", "friction"}, "system")
    kind = b.get("kind", "lambda_omega")
    try:
        kind = SystemKind(kind)
    except ValueError:
        raise ConfigError(f"system.kind must be one of {[k.value for k in SystemKind]}") from None
    friction = []
    for i, term in enumerate(b.get("friction", [])):
        if not (isinstance(term, list) and len(term) == 3):
            raise ConfigError(f"system.friction[{i}] must be [i, j, coef]")
        friction.append(tuple(term))
    return SystemSpec(
        kind=kind,
        gamma=_number(b.get("gamma", 4.0), "system.gamma"),
        k=_number(b.get("k", 0.0), "system.k"),
        lambda_stable=_number(b.get("lambda", 1.0), "system.lambda"),
        c=_numbers(b["c"], "system.c") if "c" in b else DEFAULT_C,
        d=_numbers(b["d"], "system.d") if "d" in b else DEFAULT_D,
        e=_numbers(b["e"], "system.e") if "e" in b else DEFAULT_E,
        friction=tuple(friction),
    )


def parse_config(data: dict) -> RunConfig:
    top = _take(data, {"system", "integrator", "analysis", "output", "sweep", "verify"},
                "config")
    system = _system(top.get("system", {}))

    ib = _take(top.get("integrator", {}), {"method", "tol", "step", "t_end",
                                           "sample_interval", "initial_state"}, "integrator")
    ikw = {k: _number(v, f"integrator.{k}") for k, v in ib.items()
           if k not in ("method", "initial_state")}
    if "method" in ib:
        ikw["method"] = ib["method"]
    integrator = IntegratorConfig(**ikw)
    s0 = _numbers(ib.get("initial_state", [0.5, 0.0, 0.0]), "integrator.initial_state")
    if len(s0) not in (2, 3):
        raise ConfigError("integrator.initial_state needs 2 or 3 numbers")
    s0 = (s0 + (0.0,))[:3]

    ab = _take(top.get("analysis", {}), set(AnalysisSettings.__dataclass_fields__), "analysis")
    akw = {k: (v if k == "target" else _number(v, f"analysis.{k}")) for k, v in ab.items()}
    analysis = AnalysisSettings(**akw)
    if analysis.target not in TARGETS:
        raise ConfigError(f"analysis.target must be one of {TARGETS}")
    if not 0 <= analysis.transient_cut < 1:
        raise ConfigError("analysis.transient_cut must lie in [0, 1)")

    ob = _take(top.get("output", {}), {"directory", "formats"}, "output")
    output = OutputSettings(directory=str(ob.get("directory", ".")),
                            formats=tuple(ob.get("formats", ("csv", "json"))))

    sb = _take(top.get("sweep", {}), set(SweepSettings.__dataclass_fields__), "sweep")
    sweep = SweepSettings(
        lambda_min=_number(sb.get("lambda_min", 1.0), "sweep.lambda_min"),
        lambda_max=_number(sb.get("lambda_max", 10.0), "sweep.lambda_max"),
        lambda_steps=int(_number(sb.get("lambda_steps", 10), "sweep.lambda_steps")),
    )

    vb = _take(top.get("verify", {}), set(VerifySettings.__dataclass_fields__), "verify")
    verify = VerifySettings(**{k: _numbers(v, f"verify.{k}") for k, v in vb.items()})

    return RunConfig(system, integrator, s0, analysis, output, sweep, verify)


def load_config(path: str | None, stdin=None) -> RunConfig:
    """Read a config file, ``-`` for standard input, or ``None`` for all defaults."""
    if path is None:
        return RunConfig()
    try:
        if path == "-":
            import sys
            text = (stdin or sys.stdin).read()
        else:
            text = Path(path).read_text()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as ex:
        raise ConfigError(f"cannot read config {path!r}: {ex}") from None
    return parse_config(data)


def with_overrides(cfg: RunConfig, *, gamma=None, lam=None, t_end=None, out=None,
                   target=None, lambda_min=None, lambda_max=None,
                   lambda_steps=None) -> RunConfig:
    system = cfg.system
    if gamma is not None:
        system = replace(system, gamma=gamma)
    if lam is not None:
        system = replace(system, lambda_stable=lam)
    integrator = cfg.integrator if t_end is None else replace(cfg.integrator, t_end=t_end)
    analysis = cfg.analysis if target is None else replace(cfg.analysis, target=target)
    output = cfg.output if out is None else replace(cfg.output, directory=out)
    sweep = cfg.sweep
    for name, value in (("lambda_min", lambda_min), ("lambda_max", lambda_max),
                        ("lambda_steps", lambda_steps)):
        if value is not None:
            sweep = replace(sweep, **{name: value})
    if sweep.lambda_steps < 0:
        raise ConfigError("lambda_steps must be >= 0")
    if sweep.lambda_steps and not (0 < sweep.lambda_min <= sweep.lambda_max):
        raise ConfigError("lambda range must satisfy 0 < lambda_min <= lambda_max")
    return replace(cfg, system=system, integrator=integrator, analysis=analysis,
                   output=output, sweep=sweep)
