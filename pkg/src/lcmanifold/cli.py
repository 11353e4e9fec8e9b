"""Command-line front end: ``lcmanifold manifold|simulate|analyze|verify|sweep``.

Exit codes: 0 success, 1 verification failure, 2 invalid config, 3 singular
algebra, 4 integration failure, 5 insufficient data.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

from . import pipeline
from .analysis import predicted_radius
from .config import TARGETS, ConfigError, RunConfig, load_config, with_overrides
from .errors import DomainError, InsufficientDataError, IntegrationError, SingularSystemError
from .manifold import lambda_omega_closed_form, lienard_closed_form, solve_manifold
from .model import SystemKind
from .verify import doubled_denominator_radius, run_checks

log = logging.getLogger("lcmanifold")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_SINGULAR, EXIT_INTEGRATION, EXIT_DATA = range(6)


def _emit_json(cfg: RunConfig, name: str, payload: dict) -> None:
    text = json.dumps(payload, indent=2)
    print(text)
    if "json" in cfg.output.formats:
        out = Path(cfg.output.directory)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text + "\n")


def cmd_manifold(cfg: RunConfig, args) -> int:
    spec = cfg.system
    e0, e1, _, e3, _, _ = spec.e
    generic = solve_manifold(spec)
    if spec.kind is SystemKind.LAMBDA_OMEGA:
        closed = lambda_omega_closed_form(spec.gamma, spec.lambda_stable, e0, e1, e3)
    else:
        closed = lienard_closed_form(spec.k, spec.lambda_stable, e0, e1, e3)
    _emit_json(cfg, "manifold.json", {
        "kind": spec.kind.value,
        "a0": generic.a0, "a1": generic.a1, "a2": generic.a2,
        "closed_form": {"a0": closed.a0, "a1": closed.a1, "a2": closed.a2},
        "max_disc": generic.max_abs_diff(closed),
    })
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    target = cfg.analysis.target
    rows = pipeline.simulate_target(cfg, target)
    path = Path(cfg.output.directory) / f"trajectory_{target}.csv"
    pipeline.write_csv(path, pipeline.HEADERS[target], rows)
    print(path)
    return EXIT_OK


def cmd_analyze(cfg: RunConfig, args) -> int:
    if args.trajectory:
        rows, target = pipeline.read_trajectory_csv(args.trajectory)
    else:
        target = cfg.analysis.target
        rows = pipeline.simulate_target(cfg, target)
    report = pipeline.analyze_rows(cfg, rows, target)
    _emit_json(cfg, "report.json", report.to_dict())
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    v = cfg.verify
    empty = [name for name in v.__dataclass_fields__ if not getattr(v, name)]
    if empty:
        raise ConfigError(f"verify grid is empty: {empty}")
    radius_fn = doubled_denominator_radius if args.debug_double_denominator else predicted_radius
    results = run_checks(v, radius_fn)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  "
              f"margin={r.margin:+.3e}  {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("LCMANIFOLD_THREADS", "1")))
    except ValueError:
        raise ConfigError("LCMANIFOLD_THREADS must be an integer") from None


def cmd_sweep(cfg: RunConfig, args) -> int:
    lambdas = pipeline.sweep_lambdas(cfg)
    job = partial(pipeline.sweep_row, cfg)
    workers = min(_workers(), max(1, len(lambdas)))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, lambdas))  # map preserves input order
    else:
        rows = [job(lam) for lam in lambdas]
    path = Path(cfg.output.directory) / "sweep.csv"
    pipeline.write_csv(path, ("lambda", "predicted_radius", "simulated_radius"), rows)
    print(path)
    return EXIT_OK


COMMANDS = {
    "manifold": cmd_manifold,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file, '-' for stdin")
    common.add_argument("--out", help="output directory (overrides output.directory)")
    common.add_argument("--target", choices=TARGETS, help="system to integrate")
    common.add_argument("--gamma", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--t-end", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="lcmanifold",
        description="Limit-cycle manifold reduction of 3-D coupled oscillators.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("manifold", parents=[common], help="order-2 manifold coefficients")
    sub.add_parser("simulate", parents=[common], help="write a trajectory CSV")
    p = sub.add_parser("analyze", parents=[common], help="measured vs predicted statistics")
    p.add_argument("--trajectory", help="analyze an existing trajectory CSV")
    p = sub.add_parser("verify", parents=[common], help="run the self-check suite")
    p.add_argument("--debug-double-denominator", action="store_true", help=argparse.SUPPRESS)
    p = sub.add_parser("sweep", parents=[common], help="mean radius across a lambda range")
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--lambda-steps", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        cfg = with_overrides(cfg, gamma=args.gamma, lam=args.lam, t_end=args.t_end,
                             out=args.out, target=args.target,
                             lambda_min=getattr(args, "lambda_min", None),
                             lambda_max=getattr(args, "lambda_max", None),
                             lambda_steps=getattr(args, "lambda_steps", None))
        return COMMANDS[args.command](cfg, args)
    except InsufficientDataError as ex:
        log.error("%s", ex)
        return EXIT_DATA
    except SingularSystemError as ex:
        log.error("%s", ex)
        return EXIT_SINGULAR
    except IntegrationError as ex:
        log.error("%s", ex)
        return EXIT_INTEGRATION
    except DomainError as ex:
        log.error("%s", ex)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
