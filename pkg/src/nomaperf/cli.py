"""Command-line front end.

Exit codes: 0 success, 1 failed validation check, 2 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline, validate
from .config import ConfigError, ScenarioConfig, load_config

log = logging.getLogger("nomaperf")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2


def _overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    changes = {
        "seed": args.seed,
        "trials": args.trials,
        "quadrature_n": args.quadrature_n,
    }
    data = cfg.to_dict()
    data.update({k: v for k, v in changes.items() if v is not None})
    if args.oma_split:
        data["oma_split"] = True
    try:
        return ScenarioConfig(**data)
    except ConfigError as exc:
        raise ConfigError(f"after command-line overrides: {exc}") from None


def _load(args) -> ScenarioConfig:
    if args.config is None:
        raise ConfigError("--config is required for this command")
    return _overrides(load_config(args.config), args)


def cmd_outage(args) -> int:
    cfg = _load(args)
    if cfg.targets_bpcu is None:
        raise ConfigError("the outage command needs targets_bpcu in the config")
    for m, ok in enumerate(cfg.feasible(), start=1):
        if not ok:
            print(
                f"warning: user {m} violates a_j > phi_j * sum_(i>j) a_i; "
                f"users {m}..{cfg.users} are in outage at every SNR",
                file=sys.stderr,
            )
    rows, reports = pipeline.outage_sweep(cfg, args.workers)
    slopes = reports[0].diversity_slope if reports else []
    csv_path, _ = pipeline.write_artifacts(
        rows, pipeline.outage_columns(cfg.users), args.out, "outage", cfg,
        {"diversity_order_analytic": slopes},
    )
    for m, s in enumerate(slopes, start=1):
        if s is not None:
            print(f"user {m}: fitted diversity order {s:.3f}")
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_ergodic(args) -> int:
    cfg = _load(args)
    if cfg.targets_bpcu is not None:
        log.info("targets_bpcu ignored: ergodic rates use opportunistic targets")
    rows = pipeline.ergodic_sweep(cfg, args.workers)
    csv_path, _ = pipeline.write_artifacts(rows, pipeline.ERGODIC_COLUMNS, args.out, "ergodic", cfg)
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    rows = pipeline.grid_sweep(cfg, args.workers)
    csv_path, _ = pipeline.write_artifacts(rows, pipeline.SWEEP_COLUMNS, args.out, "sweep", cfg)
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args) if args.config else None
    trials = args.trials or (cfg.trials if cfg else 200_000)
    seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
    checks = validate.run_checks(cfg, fault=args.inject_fault, trials=trials, seed=seed, workers=args.workers)
    validate.format_table(checks)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON scenario file (schema 1)")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    common.add_argument("--quadrature-n", type=int, help="override the Chebyshev order N")
    common.add_argument("--oma-split", action="store_true", help="OMA user only holds 1/M of the slot")
    common.add_argument("--workers", type=int, default=1, help="parallel Monte Carlo workers")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="nomaperf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("outage", parents=[common], help="outage probability vs SNR").set_defaults(func=cmd_outage)
    sub.add_parser("ergodic", parents=[common], help="ergodic sum rates vs SNR").set_defaults(func=cmd_ergodic)
    sub.add_parser("sweep", parents=[common], help="ergodic rates over a users x alpha grid").set_defaults(func=cmd_sweep)
    p = sub.add_parser("validate", parents=[common], help="run the built-in consistency checks")
    p.add_argument("--inject-fault", choices=validate.FAULTS, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
