"""Command-line entry point: ``mechdesign {run,reproduce,verify,sweep}``.

Exit status is 0 on success, 1 when a check or reproduction threshold fails
(or a simulation breaks down numerically) and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, apply_overrides, load_config, parse_cli_overrides, serialize_config
from .engine import RunSummary, SimulationError, aggregate, run_experiment
from .experiments import ARTIFACTS
from .io import write_aggregate_csv, write_comparison_csv, write_run_csv

OUTPUT_ENV = "MECHDESIGN_OUTPUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _output_dir(arg: str | None) -> Path:
    path = Path(arg or os.environ.get(OUTPUT_ENV) or "results")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load(path: str | None, overrides: list[str]) -> ExperimentConfig:
    cfg = load_config(path) if path else ExperimentConfig()
    return apply_overrides(cfg, parse_cli_overrides(overrides)).validate()


def format_summary(name: str, s: RunSummary) -> str:
    lines = [f"{name} ({s.n_seeds} seeds)"]
    for metric, stat in s.as_dict().items():
        std = "n/a" if stat.std is None else f"{stat.std:.6g}"
        lines.append(f"  {metric:15s} {stat.mean:.6g} +- {std}")
    return "\n".join(lines)


def _write_runs(out: Path, prefix: str, runs) -> None:
    for seed, rows in runs:
        write_run_csv(out / f"{prefix}_seed{seed}.csv", rows)


def cmd_run(args) -> int:
    cfg = _load(args.config, args.overrides)
    out = _output_dir(args.output_dir)
    runs = run_experiment(cfg, args.workers)
    summary = aggregate(runs)
    _write_runs(out, cfg.name, runs)
    write_aggregate_csv(out / f"{cfg.name}_aggregate.csv", [(cfg.name, summary)])
    (out / f"{cfg.name}_config.txt").write_text(serialize_config(cfg))
    print(format_summary(cfg.name, summary))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    base = _load(args.config, args.overrides)
    out = _output_dir(args.output_dir)
    art = ARTIFACTS[args.artifact](base, args.workers)
    write_comparison_csv(out / f"{art.name}_comparison.csv", art.records)
    if art.summaries:
        write_aggregate_csv(out / f"{art.name}_aggregate.csv", art.summaries.items())
    if args.artifact == "fig1" or args.write_runs:
        for label, runs in art.runs.items():
            _write_runs(out, f"{art.name}_{label}", runs)
    for check in art.checks:
        print(check.line())
    return EXIT_OK if art.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    from .verify import run_checks

    checks = run_checks(fd_tol=args.fd_tol, n_configs=args.configs, seed=args.seed)
    for check in checks:
        print(check.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def _parse_grid(items: list[str]) -> dict[str, list[str]]:
    grid = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(item, "grid entries look like key=v1,v2,...")
        key, values = item.split("=", 1)
        grid[key] = [v for v in values.split(",") if v]
    return grid


def cmd_sweep(args) -> int:
    base = _load(args.config, args.overrides)
    grid = _parse_grid(args.grid)
    out = _output_dir(args.output_dir)
    keys = list(grid)
    entries = []
    for combo in itertools.product(*(grid[k] for k in keys)):
        point = dict(zip(keys, combo))
        label = "_".join(f"{k}={v}" for k, v in point.items()) or base.name
        cfg = apply_overrides(base, point).validate()
        summary = aggregate(run_experiment(cfg, args.workers))
        entries.append((label, summary))
        print(format_summary(label, summary))
    write_aggregate_csv(out / f"{base.name}_sweep.csv", entries)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mechdesign", description="Planning agents that shape learner incentives.",
                                     allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.allow_abbrev = False
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--output-dir", help=f"output directory (default ${OUTPUT_ENV} or ./results)")
        p.add_argument("--workers", type=int, default=None, help="processes used for seeds")

    p = sub.add_parser("run", help="run one experiment")
    p.add_argument("config_path", nargs="?", help="configuration file (same as --config)")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reproduce", help="regenerate a published table or figure")
    p.add_argument("artifact", choices=sorted(ARTIFACTS))
    p.add_argument("--write-runs", action="store_true", help="also write per-episode CSVs")
    common(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("verify", help="run gradient and estimator self-checks")
    p.add_argument("--fd-tol", type=float, default=1e-4)
    p.add_argument("--configs", type=int, default=100, help="random configurations per gradient check")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="cartesian grid over configuration keys")
    p.add_argument("--grid", action="append", default=[], help="key=v1,v2 (repeatable)")
    common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    args.overrides = extra
    if getattr(args, "config_path", None):
        if args.config:
            parser.error("give the configuration file once")
        args.config = args.config_path
    if args.command == "verify" and extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
