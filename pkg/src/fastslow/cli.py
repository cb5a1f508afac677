"""Command-line interface for the experiment harness.

Exit codes: 0 success, 1 at least one failed run, 2 configuration error.
"""
from __future__ import annotations

import argparse
import os
import sys

from .harness import (
    ExperimentSpec,
    compare_cost,
    drift_demo,
    ensure_reference,
    parse_config,
    run,
    sweep,
    write_cost_csv,
    write_rows_csv,
)
from .mgt import ConfigError
from .presets import load_preset
from .system import ProblemError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastslow",
        description="Benchmark harness for fast-slow ODE solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(name: str, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("config", nargs="?", help="experiment config file")
        sp.add_argument("--preset", help="built-in config name (paper-figN / desk-figN)")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--jobs", type=int, default=1, help="parallel runs per sweep")
        return sp

    with_config("run", "run each configured experiment once per eps")
    with_config("sweep", "run eps sweeps and fit convergence slopes")
    with_config("compare", "tabulate cost vs error at time checkpoints")
    with_config("reference", "precompute and cache reference solutions")

    dd = sub.add_parser("drift-demo", help="reference vs order-0/1/2 models on the drifting spiral")
    dd.add_argument("--eps", type=float, required=True)
    dd.add_argument("--T", type=float, required=True)
    dd.add_argument("--out", default="out")
    return parser


def _load_specs(args) -> list[ExperimentSpec]:
    if args.preset is not None and args.config is not None:
        raise ConfigError("give either a config file or --preset, not both")
    if args.preset is not None:
        text = load_preset(args.preset)
    elif args.config is not None:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}")
    else:
        raise ConfigError("missing config file (or use --preset)")
    return parse_config(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "drift-demo":
            return _cmd_drift_demo(args)
        specs = _load_specs(args)
        cache_dir = os.path.join(args.out, "reference_cache")
        if args.command == "run":
            return _cmd_run(args, specs, cache_dir)
        if args.command == "sweep":
            return _cmd_sweep(args, specs, cache_dir)
        if args.command == "compare":
            return _cmd_compare(args, specs, cache_dir)
        if args.command == "reference":
            return _cmd_reference(args, specs, cache_dir)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ProblemError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def _cmd_run(args, specs, cache_dir) -> int:
    rows = []
    for spec in specs:
        rows.extend(run(spec, cache_dir=cache_dir, jobs=args.jobs))
    write_rows_csv(os.path.join(args.out, "results.csv"), rows)
    failed = [r for r in rows if not r.ok]
    for row in rows:
        status = "ok" if row.ok else f"FAILED ({row.message})"
        print(f"eps={row.eps:g} {row.method}: error_l2={row.error_l2:.6g} {status}")
    print(f"wrote {os.path.join(args.out, 'results.csv')}")
    return 1 if failed else 0


def _cmd_sweep(args, specs, cache_dir) -> int:
    rows = []
    any_failed = False
    for spec in specs:
        result = sweep(spec, cache_dir=cache_dir, jobs=args.jobs)
        rows.extend(result.rows)
        any_failed = any_failed or not result.ok
        n_good = sum(r.ok for r in result.rows)
        if result.slope is None:
            print(f"{result.method}: slope unavailable ({n_good}/{len(result.rows)} rows usable)")
        else:
            print(
                f"{result.method}: slope={result.slope:.3f} r2={result.r_squared:.4f}"
                f" ({n_good}/{len(result.rows)} rows)"
            )
    write_rows_csv(os.path.join(args.out, "results.csv"), rows)
    print(f"wrote {os.path.join(args.out, 'results.csv')}")
    return 1 if any_failed else 0


def _cmd_compare(args, specs, cache_dir) -> int:
    try:
        table = compare_cost(specs, cache_dir=cache_dir)
    except ConfigError:
        raise
    except Exception as exc:
        print(f"comparison failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    path = os.path.join(args.out, "cost_table.csv")
    write_cost_csv(path, table)
    for row in table:
        print(
            f"t={row['t']:g} {row['method']}: micro_calls={row['micro_calls']}"
            f" error_l2={row['error_l2']:.6g}"
        )
    print(f"wrote {path}")
    return 0


def _cmd_reference(args, specs, cache_dir) -> int:
    count = 0
    for spec in specs:
        for eps in spec.eps_list:
            ensure_reference(spec, eps, cache_dir)
            count += 1
    print(f"cached {count} reference solution(s) under {cache_dir}")
    return 0


def _cmd_drift_demo(args) -> int:
    result = drift_demo(args.eps, args.T, out_dir=args.out, cache_dir=os.path.join(args.out, "reference_cache"))
    for k, err in sorted(result["errors"].items()):
        print(f"HMM{k}: final error_l2={err:.6g}")
    if result["csv_path"]:
        print(f"wrote {result['csv_path']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
