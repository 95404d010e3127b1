"""
Command line entry point.

    qlg <subcommand> --config <path> [--out <dir>] [--seed <u64>] [--threads <n>] [--verify]

Exit codes: 0 on success, 2 when any check fails or the run reports an
error, 1 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import checks
from .config import EXPERIMENTS, U64_MAX, parse_config
from .errors import ConfigError
from .experiments import EXIT_USAGE, run
from .output import emit


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with the verification code
    def error(self, message):
        raise _UsageError(message)


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= U64_MAX:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer (got {text})")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"threads must be >= 1 (got {text})")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qlg", description="Quantum lattice gas experiments.")
    sub = parser.add_subparsers(dest="experiment", metavar="<subcommand>", parser_class=_Parser)
    sub.required = True
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=name != "verify", help="flat key = value config file")
        p.add_argument("--out", help="output directory (overrides the config 'output' key)")
        p.add_argument("--seed", type=_u64, help="RNG seed (overrides the config 'seed' key)")
        p.add_argument("--threads", type=_positive, help="worker threads (default: $QLG_THREADS or 1)")
        p.add_argument("--verify", action="store_true", help="also run the full verification suite")
    return parser


def _threads(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("QLG_THREADS")
    if not env:
        return 1
    try:
        return _positive(env)
    except (ValueError, argparse.ArgumentTypeError):
        raise _UsageError(f"QLG_THREADS must be a positive integer (got {env!r})") from None


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        threads = _threads(args.threads)
    except _UsageError as exc:
        print(f"qlg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.config is None:
        text = ""
    else:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            print(f"qlg: error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if args.experiment == "verify" and "experiment" not in text:
        text = "experiment = verify\n" + text

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output"] = args.out
    try:
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(f"{args.config}: {d}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.experiment != args.experiment:
        print(
            f"qlg: error: subcommand {args.experiment!r} does not match experiment {cfg.experiment!r} in {args.config}",
            file=sys.stderr,
        )
        return EXIT_USAGE

    report = run(cfg, threads=threads)
    if args.verify and cfg.experiment != "verify":
        report.checks.extend(checks.run_all(cfg.seed, threads=threads))
    try:
        emit(report, cfg.output, cfg.format)
    except OSError as exc:
        print(f"qlg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    for c in report.checks:
        if not c.passed:
            print(f"FAIL {c.name}: residual {c.residual:.3e} (need {c.comparator} {c.tolerance:.1e})", file=sys.stderr)
    for e in report.errors:
        print(f"ERROR {e}", file=sys.stderr)
    return report.exit_code
