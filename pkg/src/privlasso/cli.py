"""Command-line entry point.

Usage: privlasso <kind> --config <file> [--out <dir>] [--seed <u64>]
                 [--threads <n>] [--override key=value ...]

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import KINDS, ConfigError, NumericalFailure, load_config, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="privlasso")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--config", required=True, help="TOML experiment config")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, default=None, help="run seed (overrides config)")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="key=value",
        help="dotted-key config override, repeatable",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.override)
        if cfg.kind != args.kind:
            raise ConfigError(
                f"config declares kind {cfg.kind!r} but command line asked for {args.kind!r}"
            )
        if args.out is not None:
            cfg.out_dir = Path(args.out)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.params = cfg.params.with_(seed=args.seed)
        if args.threads is not None:
            cfg.threads = args.threads
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        path = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
