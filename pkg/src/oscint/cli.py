"""Command-line entry point: one subcommand per experiment kind.

Exit codes: 0 success, 2 configuration/validation error, 3 grid resolution
error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, NumericalFailure, ResolutionError
from .experiments import EXPERIMENT_KINDS, run_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscint",
        description=(
            "Fourier analysis and oscillating singular integral experiments "
            "on compact Lie groups"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment config")
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", required=True, help="output directory for artifacts")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            kind = json.load(fh).get("kind")
        if kind != args.command:
            raise ConfigError(
                f"config kind {kind!r} does not match subcommand {args.command!r}"
            )
        written = run_config(args.config, args.out, seed_override=args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResolutionError as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return 3
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
