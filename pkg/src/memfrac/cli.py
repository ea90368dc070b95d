"""Command line entry point: ``memfrac study --config FILE`` and ``memfrac preset NAME``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .errors import ConfigError, QuadratureError, SolverError
from .study import PRESETS, get_preset, load_config, run_study

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memfrac", description="Two-mesh convergence studies.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log every table row")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "markdown"), default=None)
        p.add_argument("--output", default=None, help="write the table here instead of stdout")
        p.add_argument("--jobs", type=int, default=1, help="parallel solves")

    p = sub.add_parser("study", help="run a study described by a config file")
    p.add_argument("--config", required=True)
    common(p)
    p = sub.add_parser("preset", help="run a built-in study")
    p.add_argument("name")
    common(p)
    sub.add_parser("presets", help="list built-in study names")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for solver failures here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "presets":
        print("\n".join(PRESETS))
        return EXIT_OK
    try:
        if args.command == "study":
            spec = load_config(args.config)
            changes = {k: v for k, v in (("format", args.format), ("output", args.output)) if v is not None}
            spec = replace(spec, **changes)
        else:
            spec = get_preset(args.name, args.output, args.format)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        table = run_study(spec, jobs=args.jobs)
    except ConfigError as exc:
        print(f"memfrac: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, QuadratureError) as exc:
        print(f"memfrac: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if spec.output is None:
        sys.stdout.write(table.render(spec.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
