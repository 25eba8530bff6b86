"""Command line: ``furnacesim run CONFIG`` and ``furnacesim preset --list``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import fuzzy
from .config import PRESETS, ConfigError, load_config, preset_config
from .simulate import NumericAbort, format_summary, run_simulation

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.mode:
            overrides["sim.mode"] = args.mode
        if args.duration is not None:
            overrides["sim.duration"] = args.duration
        if args.out:
            overrides["sim.output_path"] = args.out
        if args.decimation is not None:
            overrides["sim.trace_decimation"] = args.decimation
        if overrides:
            cfg = cfg.with_overrides(**overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_simulation(cfg)
    except NumericAbort as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not args.quiet:
        sys.stdout.write(format_summary(result.summary))
    return EXIT_OK


def _cmd_preset(args) -> int:
    if args.show:
        try:
            sys.stdout.write(preset_config(args.show).to_text())
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK
    for name, (description, _) in PRESETS.items():
        print(f"{name:14s} {description}")
    for name, rules in fuzzy.PRESETS.items():
        n, m = rules.shape
        print(f"{name:14s} fuzzy rule table ({n}x{m}), usable as fuzzy.*_rules value")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="furnacesim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a simulation from a key=value config file")
    run.add_argument("config", help="config file (an empty file gives the default scenario)")
    run.add_argument("--mode", choices=("open_loop", "closed_loop"))
    run.add_argument("--duration", type=float, help="simulated time in seconds")
    run.add_argument("--out", help="CSV trace path; per-cycle data goes next to it as *.cycles.csv")
    run.add_argument("--decimation", type=int, help="write one trace row every N steps")
    run.add_argument("--quiet", action="store_true", help="do not print the summary")
    run.set_defaults(func=_cmd_run)

    pre = sub.add_parser("preset", help="list presets or print one as a config file")
    group = pre.add_mutually_exclusive_group(required=True)
    group.add_argument("--list", action="store_true")
    group.add_argument("--show", metavar="NAME")
    pre.set_defaults(func=_cmd_preset)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
