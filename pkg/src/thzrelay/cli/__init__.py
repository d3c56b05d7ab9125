"""Command-line front end: ``thzrelay {sweep,validate,mc}``.

Exit codes: 0 success, 1 configuration error, 2 at least one row with an
evaluation error, 3 validation failure.
"""

import argparse
import sys

from .config import ConfigError, Scenario, SweepSpec, load_config, parse_config
from .output import render
from .sweep import Row, has_errors, run_sweep
from .validate import DEFAULT_SAMPLES, format_report, run_validate

EXIT_OK, EXIT_CONFIG, EXIT_EVAL, EXIT_VALIDATION = 0, 1, 2, 3

__all__ = ["main", "run_sweep", "run_validate", "parse_config", "load_config", "Scenario",
           "SweepSpec", "ConfigError"]


def _parser():
    p = argparse.ArgumentParser(prog="thzrelay", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="scenario file (defaults: reference setup)")
    common.add_argument("--seed", type=int, default=0, metavar="U64")
    common.add_argument("--samples", type=int, default=None, metavar="N")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--jobs", type=int, default=1, metavar="N")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="evaluate metrics over a grid")
    v = sub.add_parser("validate", parents=[common], help="closed form vs quadrature vs Monte Carlo")
    v.add_argument("--corrupt-coefficient", type=float, default=1.0, help=argparse.SUPPRESS)
    sub.add_parser("mc", parents=[common], help="Monte-Carlo estimates at the scenario point")
    return p


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args):
    if args.config:
        return load_config(args.config)
    return Scenario(), None


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.seed < 0 or args.seed >= 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.samples is not None and args.samples < 1:
            raise ConfigError("--samples must be positive")
        if args.jobs < 1:
            raise ConfigError("--jobs must be positive")
        scenario, sweep = _load(args)
        if args.command == "sweep" and sweep is None:
            raise ConfigError("sweep needs a [sweep] section in --config")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "sweep":
        rows = run_sweep(sweep, args.seed, args.samples or 10**6, args.jobs)
        _emit(render(rows, args.format), args.out)
        return EXIT_EVAL if has_errors(rows) else EXIT_OK

    if args.command == "mc":
        metrics = ["mc_op", "mc_ber", "mc_acc"]
        if scenario.K >= 2:
            metrics += ["mc_ser_arp", "mc_ser_brs"]
        spec = SweepSpec("gamma_bar_db", (scenario.gamma_bar_db,), tuple(metrics), scenario)
        rows = run_sweep(spec, args.seed, args.samples or 10**6, args.jobs)
        _emit(render(rows, args.format), args.out)
        return EXIT_EVAL if has_errors(rows) else EXIT_OK

    n = args.samples or DEFAULT_SAMPLES
    checks = run_validate(scenario, args.seed, n, args.corrupt_coefficient)
    if args.format == "json":
        import json
        text = json.dumps([c.__dict__ for c in checks], indent=2, default=str) + "\n"
    else:
        text = format_report(checks, scenario, args.seed, n)
    _emit(text, args.out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
