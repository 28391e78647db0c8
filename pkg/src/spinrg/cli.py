"""Command line entry point.

Exit codes: 0 success, 2 bad config, 3 resource refusal, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .core import KrylovConvergenceError
from .embedding import TruncatedToZeroError
from .runner import (ConfigError, ExperimentConfig, ResourceRefusalError,
                     run_compare, run_convergence, run_epsilon)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_NUMERICAL = 4

_COMMANDS = {
    "compare": run_compare,
    "convergence": run_convergence,
    "epsilon": run_epsilon,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinrg",
        description="Block renormalization experiments for spin-1/2 chains.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in [
        ("compare", "evolve original and renormalized chains, write series"),
        ("convergence", "comparison sweep over N with exponential chi2 fits"),
        ("epsilon", "Hamiltonian discrepancy sweep over N"),
    ]:
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--allow-large", action="store_true",
                       help="run sizes whose memory estimate exceeds the budget")
        p.add_argument("--out", default=None,
                       help="output directory (default: config output_dir)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = ExperimentConfig.from_file(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = args.out if args.out is not None else config.output_dir
    try:
        _COMMANDS[args.command](config, out_dir, allow_large=args.allow_large)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceRefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (KrylovConvergenceError, TruncatedToZeroError,
            FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
