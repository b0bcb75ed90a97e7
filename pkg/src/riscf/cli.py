"""Command-line entry point.

Two subcommands: ``run`` executes a YAML run spec into a results CSV and
a manifest, ``cdf`` folds a results CSV into per-group empirical CDFs.
Success prints a small JSON summary on stdout; any failure prints a JSON
error object on stderr and exits nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiment import SCHEMA_VERSION, emit_cdf, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riscf",
        description="Spectral-efficiency experiments for RIS-aided cell-free uplinks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a YAML run spec")
    run_p.add_argument("--config", required=True, help="path to the YAML run spec")
    run_p.add_argument("--seed", required=True, type=int, help="unsigned 64-bit seed")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument(
        "--mc-trials",
        type=int,
        default=None,
        help="override the spec's Monte Carlo trial count",
    )
    run_p.add_argument("--threads", type=int, default=1, help="worker thread count")

    cdf_p = sub.add_parser("cdf", help="summarize a results CSV into CDFs")
    cdf_p.add_argument("--in", dest="in_path", required=True, help="results CSV")
    cdf_p.add_argument("--out", required=True, help="output CSV path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            summary = run_experiment(
                args.config,
                args.seed,
                args.out,
                mc_trials=args.mc_trials,
                threads=args.threads,
            )
        else:
            summary = emit_cdf(args.in_path, args.out)
    except Exception as exc:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        print(json.dumps(payload), file=sys.stderr)
        return 1
    print(json.dumps({"schema_version": SCHEMA_VERSION, **summary}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
