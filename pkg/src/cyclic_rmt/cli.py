"""Command-line entry point.

Examples
--------
Reproduce every figure and the structural suite::

    cyclic-rmt --experiment all --out-dir results

Just the conjugate-pair panel with four workers::

    cyclic-rmt --experiment fig1_cc --workers 4

Exit status is 0 when every acceptance check passes, 1 on a statistical
failure and 2 on a configuration or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .experiments import DEFAULT_SEED, EXPERIMENTS, ConfigError, RunConfig, run

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cyclic-rmt",
        description="Monte Carlo level-spacing experiments for Gaussian random cyclic matrices.",
    )
    p.add_argument("--experiment", default="all", type=str.lower, choices=EXPERIMENTS)
    p.add_argument("--dimension", type=int, default=None,
                   help="matrix size N (default: the paper-sized panels of each experiment)")
    p.add_argument("--scale-a", dest="scale", type=float, default=1.0,
                   help="Gaussian weight parameter A (default: 1)")
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--pairing", choices=("one", "all"), default="one",
                   help="rc/generic spacings per realization used for exported data")
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--out-dir", type=Path, default=Path("results"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", dest="data_format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-figures", dest="plots", action="store_false",
                   help="skip matplotlib PNG rendering")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def _summary(report: dict) -> list[str]:
    lines = []
    if "structural" in report:
        for name, check in report["structural"].items():
            if isinstance(check, dict) and "passed" in check:
                lines.append(f"structural/{name:<22s} {'PASS' if check['passed'] else 'FAIL'}")
    for name, panels in report["experiments"].items():
        for p in panels:
            lines.append(
                f"{name}/{p['tag']:<16s} n={p['sample_size']:<7d} KS={p['ks']:.5f} "
                f"< {p['threshold']:.4f}  {'PASS' if p['passed'] else 'FAIL'}"
            )
    return lines


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    opts = vars(args)
    quiet = opts.pop("quiet")
    try:
        config = RunConfig(**opts)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        report = run(config)
    except OSError as exc:
        print(f"error: {exc.filename or config.out_dir}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_ERROR
    if not quiet:
        print("\n".join(_summary(report)))
        print(f"report: {config.out_dir / 'report.json'}")
    return EXIT_OK if report["passed"] else EXIT_FAIL
