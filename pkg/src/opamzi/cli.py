"""Command-line front end.

Subcommands: ``simulate``, ``sweep``, ``bounds``, ``trace`` and ``oracle``
(a cross-engine spot check).  Exit codes: 0 success, 2 parse/validation
error, 3 runtime simulation error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from .configio import SweepSpec, TraceSpec, parse_config
from .fock import dark_port_comparison
from .interferometer import DegenerateSlopeError, build_chain, simulate_interferometer
from .params import InterferometerConfig
from .sweep import Table, bounds_table, emit, report_table, run_sweep, synthesize_trace

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_IO = 4

_ORACLE_TOLERANCE = 1e-6


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opamzi",
        description="Gaussian-state simulator for a two-OPA Mach-Zehnder interferometer",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "simulate": "run one config and print its sensitivity report",
        "sweep": "run a parameter sweep",
        "bounds": "print the reference limits for a config",
        "trace": "synthesize an analyzer-style trace",
        "oracle": "cross-check the Gaussian engine against the number-basis engine",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to a config file")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        if name == "sweep":
            p.add_argument("--workers", type=int, default=1)
        if name == "trace":
            p.add_argument("--seed", type=int, default=None, help="jitter seed")
    return parser


def _expect(obj, kind, command: str):
    if not isinstance(obj, kind):
        raise ValueError(
            f"'{command}' needs a {kind.__name__} file, got {type(obj).__name__}"
        )


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"opamzi: cannot read '{args.config}': {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        obj = parse_config(text)
        if args.command == "sweep":
            _expect(obj, SweepSpec, "sweep")
        elif args.command == "trace":
            _expect(obj, TraceSpec, "trace")
        else:
            _expect(obj, InterferometerConfig, args.command)
        if args.command == "oracle":
            _validate_oracle_regime(obj)
    except ValueError as exc:
        print(f"opamzi: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    status = EXIT_OK
    try:
        if args.command == "simulate":
            table = report_table(simulate_interferometer(obj))
        elif args.command == "sweep":
            table = run_sweep(obj, workers=args.workers)
        elif args.command == "bounds":
            table = bounds_table(obj)
        elif args.command == "trace":
            table = synthesize_trace(obj, seed=args.seed)
        else:
            table, status = _oracle_table(obj)
    except (DegenerateSlopeError, ArithmeticError, RuntimeError) as exc:
        print(f"opamzi: simulation failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    try:
        emit(table, args.format, args.out)
    except OSError as exc:
        print(f"opamzi: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


def _validate_oracle_regime(config: InterferometerConfig):
    if config.seed_flux > 9.0:
        raise ValueError(
            f"oracle spot checks need a seed flux <= 9 photons/s, got {config.seed_flux}"
        )
    if config.opa.squeezing_r > 0.6:
        raise ValueError(
            f"oracle spot checks need squeezing r <= 0.6, got {config.opa.squeezing_r:.3f}"
        )


def _oracle_table(config: InterferometerConfig) -> tuple[Table, int]:
    cmp = dark_port_comparison(build_chain(config))
    columns = (
        "mean_gaussian",
        "mean_fock",
        "variance_gaussian",
        "variance_fock",
        "photons_gaussian",
        "photons_fock",
        "max_abs_diff",
        "status",
    )
    ok = cmp.max_abs_diff < _ORACLE_TOLERANCE
    row = (
        cmp.mean_gaussian,
        cmp.mean_fock,
        cmp.variance_gaussian,
        cmp.variance_fock,
        cmp.photons_gaussian,
        cmp.photons_fock,
        cmp.max_abs_diff,
        "ok" if ok else "mismatch",
    )
    if not ok:
        print(
            f"opamzi: engines disagree by {cmp.max_abs_diff:.3e} (> {_ORACLE_TOLERANCE})",
            file=sys.stderr,
        )
    return Table(columns, (row,)), EXIT_OK if ok else EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
