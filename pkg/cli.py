#!/usr/bin/env python3
"""Steering Geometry CLI.

Command-line interface for analysing two-qubit states: separability,
unsteerability certificates for hidden-state ansaetze, parameter sweeps and
boundary cross-section export. Results are written as JSON or CSV.
"""

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np
import pandas as pd

from steering_geometry.epr import epr_map
from steering_geometry.errors import (
    CertificateViolationError,
    DomainError,
    GeometricInfeasibilityError,
    InvalidInputError,
    NoBracketError,
    ParseError,
    PreconditionError,
    ProjectionUndefinedError,
    RankError,
    StateValidationError,
)
from steering_geometry.workbench import (
    CSV_FLOAT_FORMAT,
    CSV_LINE_TERMINATOR,
    DEFAULT_BISECT_TOL,
    DEFAULT_BOUNDARY_POINTS,
    DEFAULT_STEP,
    SWEEP_FAMILIES,
    analyze,
    export_boundary,
    load_ansatz,
    load_state,
    sweep,
    write_csv,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_GEOMETRY = 2
EXIT_IO = 3

PARSE_ERRORS = (
    ParseError,
    StateValidationError,
    InvalidInputError,
    DomainError,
    PreconditionError,
    NoBracketError,
)
GEOMETRY_ERRORS = (
    GeometricInfeasibilityError,
    RankError,
    ProjectionUndefinedError,
    CertificateViolationError,
)


def parse_plane(text: str) -> np.ndarray:
    """Parse an in-plane direction given as "x,y,z"."""
    try:
        vec = np.array([float(c) for c in text.split(",")])
    except ValueError:
        raise ParseError(text, "plane components must be numbers", field="plane")
    if vec.shape != (3,) or not np.linalg.norm(vec) > 0:
        raise ParseError(text, "plane must be a non-zero 3-vector", field="plane")
    return vec


def analysis_row(report) -> pd.DataFrame:
    """Flatten an AnalysisReport into a one-row table."""
    row = {
        "source": report.source,
        "is_ppt": report.ppt[0],
        "ppt_min_eig": report.ppt[1],
        "separable": report.separability.separable,
        "method": report.separability.method.value,
        "has_certificate": report.separability.certificate is not None,
    }
    for name, cert in report.packing.items():
        row[f"contained[{name}]"] = cert.contained if cert is not None else None
        row[f"slack[{name}]"] = cert.slack if cert is not None else None
    return pd.DataFrame([row])


def emit(text: str, out: Optional[str]) -> None:
    if out is None:
        print(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(text)
        if not text.endswith("\n"):
            f.write("\n")
    print(f"Wrote {out}", file=sys.stderr)


def emit_frame(df: pd.DataFrame, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator=CSV_LINE_TERMINATOR))
        return
    write_csv(df, out)
    print(f"Wrote {len(df):,} rows to {out}", file=sys.stderr)


def run_analyze(args) -> int:
    report = analyze(
        args.state,
        ansatz_choices=args.ansatz or ["uniform"],
        tol=args.tol,
        n_directions=args.directions,
    )
    if args.format == "csv":
        emit_frame(analysis_row(report), args.out)
    else:
        emit(report.to_json(), args.out)
    return EXIT_OK


def run_sweep(args) -> int:
    ansatz = load_ansatz(args.ansatz[0] if args.ansatz else "uniform")
    df = sweep(
        args.family,
        args.lo,
        args.hi,
        step=args.step,
        bisect=args.bisect,
        ansatz=ansatz,
        p_fixed=args.p_fixed,
        tol=args.tol,
        n_directions=args.directions,
        bisect_tol=args.bisect_tol,
    )
    if args.verbose:
        for _, row in df[df["kind"] != "grid"].iterrows():
            print(f"  - {row['kind']}: {row['param']:.6f}", file=sys.stderr)
    if args.format == "json":
        emit(df.to_json(orient="records", double_precision=15), args.out)
    else:
        emit_frame(df, args.out)
    return EXIT_OK


def run_boundary(args) -> int:
    ansatz = load_ansatz(args.ansatz[0] if args.ansatz else "uniform")
    map_ = epr_map(load_state(args.state)) if args.state else None
    df = export_boundary(ansatz, map_, plane=parse_plane(args.plane), n_points=args.points)
    if args.format == "json":
        emit(df.to_json(orient="records", double_precision=15), args.out)
    else:
        emit_frame(df, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Separability and steering geometry of two-qubit states.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s analyze --state werner:p=0.4
  %(prog)s analyze --state state.json --ansatz uniform --ansatz box.json
  %(prog)s sweep --family werner --lo 0 --hi 1 --step 0.01 --out werner.csv
  %(prog)s sweep --family modified_werner --p-fixed 0.4 --lo 0 --hi 1 --bisect
  %(prog)s boundary --state werner:p=0.5 --out boundary.csv

Exit codes: 0 success, 1 parse/validation, 2 geometric infeasibility, 3 I/O.
        """,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--ansatz",
        action="append",
        metavar="ANSATZ",
        help="'uniform', 'mixture:N' or a JSON ansatz file. Can be specified multiple times for analyze.",
    )
    common.add_argument("--tol", type=float, default=None, help="Containment tolerance (default: 1e-9)")
    common.add_argument(
        "--directions",
        type=int,
        default=None,
        help="Sampled directions for spherical containment checks (default: 2048)",
    )
    common.add_argument("-o", "--out", default=None, help="Output file (default: stdout)")
    common.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Print verbose output",
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", parents=[common], help="Analyse one state")
    p_analyze.add_argument("--state", required=True, help="State file (JSON) or spec such as werner:p=0.4")
    p_analyze.add_argument("--format", choices=("json", "csv"), default="json")
    p_analyze.set_defaults(handler=run_analyze)

    p_sweep = sub.add_parser("sweep", parents=[common], help="Sweep a state family")
    p_sweep.add_argument("--family", choices=SWEEP_FAMILIES, default="werner")
    p_sweep.add_argument("--lo", type=float, default=0.0, help="Lower end of the range (default: 0)")
    p_sweep.add_argument("--hi", type=float, default=1.0, help="Upper end of the range (default: 1)")
    p_sweep.add_argument("--step", type=float, default=DEFAULT_STEP, help="Grid step (default: 0.01)")
    p_sweep.add_argument("--bisect", action="store_true", help="Append bisected threshold rows")
    p_sweep.add_argument("--bisect-tol", type=float, default=DEFAULT_BISECT_TOL, dest="bisect_tol")
    p_sweep.add_argument("--p-fixed", type=float, default=None, dest="p_fixed", help="p of modified Werner sweeps")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.set_defaults(handler=run_sweep)

    p_boundary = sub.add_parser("boundary", parents=[common], help="Export boundary cross-sections")
    p_boundary.add_argument("--state", default=None, help="Optional state whose steering curve is added")
    p_boundary.add_argument("--plane", default="0,0,1", help="In-plane direction x,y,z (default: 0,0,1)")
    p_boundary.add_argument("--points", type=int, default=DEFAULT_BOUNDARY_POINTS, help="Grid points per branch")
    p_boundary.add_argument("--format", choices=("csv", "json"), default="csv")
    p_boundary.set_defaults(handler=run_boundary)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_PARSE

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.handler(args)
    except PARSE_ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except GEOMETRY_ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_GEOMETRY
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
