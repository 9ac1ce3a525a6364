"""Command-line surface.

Commands: ``roots``, ``soliton``, ``verify``, ``decompose``, ``calabi``.
Exit codes are a stable contract: 0 success, 2 input or geometry
rejection, 3 solver failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .calabi import CalabiParameters
from .errors import (
    MalformedInputError,
    NonConvergenceError,
    NotFanoError,
    ToricSolitonError,
)
from .polytope import DelzantPolytope, delzant_check, parse_polytope
from .report import (
    calabi_report,
    decompose_report,
    render_text,
    roots_report,
    soliton_report,
    to_json,
    verify_report,
)

EXIT_OK = 0
EXIT_GEOMETRY = 2
EXIT_SOLVER = 3
EXIT_VERIFICATION = 4


def _load_polytope(path: str) -> DelzantPolytope:
    text = Path(path).read_text()
    p = parse_polytope(text)
    verdict = delzant_check(p)
    if not verdict.passed:
        bad = verdict.failures()
        raise MalformedInputError(
            f"polytope is not Delzant: vertex {bad[0][0]} has determinant {bad[0][1]}"
        )
    return p


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(to_json(report) + "\n")
    else:
        sys.stdout.write(render_text(report))


def _add_common(parser: argparse.ArgumentParser, with_verify_flags: bool = False) -> None:
    parser.add_argument("polytope", help="path to the polytope JSON document")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--tol", type=float, default=1e-10, help="solver tolerance (default 1e-10)")
    parser.add_argument("--order", type=int, default=10, help="quadrature exactness order (default 10)")
    if with_verify_flags:
        parser.add_argument("--potential", choices=("guillemin", "calabi"), default="guillemin")
        parser.add_argument("--grid", type=int, default=21, help="interior grid resolution (default 21)")
        parser.add_argument("--margin", type=float, default=0.05,
                            help="interior margin as a fraction of the coordinate spread (default 0.05)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toric-soliton",
        description="Soliton vector, Demazure roots and weighted-Laplacian eigenbasis diagnostics "
                    "for toric Fano surfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_roots = sub.add_parser("roots", help="normalized polytope, Demazure roots, automorphism dimensions")
    p_roots.add_argument("polytope")
    p_roots.add_argument("--format", choices=("text", "json"), default="text")

    p_soliton = sub.add_parser("soliton", help="solve the weighted-moment condition for the soliton vector")
    _add_common(p_soliton)

    p_verify = sub.add_parser("verify", help="full verification report for a potential")
    _add_common(p_verify, with_verify_flags=True)

    p_dec = sub.add_parser("decompose", help="eigenvalue clustering of the solitonic decomposition")
    _add_common(p_dec, with_verify_flags=True)

    p_cal = sub.add_parser("calabi", help="closed-form blow-up soliton profiles and residuals")
    p_cal.add_argument("--format", choices=("text", "json"), default="text")
    p_cal.add_argument("--grid", type=int, default=50)
    for name, default in (
        ("alpha1", 1.0), ("alpha2", 3.0), ("beta1", 0.0), ("beta2", 1.0),
        ("c-alpha1", 1.0), ("c-alpha2", -1.0 / 3.0), ("c-beta1", -1.0), ("c-beta2", 1.0),
    ):
        p_cal.add_argument(f"--{name}", type=float, default=default)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "roots":
            report = roots_report(_load_polytope(args.polytope))
        elif args.command == "soliton":
            report = soliton_report(_load_polytope(args.polytope), tol=args.tol, order=args.order)
        elif args.command == "verify":
            report = verify_report(
                _load_polytope(args.polytope), potential_kind=args.potential,
                tol=args.tol, grid_n=args.grid, margin=args.margin, order=args.order,
            )
        elif args.command == "decompose":
            report = decompose_report(
                _load_polytope(args.polytope), potential_kind=args.potential,
                tol=args.tol, grid_n=args.grid, margin=args.margin, order=args.order,
            )
        elif args.command == "calabi":
            params = CalabiParameters(
                args.alpha1, args.alpha2, args.beta1, args.beta2,
                args.c_alpha1, args.c_alpha2, args.c_beta1, args.c_beta2,
            )
            report = calabi_report(params, grid_points=args.grid)
        else:  # pragma: no cover
            raise MalformedInputError(f"unknown command {args.command!r}")
    except NonConvergenceError as exc:
        sys.stderr.write(f"solver failure: {exc}\n")
        return EXIT_SOLVER
    except (NotFanoError, ToricSolitonError) as exc:
        sys.stderr.write(f"rejected: {exc}\n")
        return EXIT_GEOMETRY
    except OSError as exc:
        sys.stderr.write(f"cannot read input: {exc}\n")
        return EXIT_GEOMETRY

    _emit(report, args.format)
    if args.command == "verify" and not report["all_passed"]:
        sys.stderr.write(f"verification failed: {report['first_failed']}\n")
        return EXIT_VERIFICATION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
