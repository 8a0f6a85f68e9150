#!/usr/bin/env python3
"""
Command-line tool for the A_r Q-system and its path models
Computes exact Laurent polynomials, series tables, graph exports and runs
the verification suites
"""

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from app import config
from app.models import compact, graphs, rank2, totalpos
from app.models.errors import CaseMismatch, DivisionByZero, MotzkinViolation, SeedFileError
from app.models.qsystem import MotzkinPath, QSystem, read_seed_file, weights_from_seed
from app.models.utils import path_slug
from app.models.verify import SUITES, VerificationRunner

USAGE_ERRORS = (MotzkinViolation, SeedFileError, CaseMismatch, DivisionByZero, IndexError)

RANK2_CHOICES = {"22": (2, 2), "14": (1, 4), "41": (4, 1)}


def usage_error(message: str):
    print(f"Error: {message}", file=sys.stderr)
    sys.exit(2)


def resolve_path(args) -> MotzkinPath:
    """Motzkin path from -m, or the flat path of rank -r"""
    if args.path:
        m = MotzkinPath.from_text(args.path)
        if args.rank is not None and args.rank != m.rank:
            usage_error(f"-r {args.rank} does not match the path {m} of rank {m.rank}")
        return m
    if args.rank is None:
        usage_error("Give the rank with -r or a Motzkin path with -m")
    if args.rank < 1:
        usage_error(f"Rank must be >= 1, got {args.rank}")
    return MotzkinPath.zero(args.rank)


def add_seed_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "-r", "--rank",
        type=int,
        help="Rank r of A_r (defaults to the length of -m)"
    )
    parser.add_argument(
        "-m", "--path",
        type=str,
        help="Motzkin path m as comma-separated integers (default: 0,...,0)"
    )


def cmd_rvalue(args) -> int:
    if args.seed_file:
        system = QSystem(read_seed_file(args.seed_file))
    else:
        system = QSystem.from_path(resolve_path(args))
    if not 1 <= args.alpha <= system.rank:
        raise IndexError(f"alpha={args.alpha} outside 1..{system.rank}")

    value = system.R(args.alpha, args.n)
    print(value.to_text())
    if args.check_positive and not value.is_positive():
        print(f"Error: R[{args.alpha},{args.n}] is not a positive Laurent polynomial", file=sys.stderr)
        return 1
    return 0


def series_rows(args):
    if args.rank2:
        b, c = RANK2_CHOICES[args.rank2]
        system = rank2.Rank2System(b, c)
        return f"x_n for (b,c) = ({b},{c})", [(n, system.x(n)) for n in range(args.order + 1)]

    system = QSystem.from_path(resolve_path(args))
    if args.from_paths:
        series = graphs.rerooted_series(system, args.order)
        return f"R_(1,n) in seed {system.path} (path model)", list(enumerate(series))
    return f"R_(1,n) in seed {system.path}", [(n, system.R(1, n)) for n in range(args.order + 1)]


def render_series(title: str, rows, fmt: str) -> str:
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["n", "coefficient"])
        for n, value in rows:
            writer.writerow([n, value.to_text()])
        return buffer.getvalue()
    if fmt == "json":
        payload = {
            "title": title,
            "coefficients": [{"n": n, "coefficient": value.to_text()} for n, value in rows],
        }
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"

    lines = ["=" * 60, title, "=" * 60]
    lines += [f"  n={n}: {value.to_text()}" for n, value in rows]
    return "\n".join(lines) + "\n"


def cmd_series(args) -> int:
    if args.order < 0:
        usage_error(f"Truncation order must be >= 0, got {args.order}")
    title, rows = series_rows(args)
    fmt = "csv" if args.csv else "json" if args.json else "text"
    text = render_series(title, rows, fmt)

    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"Results saved to: {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def cmd_graph(args) -> int:
    m = resolve_path(args)
    weights = weights_from_seed(QSystem.from_path(m)) if args.seed_weights else None

    merge_text = None
    if args.variant == "gamma":
        dot = graphs.build_gamma(m, weights).to_dot()
    elif args.variant == "gamma_prime":
        compacted = compact.compact_graph(m, weights)
        dot = compacted.to_dot()
        merge_text = compacted.merge_text()
    else:
        dot = totalpos.network_dot(m, weights)

    out = Path(args.out or f"{args.variant}-{path_slug(m)}.dot")
    out.write_text(dot, encoding="utf-8")
    print(f"Graph saved to: {out}", file=sys.stderr)

    if args.merge_map:
        if merge_text is None:
            usage_error("--merge-map is only available for the gamma_prime variant")
        Path(args.merge_map).write_text(merge_text, encoding="utf-8")
        print(f"Merge map saved to: {args.merge_map}", file=sys.stderr)
    return 0


def parse_point(items) -> Dict[str, Fraction]:
    """NAME=VALUE pairs; values are integers or fractions like 3/2"""
    point = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            usage_error(f"Point coordinates look like R1_0=2, got {item!r}")
        try:
            point[name.strip()] = Fraction(value.strip())
        except ValueError:
            usage_error(f"Not a rational number: {value!r}")
    return point


def cmd_minors(args) -> int:
    m = resolve_path(args)
    system = QSystem.from_path(m)
    point = {name: Fraction(1) for name in system.seed.names().values()}
    point.update(parse_point(args.point))

    if totalpos.check_total_positivity(m, point, args.k_max):
        print(f"All minors of P_{m} are non-negative")
        return 0
    print(f"Error: P_{m} has a negative minor at this point", file=sys.stderr)
    return 1


def cmd_verify(args) -> int:
    if not 1 <= args.rank <= config.MAX_RANK:
        usage_error(f"verify needs 1 <= r <= {config.MAX_RANK}, got {args.rank}")
    if args.order < 0:
        usage_error(f"Truncation order must be >= 0, got {args.order}")

    runner = VerificationRunner(verbose=args.verbose, jobs=args.jobs)
    summary = runner.run_suite(args.suite, args.rank, args.order)

    report_file = None
    if args.report is not None:
        report_file = args.report or str(config.REPORTS_DIR / f"verify-{args.suite}-r{args.rank}.txt")
    print(runner.generate_report(summary, report_file))
    if report_file:
        print(f"Report saved to: {report_file}", file=sys.stderr)

    if summary["failed"] or summary["errors"]:
        print(f"\n❌ {summary['failed'] + summary['errors']} check(s) did not pass", file=sys.stderr)
        return 1
    print(f"\n✅ All {summary['total_checks']} checks passed", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Exact A_r Q-system solutions and their path, graph and network models",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Seed variables are named R<alpha>_<n>, e.g. R1_0 is R_(1,0).

Examples:
  # R_(1,2) for A_1 in the seed (R1_0, R1_1)
  python qsys_cli.py rvalue -r 1 -m 0 -a 1 -n 2

  # Check positivity of R_(1,4) for A_2
  python qsys_cli.py rvalue -r 2 -m 0,0 -a 1 -n 4 --check-positive

  # Seed read from a file of 'R alpha n = name' lines
  python qsys_cli.py rvalue --seed-file seed.txt -a 2 -n 3

  # Series table as CSV
  python qsys_cli.py series -m 0,1,0 -N 6 --csv

  # Compact graph of m = (0,1,2) with its vertex merge map
  python qsys_cli.py graph -m 0,1,2 --variant gamma_prime g.dot --merge-map g.txt

  # Minors of P_m at a point (unset seed variables are 1)
  python qsys_cli.py minors -m 0,1 --point R1_0=2 --point R2_1=1/3

  # Run the compactification suite on every seed of rank <= 3
  python qsys_cli.py verify --suite compact -r 3 -N 6 --jobs 4
        """
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Show debug logging, per-check progress and tracebacks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rvalue = sub.add_parser("rvalue", help="Print R_(alpha,n) as a Laurent polynomial in the seed")
    add_seed_arguments(p_rvalue)
    p_rvalue.add_argument("-a", "--alpha", type=int, required=True, help="Node alpha in 1..r")
    p_rvalue.add_argument("-n", type=int, required=True, help="Time n (any integer)")
    p_rvalue.add_argument(
        "--seed-file",
        type=str,
        help="Read the seed from a file instead of -r/-m"
    )
    p_rvalue.add_argument(
        "--check-positive",
        action="store_true",
        help="Exit 1 unless every coefficient is positive"
    )
    p_rvalue.set_defaults(func=cmd_rvalue)

    p_series = sub.add_parser("series", help="Table of R_(1,n) (or rank-2 x_n) for n = 0..N")
    add_seed_arguments(p_series)
    p_series.add_argument("-N", "--order", type=int, default=config.DEFAULT_ORDER, help="Largest n")
    p_series.add_argument(
        "--rank2",
        choices=sorted(RANK2_CHOICES),
        help="Tabulate the rank-2 affine system (b,c) instead"
    )
    p_series.add_argument(
        "--from-paths",
        action="store_true",
        help="Compute R_(1,n) from the path model of Gamma_m"
    )
    p_series.add_argument("--csv", action="store_true", help="CSV output with header n,coefficient")
    p_series.add_argument("-j", "--json", action="store_true", help="JSON output")
    p_series.add_argument("-o", "--output", type=str, help="Save the table to a file")
    p_series.set_defaults(func=cmd_series)

    p_graph = sub.add_parser("graph", help="Export Gamma_m, Gamma'_m or the network of P_m as DOT")
    add_seed_arguments(p_graph)
    p_graph.add_argument(
        "--variant",
        choices=("gamma", "gamma_prime", "network"),
        default="gamma",
        help="Which graph to export (default: gamma)"
    )
    p_graph.add_argument("out", nargs="?", help="Output DOT file (default: <variant>-<path>.dot)")
    p_graph.add_argument(
        "--seed-weights",
        action="store_true",
        help="Label edges with the seed weights instead of y_i"
    )
    p_graph.add_argument("--merge-map", type=str, help="Write the vertex merge map (gamma_prime only)")
    p_graph.set_defaults(func=cmd_graph)

    p_minors = sub.add_parser("minors", help="Check that every minor of P_m is non-negative at a point")
    add_seed_arguments(p_minors)
    p_minors.add_argument(
        "--point",
        action="append",
        metavar="NAME=VALUE",
        help="Value of a seed variable (repeatable; unset variables are 1)"
    )
    p_minors.add_argument("--k-max", type=int, default=None, help="Largest minor size (default: all)")
    p_minors.set_defaults(func=cmd_minors)

    p_verify = sub.add_parser("verify", help="Run verification suites")
    p_verify.add_argument("--suite", choices=SUITES + ("all",), default="all", help="Suite to run")
    p_verify.add_argument("-r", "--rank", type=int, default=3, help="Check every seed of rank <= r")
    p_verify.add_argument("-N", "--order", type=int, default=config.DEFAULT_ORDER, help="Series truncation order")
    p_verify.add_argument("--jobs", type=int, default=config.DEFAULT_JOBS, help="Worker processes")
    p_verify.add_argument(
        "--report",
        nargs="?",
        const="",
        default=None,
        help="Save the report (default file under reports/)"
    )
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=config.LOG_FORMAT,
        stream=sys.stderr,
    )

    try:
        return args.func(args)
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return 1
    except USAGE_ERRORS as e:
        print(f"Error: {str(e)}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"Error: {str(e)}", file=sys.stderr)
        if args.verbose:
            import traceback
            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
