"""Command-line front end.

Exit codes: 0 success, 2 solver failure, 3 invalid input, 4 a verification
row failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

from . import analysis
from .analysis import Tolerances
from .equilibrium import (
    ForceModel,
    SolverError,
    config_from_json,
    config_to_json,
    solve_newton,
    solve_shooting,
)
from .precision import PrecisionContext, decimal_text, env_bits, make_context
from .stirling import StirlingTable

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_INPUT = 3
EXIT_VERIFY = 4


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _n_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N list {text!r}") from None
    if not values or any(v < 2 for v in values):
        raise argparse.ArgumentTypeError("every N must be >= 2")
    return values


def _force(text: str) -> ForceModel:
    try:
        return ForceModel.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(p: argparse.ArgumentParser, lmax_default=None):
    p.add_argument("--n", type=_n_list, help="number of points (comma list allowed)")
    p.add_argument("--force", type=_force, default=ForceModel.zero(),
                   help="zero | const:<F> | linear:<alpha> | power:<alpha>:<n>")
    p.add_argument("--bits", type=int, default=None, help="mantissa bits (env FINESTRUCT_BITS)")
    p.add_argument("--tol", type=float, default=None, help="solver residual tolerance")
    p.add_argument("--lmax", type=int, default=lmax_default)
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="finestruct", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one configuration, write JSON")
    _common(p, lmax_default=1)
    p.add_argument("--solver", choices=("newton", "shooting"), default="newton")

    p = sub.add_parser("diff", help="difference table as CSV")
    _common(p, lmax_default=4)
    p.add_argument("--config", help="configuration JSON from `solve`")

    p = sub.add_parser("scales", help="fine-structure scales kappa(N, l)")
    _common(p, lmax_default=6)

    p = sub.add_parser("verify", help="theorem checks, report CSV")
    p.add_argument("check", choices=("thm1", "thm2", "thm3", "gaps", "eps-band"))
    _common(p)
    p.add_argument("--eps", type=float, default=0.02)
    p.add_argument("--band-c", type=float, default=1.0, help="trial C for eps-band")
    p.add_argument("--gap-band", type=float, default=Tolerances.gap_band)
    p.add_argument("--decay", type=float, default=Tolerances.decay)
    p.add_argument("--profile-band", type=float, default=Tolerances.profile_band)

    p = sub.add_parser("stirling", help="exact table of ∇^l i^n")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("--imax", type=int, default=0)
    p.add_argument("--kind", choices=("diff", "stirling"), default="diff",
                   help="value column: ∇^l i^n or S(n,l,i)")
    p.add_argument("--out", default=None)

    p = sub.add_parser("demo", help="demonstrations")
    p.add_argument("name", choices=("discretize",))
    p.add_argument("--n", type=_n_list, default=[64, 256, 1024])
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--bits", type=int, default=None)
    p.add_argument("--out", default=None)
    return parser


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".finestruct-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _context(args, n: int, l_max: int) -> PrecisionContext:
    bits = args.bits if args.bits is not None else env_bits()
    ctx = make_context(n, max(l_max, 1), bits)
    if args.tol is not None:
        ctx = PrecisionContext(ctx.mantissa_bits, args.tol, ctx.l_max, n)
    return ctx


def _solve_task(task):
    n, force, ctx = task
    return solve_newton(n, force, ctx)


def _solve_many(args, l_max: int) -> list:
    tasks = [(n, args.force, _context(args, n, l_max)) for n in args.n]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            return list(pool.map(_solve_task, tasks))
    return [_solve_task(t) for t in tasks]


def _need_n(args):
    if not args.n:
        raise InputError("--n is required")


def cmd_solve(args) -> int:
    _need_n(args)
    if len(args.n) != 1:
        raise InputError("solve takes a single N")
    n = args.n[0]
    ctx = _context(args, n, args.lmax)
    solver = solve_newton if args.solver == "newton" else solve_shooting
    config = solver(n, args.force, ctx)
    _emit(config_to_json(config), args.out)
    return EXIT_OK


def cmd_diff(args) -> int:
    if args.config:
        with open(args.config) as fh:
            config = config_from_json(fh.read())
    else:
        _need_n(args)
        config = _solve_many(args, args.lmax)[0]
    table = analysis.difference_table(config, args.lmax)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["l", "i", "value", "certified_digits"])
    for l, row in enumerate(table.rows):
        for k, v in enumerate(row.values):
            w.writerow([l, row.offset + k, decimal_text(v, analysis.REPORT_DIGITS),
                        table.certified_digits[l]])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _predicted(force: ForceModel, l: int, base_gap):
    """Reference scale for kappa(N, l): Theorem 1 form or the Theorem 2/3 bound."""
    if l < 2 or force.kind == "zero":
        return None
    if force.kind == "const":
        return abs(analysis.closed_form(l - 1, force.amplitude, base_gap))
    C = 2 * analysis.as_mpfr(force.alpha) if force.kind == "linear" else analysis.thm3_constant(
        force.alpha, force.exponent
    )
    return base_gap * (C * base_gap) ** l * math.factorial(l)


def cmd_scales(args) -> int:
    _need_n(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "l", "kappa", "argmax", "sign", "predicted", "certified_digits"])
    for config in _solve_many(args, args.lmax):
        table = analysis.difference_table(config, args.lmax)
        prof = analysis.scale_profile(table)
        with config.context.local():
            for l in range(args.lmax + 1):
                pred = _predicted(config.force, l, config.base_gap)
                w.writerow([
                    config.n_points, l, decimal_text(prof.kappa[l], analysis.REPORT_DIGITS),
                    prof.argmax_index[l], prof.sign_pattern[l],
                    "" if pred is None else decimal_text(pred, analysis.REPORT_DIGITS),
                    prof.certified_digits[l],
                ])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    _need_n(args)
    tol = Tolerances(
        gap_band=args.gap_band, decay=args.decay, profile_band=args.profile_band
    )
    check = args.check
    if check == "thm1":
        lmax = args.lmax or analysis.default_l_cap(max(args.n))
        configs = _solve_many(args, lmax + 1)
        reports = [analysis.thm1_report(configs, None, range(1, lmax + 1), tol)]
    elif check in ("thm2", "thm3"):
        lmax = args.lmax or 8
        fn = analysis.thm2_report if check == "thm2" else analysis.thm3_report
        reports = [fn(c, l_range=range(2, lmax + 1), tol=tol)
                   for c in _solve_many(args, max(lmax, 3))]
    elif check == "gaps":
        reports = [analysis.gap_expansion_check(c, None, tol) for c in _solve_many(args, 1)]
    else:
        lmax = max(round(args.eps * n) for n in args.n) + 1
        reports = [analysis.epsilon_band_probe(c, None, args.eps, args.band_c, tol)
                   for c in _solve_many(args, lmax)]
    _emit(analysis.reports_to_csv(reports), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


def cmd_stirling(args) -> int:
    if min(args.nmax, args.lmax, args.imax) < 0:
        raise InputError("table bounds must be non-negative")
    table = StirlingTable.build(args.nmax, args.lmax, args.imax)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "l", "i", "value"])
    for row in table.rows(args.kind):
        w.writerow(row)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_demo(args) -> int:
    reports = [analysis.discretization_demo(n, args.nmax, args.bits) for n in args.n]
    _emit(analysis.reports_to_csv(reports), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


COMMANDS = {
    "solve": cmd_solve,
    "diff": cmd_diff,
    "scales": cmd_scales,
    "verify": cmd_verify,
    "stirling": cmd_stirling,
    "demo": cmd_demo,
}


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv`` and run one sub-command; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"finestruct: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"finestruct: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, OSError, KeyError) as exc:
        print(f"finestruct: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())
