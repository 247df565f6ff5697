"""Acceptance gate, one test per criterion, in criterion order.

Each test records a PASS/FAIL line through the ``verdict`` fixture before
asserting; the lines are printed at the end of the run.
"""

import math
import time

import gmpy2
import mpmath
from gmpy2 import mpfr

from finestruct.analysis import (
    difference_table,
    discretization_demo,
    first_difference_deviation,
    gap_expansion_check,
    kappa,
    loglog_slope,
    pipeline_digits,
    thm1_report,
)
from finestruct.equilibrium import ForceModel, solve, solve_newton, solve_shooting
from finestruct.precision import agreed_digits, make_context
from finestruct.stirling import (
    diff_power_exact,
    diff_power_recurrence,
    placement_oracle,
    riordan_approx,
    stirling2,
)

CONST1 = ForceModel.constant(1)
FAMILIES = [CONST1, ForceModel.linear(1), ForceModel.power(1, 2)]

_START = time.perf_counter()


def solved(n, force, l_max, bits=None):
    return solve(n, force, make_context(n, l_max, bits))


def test_c01_ideal_case(verdict):
    t0 = time.perf_counter()
    worst_gap, worst_kappa = 0.0, 0.0
    ok = True
    for n in (10, 100, 1000):
        ctx = make_context(n, 6)
        config = solve_newton(n, ForceModel.zero(), ctx)
        table = difference_table(config, 6, certify=False)
        with ctx.local():
            gap_err = max(abs(g - mpfr(1) / (n - 1)) for g in config.gaps)
            k = max(kappa(table, l) for l in range(2, 7))
        ok &= gap_err <= ctx.solver_tol and k <= 10 * ctx.solver_tol
        worst_gap = max(worst_gap, float(gap_err / ctx.solver_tol))
        worst_kappa = max(worst_kappa, float(k / ctx.solver_tol))
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1
    verdict("C1", ok, f"gap err/tol {worst_gap:.2g}, kappa/tol {worst_kappa:.2g}, {elapsed:.2f}s")
    assert ok


def test_c02_solver_equivalence(verdict):
    t0 = time.perf_counter()
    worst = None
    for force in FAMILIES:
        for n in range(3, 51):
            ctx = make_context(n, 2, requested_bits=256)
            a = solve_newton(n, force, ctx)
            b = solve_shooting(n, force, ctx)
            d = min(agreed_digits(p, q) for p, q in zip(a.points[1:-1], b.points[1:-1]))
            if worst is None or d < worst[0]:
                worst = (d, n, force.spec)
    elapsed = time.perf_counter() - t0
    ok = worst[0] >= 30 and elapsed < 30
    verdict("C2", ok, f"min agreed digits {worst[0]} (N={worst[1]}, {worst[2]}), {elapsed:.1f}s")
    assert ok


def test_c03_three_points(verdict):
    # independent scalar bisection on 1/x^2 - 1/(1-x)^2 + 1 = 0
    with mpmath.workdps(40):
        lo, hi = mpmath.mpf(0.5), mpmath.mpf(0.99)
        for _ in range(140):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if 1 / mid**2 - 1 / (1 - mid) ** 2 + 1 > 0 else (lo, mid)
        oracle = float(lo)
    x2 = float(solved(3, CONST1, 2).points[1])
    ok = abs(x2 - 0.53101) <= 5e-4 and abs(x2 - oracle) <= 5e-4
    verdict("C3", ok, f"x2 = {x2:.10f}, bisection {oracle:.10f}")
    assert ok


def test_c04_first_differences(verdict):
    parts, ok = [], True
    for force in FAMILIES:
        a = first_difference_deviation(solved(1000, force, 1))
        b = first_difference_deviation(solved(2000, force, 1))
        r = float(b / a)
        ok &= r <= 0.7
        parts.append(f"{force.spec} {r:.3f}")
    verdict("C4", ok, "N=2000/N=1000 ratio: " + ", ".join(parts))
    assert ok


def test_c05_gap_expansion(verdict):
    r1 = gap_expansion_check(solved(1000, CONST1, 1), 1).rows[0]
    r2 = gap_expansion_check(solved(2000, CONST1, 1), 1).rows[0]
    lo, hi = r1.extra["min_ratio"], r1.extra["max_ratio"]
    shrink = r1.extra["max_abs_ratio_error"] / r2.extra["max_abs_ratio_error"]
    ok = 0.8 <= lo and hi <= 1.2 and shrink >= 1.4
    verdict("C5", ok, f"ratios [{float(lo):.4f}, {float(hi):.4f}], shrink {float(shrink):.2f}x")
    assert ok


def test_c06_theorem1(verdict):
    configs = [solved(n, CONST1, 7) for n in (500, 1000, 2000)]
    report = thm1_report(configs, 1, range(1, 7))
    factors = []
    for l in range(1, 6):
        rows = sorted(report.select(id="main_term", l=l), key=lambda r: r.N)
        for a, b in zip(rows, rows[1:]):
            factors.append(float(a.ratio_or_slack / b.ratio_or_slack))
    min_digits = min(r.certified_digits for r in report.select(id="main_term") if r.l <= 5)
    signs = report.select(id="sign", N=1000)
    violations = sum(r.extra["violations"] for r in signs)
    ok = min(factors) >= 1.4 and min_digits >= 10 and violations == 0 and len(signs) == 6
    verdict("C6", ok, f"min decay factor {min(factors):.3f}, sign violations {violations}, "
                      f"min certified digits {min_digits}")
    assert ok


def test_c07_second_difference_slope(verdict):
    ns = [250, 500, 1000, 2000]
    ks = []
    for n in ns:
        config = solved(n, CONST1, 2)
        with config.context.local():
            x = config.points
            ks.append(max(abs(x[i + 2] - 2 * x[i + 1] + x[i]) for i in range(n - 2)))
    slope = loglog_slope(ns, ks)
    ok = abs(slope + 3) <= 0.1
    verdict("C7", ok, f"slope {slope:.4f}")
    assert ok


def _bound_grid(force_for, constant_for, key, verdict):
    worst, ok = None, True
    for args in ((1,), (2,)) if key == "C8" else ((2,), (3,)):
        force = force_for(*args)
        C = constant_for(*args)
        for n in (100, 300, 1000):
            config = solved(n, force, 8)
            table = difference_table(config, 8)
            with config.context.local():
                d = config.base_gap
                for l in range(2, 9):
                    k = kappa(table, l)
                    bound = d * (C * d) ** l * math.factorial(l)
                    margin = float(gmpy2.log10(bound / k))
                    ok &= k <= bound and table.certified(l)
                    if worst is None or margin < worst[0]:
                        worst = (margin, args, n, l)
    verdict(key, ok, f"63 cells, tightest margin 10^{worst[0]:.1f} at "
                     f"{worst[1]} N={worst[2]} l={worst[3]}")
    return ok


def test_c08_theorem2(verdict):
    with gmpy2.context(gmpy2.get_context(), precision=256):
        ok = _bound_grid(ForceModel.linear, lambda a: 2 * mpfr(a), "C8", verdict)
    assert ok


def test_c09_theorem3(verdict):
    with gmpy2.context(gmpy2.get_context(), precision=256):
        ok = _bound_grid(
            lambda n: ForceModel.power(1, n),
            lambda n: 2 * math.factorial(n) * gmpy2.exp(6),
            "C9",
            verdict,
        )
    assert ok


def test_c10_stirling(verdict):
    t0 = time.perf_counter()
    triple = all(
        diff_power_exact(l, i, n) == diff_power_recurrence(l, i, n) == placement_oracle(n, l, i)
        for n in range(9) for l in range(9) for i in range(5)
    )
    boundary = all(
        stirling2(n, l) == (0 if n < l else 1)
        for n in range(21) for l in range(21) if n <= l
    )
    ineq_fail = [
        (l, i, n)
        for l in range(9) for i in range(5) for n in range(8)
        if diff_power_exact(l, i, n + 1) > (l + i + n * l) * diff_power_exact(l, i, n)
    ]
    riordan = abs(float(stirling2(30, 3) / riordan_approx(30, 3)) - 1)
    elapsed = time.perf_counter() - t0
    ok = triple and boundary and not ineq_fail and riordan <= 1e-4 and elapsed < 10
    example = ""
    if ineq_fail:
        # smallest counterexample with n >= l, so the left side is not a bare l!
        l, i, n = min((t for t in ineq_fail if t[2] >= t[0]), key=sum, default=ineq_fail[0])
        lhs = diff_power_exact(l, i, n + 1)
        rhs = (l + i + n * l) * diff_power_exact(l, i, n)
        example = f" e.g. (l,i,n)=({l},{i},{n}): {lhs} > {rhs}"
    detail = (f"triple {triple}, boundary {boundary}, "
              f"inequality violated at {len(ineq_fail)} of 360 entries{example}, "
              f"riordan err {riordan:.2e}, {elapsed:.2f}s")
    verdict("C10", ok, detail)
    assert triple and boundary and riordan <= 1e-4 and elapsed < 10
    assert not ineq_fail, detail


def test_c11_precision_necessity(verdict):
    low = pipeline_digits(1000, CONST1, 6, 53)
    high = pipeline_digits(1000, CONST1, 6, 256)
    ok = low < 3 and high >= 10
    verdict("C11", ok, f"53 bits: {low} digits, 256 bits: {high} digits")
    assert ok


def test_c12_discretization(verdict):
    reports = [discretization_demo(n, 10) for n in (64, 256, 1024)]
    ok = all(r.passed for r in reports)
    tight = max(float(row.observed / row.predicted) for r in reports for row in r.rows)
    verdict("C12", ok, f"largest observed/bound {tight:.3f}")
    assert ok


def test_c13_runtime(verdict):
    ctx = make_context(2000, 1, requested_bits=512)
    t0 = time.perf_counter()
    config = solve_newton(2000, CONST1, ctx)
    single = time.perf_counter() - t0
    suite = time.perf_counter() - _START
    ok = single <= 30 and config.iterations <= 30 and suite <= 600
    verdict("C13", ok, f"N=2000/512 bits: {single:.2f}s, {config.iterations} iterations; "
                       f"suite {suite:.1f}s")
    assert ok
