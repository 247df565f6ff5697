"""Difference tables, fine-structure scales and theorem checks.

Every observable is evaluated twice: once on the configuration as solved and
once on an independent re-solve at doubled precision.  The agreement between
the two (:func:`~finestruct.precision.agreed_digits`) is the certificate
carried by each report row.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .equilibrium import Configuration, ForceModel, series_coefficient, solve, solve_newton
from .findiff import Sequence, diff_order
from .precision import (
    PrecisionContext,
    agreed_digits,
    decimal_text,
    digit_capacity,
    make_context,
    required_bits,
)

REPORT_COLUMNS = (
    "theorem", "id", "N", "l", "observed", "predicted",
    "ratio_or_slack", "certified_digits", "pass",
)
REPORT_DIGITS = 25


@dataclass(frozen=True)
class Tolerances:
    """Verdict thresholds; fixed by convergence studies at N = 500..2000."""

    certified_digits: int = 10
    # gap expansion ratios must sit in [1 - gap_band, 1 + gap_band]
    gap_band: float = 0.2
    # error at 2N over error at N
    decay: float = 0.7
    # leading-term profile ratios for the linear/power forces
    profile_band: float = 0.1


DEFAULT_TOLERANCES = Tolerances()


def as_mpfr(q) -> mpfr:
    """Exact rational to MPFR at the current precision."""
    if isinstance(q, Fraction):
        return mpfr(gmpy2.mpq(q.numerator, q.denominator))
    return mpfr(q)


# ---------------------------------------------------------------------------
# difference tables


@dataclass(frozen=True)
class TableView:
    """Difference rows at one precision; ``rows[l]`` is ``∇^l x_i``, offset 1."""

    rows: tuple
    points: tuple
    base_gap: object
    context: PrecisionContext


@dataclass(frozen=True)
class DifferenceTable:
    """``∇^l x_i`` for ``l = 0..l_max`` with a doubled-precision twin.

    ``certified_digits[l]`` counts digits of row ``l`` that survive the
    precision doubling, measured against the row's largest entry.  Rows whose
    entries sit below the rounding floor at both precisions are listed in
    ``vanishing``: they are zero to working precision.
    """

    n_points: int
    l_max: int
    force: ForceModel
    main: TableView
    check: TableView | None
    certified_digits: tuple
    vanishing: frozenset = frozenset()

    @property
    def rows(self) -> tuple:
        return self.main.rows

    @property
    def bits(self) -> int:
        return self.main.context.mantissa_bits

    def row(self, l: int) -> Sequence:
        return self.main.rows[l]

    def views(self):
        yield self.main
        if self.check is not None:
            yield self.check

    def certified(self, l: int, digits: int = DEFAULT_TOLERANCES.certified_digits) -> bool:
        return l in self.vanishing or self.certified_digits[l] >= digits


def _view(config: Configuration, l_max: int) -> TableView:
    with config.context.local():
        rows = [Sequence(config.points, 1)]
        for _ in range(l_max):
            nxt = rows[-1].values
            rows.append(Sequence(tuple(nxt[k + 1] - nxt[k] for k in range(len(nxt) - 1)), 1))
    return TableView(tuple(rows), config.points, config.base_gap, config.context)


def _row_digits(lo: Sequence, hi: Sequence, bits: int) -> int:
    cap = digit_capacity(bits)
    with gmpy2.context(gmpy2.get_context(), precision=2 * bits):
        scale = max(abs(v) for v in hi.values)
        err = max(abs(a - b) for a, b in zip(lo.values, hi.values))
        if err == 0:
            return cap
        if scale == 0:
            return 0
        return max(0, min(cap, int(gmpy2.floor(-gmpy2.log10(err / scale)))))


def noise_floor(l: int, bits: int):
    """Largest magnitude order-``l`` rounding noise can reach on points in [0, 1]."""
    return mpfr(2) ** (l + 2 - bits)


def difference_table(
    config: Configuration,
    l_max: int,
    certify: bool = True,
    allow_undersized: bool = False,
) -> DifferenceTable:
    """Difference rows of ``config`` up to order ``l_max``.

    Raises
    ------
    ValueError
        ``l_max >= N``, or the configuration's precision is below the sizing
        rule for ``l_max`` (unless ``allow_undersized``).
    """
    n = config.n_points
    ctx = config.context
    if l_max < 0 or l_max >= n:
        raise ValueError(f"order {l_max} needs more than {n} points")
    if not allow_undersized and (
        not ctx.sized or ctx.mantissa_bits < required_bits(n, max(l_max, 1))
    ):
        raise ValueError(
            f"{ctx.mantissa_bits}-bit configuration is under-sized for order {l_max} "
            f"(need {required_bits(n, max(l_max, 1))} bits)"
        )
    main = _view(config, l_max)
    if not certify:
        return DifferenceTable(n, l_max, config.force, main, None, (0,) * (l_max + 1))
    twin = solve_newton(n, config.force, ctx.doubled())
    check = _view(twin, l_max)
    bits = ctx.mantissa_bits
    digits = tuple(_row_digits(main.rows[l], check.rows[l], bits) for l in range(l_max + 1))
    vanishing = frozenset(
        l
        for l in range(2, l_max + 1)
        if max(abs(v) for v in main.rows[l].values) <= noise_floor(l, bits)
        and max(abs(v) for v in check.rows[l].values) <= noise_floor(l, 2 * bits)
    )
    return DifferenceTable(n, l_max, config.force, main, check, digits, vanishing)


def table_for(
    n: int, force: ForceModel, l_max: int, bits: int | None = None
) -> DifferenceTable:
    """Solve at the sizing-rule precision for ``l_max`` and tabulate."""
    ctx = make_context(n, max(l_max, 1), bits)
    return difference_table(solve(n, force, ctx), l_max)


# ---------------------------------------------------------------------------
# scale profile


@dataclass(frozen=True)
class ScaleProfile:
    """Per-order ``κ(N, l) = max_i |∇^l x_i|`` with location and sign data."""

    n_points: int
    kappa: tuple
    argmax_index: tuple
    sign_pattern: tuple
    certified_digits: tuple


def _sign_pattern(values) -> str:
    pos = any(v > 0 for v in values)
    neg = any(v < 0 for v in values)
    if pos and neg:
        return "mixed"
    if pos:
        return "positive"
    if neg:
        return "negative"
    return "zero"


def scale_profile(table: DifferenceTable) -> ScaleProfile:
    kappa, where, signs = [], [], []
    for row in table.rows:
        k = max(range(len(row)), key=lambda j: abs(row.values[j]))
        kappa.append(abs(row.values[k]))
        where.append(row.offset + k)
        signs.append(_sign_pattern(row.values))
    return ScaleProfile(
        table.n_points, tuple(kappa), tuple(where), tuple(signs), table.certified_digits
    )


def kappa(table: DifferenceTable, l: int, view: TableView | None = None):
    row = (view or table.main).rows[l]
    return max(abs(v) for v in row.values)


# ---------------------------------------------------------------------------
# reports


@dataclass
class ReportRow:
    theorem: str
    id: str
    N: int
    l: int
    observed: object
    predicted: object
    ratio_or_slack: object
    certified_digits: int
    passed: bool
    constant: object = None
    uniformity: object = None
    extra: dict = field(default_factory=dict)

    def csv_fields(self) -> list:
        return [
            self.theorem,
            self.id,
            self.N,
            self.l,
            _text(self.observed),
            _text(self.predicted),
            _text(self.ratio_or_slack),
            self.certified_digits,
            "true" if self.passed else "false",
        ]


def _text(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return decimal_text(value, REPORT_DIGITS)


@dataclass
class TheoremReport:
    """Predicted-vs-observed rows for one theorem check.

    Exploratory reports (the ``l ~ εN`` probe) record verdicts but never
    gate: :attr:`passed` is always true for them.
    """

    theorem: str
    rows: list = field(default_factory=list)
    exploratory: bool = False

    @property
    def passed(self) -> bool:
        return self.exploratory or all(r.passed for r in self.rows)

    def select(self, id: str | None = None, N: int | None = None, l: int | None = None):
        return [
            r for r in self.rows
            if (id is None or r.id == id) and (N is None or r.N == N) and (l is None or r.l == l)
        ]

    def extend(self, other: "TheoremReport") -> "TheoremReport":
        self.rows.extend(other.rows)
        return self

    def to_csv(self) -> str:
        return reports_to_csv([self])


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for rep in reports:
        for row in rep.rows:
            w.writerow(row.csv_fields())
    return buf.getvalue()


def _both(table: DifferenceTable, fn):
    """Evaluate ``fn(view)`` at working precision and on the doubled twin."""
    out = []
    for view in table.views():
        with view.context.local():
            out.append(fn(view))
    if len(out) == 1:
        out.append(None)
    return out


def _digits(lo, hi) -> int:
    if hi is None:
        return 0
    return agreed_digits(lo, hi)


def _constant_force(config: Configuration, F) -> Fraction:
    if config.force.kind not in ("const", "zero"):
        raise ValueError(f"needs a constant force, got {config.force.spec}")
    have = config.force.amplitude
    if F is not None and Fraction(str(F)) != have:
        raise ValueError(f"F={F} does not match configuration force {config.force.spec}")
    return have


def _delta_diffs(view: TableView, l: int) -> list:
    # ∇^l δ_i = ∇^(l+1) x_i / Δ
    return [v / view.base_gap for v in view.rows[l + 1].values]


# -- gap expansion -----------------------------------------------------------


def gap_window(n: int) -> list:
    """1-based gap indices in [0.1N, 0.9N] away from the sign change at N/2."""
    lo, hi = math.ceil(0.1 * n), min(math.floor(0.9 * n), n - 1)
    return [i for i in range(max(lo, 1), hi + 1) if abs(i - n / 2) >= 0.05 * n]


def gap_expansion_check(
    config: Configuration, F=None, tol: Tolerances = DEFAULT_TOLERANCES
) -> TheoremReport:
    """Second-order gap law ``Δ_i - 1/(N-1) ~ (F/2) N^-3 (N/2 - i)``.

    Ratios of observed to predicted deviation are taken on :func:`gap_window`.
    """
    F = _constant_force(config, F)
    n = config.n_points
    report = TheoremReport("gaps")
    table = difference_table(config, 1)
    window = gap_window(n)

    if F == 0:
        def zero_dev(view):
            mean = mpfr(1) / (n - 1)
            return max(abs(g - mean) for g in view.rows[1].values)

        lo, _ = _both(table, zero_dev)
        report.rows.append(ReportRow(
            "gaps", "ratio_band", n, 1, lo, mpfr(0), lo,
            table.certified_digits[1], bool(lo <= config.context.solver_tol),
        ))
        return report

    def ratios(view):
        mean = mpfr(1) / (n - 1)
        scale = as_mpfr(F) / 2 / mpfr(n) ** 3
        out = []
        for i in window:
            observed = view.rows[1].at(i) - mean
            predicted = scale * (mpfr(n) / 2 - i)
            out.append((observed / predicted, observed, predicted))
        return out

    lo, hi = _both(table, ratios)
    worst = max(range(len(lo)), key=lambda k: abs(lo[k][0] - 1))
    r, obs, pred = lo[worst]
    digits = _digits(obs, hi[worst][1]) if hi else 0
    rs = [t[0] for t in lo]
    ok = all(1 - tol.gap_band <= x <= 1 + tol.gap_band for x in rs)
    report.rows.append(ReportRow(
        "gaps", "ratio_band", n, 1, obs, pred, r, digits,
        ok and digits >= tol.certified_digits,
        uniformity=max(rs) - min(rs),
        extra={"max_abs_ratio_error": abs(r - 1), "min_ratio": min(rs), "max_ratio": max(rs)},
    ))
    return report


# -- theorem 1 ---------------------------------------------------------------


def main_term(l: int, F, base_gap):
    """``a_l l! (F Δ^2)^l``: the exact order-``l`` contribution to ``∇^l δ``."""
    a = series_coefficient(l) * math.factorial(l)
    return as_mpfr(a) * (as_mpfr(F) * base_gap**2) ** l


def closed_form(l: int, F, base_gap):
    """``(-1)^l sqrt(2) (F l Δ^2 / e)^l Δ``, the asymptotic ``∇^(l+1) x``."""
    e = gmpy2.exp(1)
    return (-1) ** l * gmpy2.sqrt(2) * (as_mpfr(F) * l * base_gap**2 / e) ** l * base_gap


def stirling_form_ratio(l: int):
    """``|a_l l!| / (sqrt(2) (l/e)^l)``; tends to 1, about 0.96 at ``l = 1``."""
    a = abs(series_coefficient(l)) * math.factorial(l)
    return as_mpfr(a) / (gmpy2.sqrt(2) * (mpfr(l) / gmpy2.exp(1)) ** l)


def default_l_cap(n: int) -> int:
    """Default top order for Theorem 1 sweeps, ``max(6, round(sqrt(N)/4))``."""
    return max(6, round(math.sqrt(n) / 4))


def thm1_report(
    configs,
    F=None,
    l_range=range(1, 6),
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TheoremReport:
    """Constant-force asymptotics of ``∇^(l+1) x_i``.

    Two row kinds per ``(N, l)``:

    ``main_term``
        ``max_i |∇^l δ_i / (a_l l! (F Δ^2)^l) - 1|``.  Passes when certified
        and, against the previous (smaller) ``N`` in the sweep, it decays by
        at least ``tol.decay`` per doubling of ``N``.
    ``sign``
        ``∇^(l+1) x_i`` has sign ``(-1)^l`` at every ``i``; the ratio column
        holds observed over the closed form ``(-1)^l sqrt(2)(F l Δ^2/e)^l Δ``.
    """
    configs = sorted(configs, key=lambda c: c.n_points)
    if not configs:
        raise ValueError("no configurations")
    F = _constant_force(configs[0], F)
    if any(c.force != configs[0].force for c in configs):
        raise ValueError("all configurations must share one force")
    if F == 0:
        raise ValueError("Theorem 1 needs F > 0")
    l_values = list(l_range)
    if min(l_values) < 1:
        raise ValueError("orders start at 1")
    report = TheoremReport("thm1")
    previous: dict = {}
    for config in configs:
        n = config.n_points
        table = difference_table(config, max(l_values) + 1)
        for l in l_values:
            def main_stats(view, l=l):
                dd = _delta_diffs(view, l)
                pred = main_term(l, F, view.base_gap)
                ratios = [v / pred for v in dd]
                k = max(range(len(dd)), key=lambda j: abs(dd[j]))
                return dd[k], pred, max(abs(r - 1) for r in ratios), max(ratios) - min(ratios)

            lo, hi = _both(table, main_stats)
            obs, pred, dev, spread = lo
            digits = _digits(obs, hi[0] if hi else None)
            certified = digits >= tol.certified_digits
            ok = certified
            decay = None
            if l in previous:
                n0, dev0 = previous[l]
                decay = dev / dev0
                ok = ok and decay <= tol.decay ** math.log2(n / n0)
            previous[l] = (n, dev)
            report.rows.append(ReportRow(
                "thm1", "main_term", n, l, obs, pred, dev, digits, ok,
                uniformity=spread, extra={"decay": decay},
            ))

            def sign_stats(view, l=l):
                row = view.rows[l + 1].values
                want = 1 if l % 2 == 0 else -1
                wrong = sum(1 for v in row if v * want <= 0)
                k = max(range(len(row)), key=lambda j: abs(row[j]))
                form = closed_form(l, F, view.base_gap)
                return row[k], form, row[k] / form, wrong

            lo, hi = _both(table, sign_stats)
            obs, form, ratio, wrong = lo
            digits = _digits(obs, hi[0] if hi else None)
            with config.context.local():
                sf = stirling_form_ratio(l)
            report.rows.append(ReportRow(
                "thm1", "sign", n, l, obs, form, ratio, digits,
                wrong == 0 and digits >= tol.certified_digits,
                extra={"violations": wrong, "stirling_form_ratio": sf},
            ))
    return report


def epsilon_band_probe(
    config: Configuration, F=None, eps: float = 0.02, C: float = 1.0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TheoremReport:
    """Exploratory check of ``|∇^l δ_i| / (sqrt(2)(F l Δ^2/e)^l)`` in ``(1 - Cε, 1 + Cε)``.

    ``l = round(ε N)``.  The verdict is recorded but the report never gates.
    """
    F = _constant_force(config, F)
    if not eps > 0:
        raise ValueError("eps must be positive")
    n = config.n_points
    l = round(eps * n)
    if l < 1:
        raise ValueError(f"eps={eps} gives order 0 at N={n}")
    if l + 1 >= n:
        raise ValueError(f"order {l} is beyond N={n}")
    table = difference_table(config, l + 1)
    if not table.certified(l + 1, tol.certified_digits):
        raise ValueError(f"order {l + 1} is not certified at {table.bits} bits")

    def stats(view):
        scale = gmpy2.sqrt(2) * (as_mpfr(F) * l * view.base_gap**2 / gmpy2.exp(1)) ** l
        rs = [abs(v) / scale for v in _delta_diffs(view, l)]
        return max(abs(v) for v in _delta_diffs(view, l)), scale, min(rs), max(rs)

    lo, hi = _both(table, stats)
    obs, scale, r_min, r_max = lo
    within = bool(1 - C * eps < r_min and r_max < 1 + C * eps)
    report = TheoremReport("eps-band", exploratory=True)
    report.rows.append(ReportRow(
        "eps-band", "ratio", n, l, obs, scale, r_max, _digits(obs, hi[0] if hi else None),
        within, constant=C, uniformity=r_max - r_min,
        extra={"eps": eps, "min_ratio": r_min, "max_ratio": r_max},
    ))
    return report


# -- theorems 2 and 3 --------------------------------------------------------


def _bound_rows(theorem, config, table, constant_fn, l_values, tol) -> list:
    rows = []
    n = config.n_points
    for l in l_values:
        def stats(view, l=l):
            d = view.base_gap
            C = constant_fn()
            bound = d * (C * d) ** l * math.factorial(l)
            k = kappa(table, l, view)
            return k, bound, bound - k, C

        lo, hi = _both(table, stats)
        k, bound, slack, C = lo
        digits = _digits(k, hi[0] if hi else None)
        rows.append(ReportRow(
            theorem, "bound", n, l, k, bound, slack, digits,
            bool(slack >= 0) and digits >= tol.certified_digits, constant=C,
        ))
    return rows


def _profile_row(theorem, config, table, alpha, power, tol) -> ReportRow:
    # ∇^2 x_i against a_1 Δ^3 α x_{i+1}^power, i = 1..N-2
    a1 = as_mpfr(series_coefficient(1))

    def stats(view):
        d = view.base_gap
        ratios = []
        for i in range(1, config.n_points - 1):
            lead = a1 * d**3 * as_mpfr(alpha) * view.points[i] ** power
            ratios.append(view.rows[2].at(i) / lead)
        worst = max(range(len(ratios)), key=lambda j: abs(ratios[j] - 1))
        return view.rows[2].at(worst + 1), ratios[worst], max(ratios) - min(ratios)

    lo, hi = _both(table, stats)
    obs, r, spread = lo
    digits = _digits(obs, hi[0] if hi else None)
    return ReportRow(
        theorem, "l2_profile", config.n_points, 2, obs, obs / r, r, digits,
        bool(abs(r - 1) <= tol.profile_band) and digits >= tol.certified_digits,
        uniformity=spread,
    )


def _alpha_check(config: Configuration, kind: str, alpha, probe: bool) -> Fraction:
    if config.force.kind != kind:
        raise ValueError(f"needs a {kind} force, got {config.force.spec}")
    a = config.force.alpha
    if alpha is not None and Fraction(str(alpha)) != a:
        raise ValueError(f"alpha={alpha} does not match {config.force.spec}")
    if a < 1 and not probe:
        raise ValueError("the theorem assumes alpha >= 1; pass probe=True to explore")
    return a


def thm2_report(
    config: Configuration,
    alpha=None,
    l_range=range(2, 9),
    probe: bool = False,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TheoremReport:
    """Linear force: ``κ(N, l) <= Δ (2αΔ)^l l!`` plus the leading-term shapes.

    ``l2_profile`` compares ``∇^2 x_i`` with ``a_1 Δ^3 α x_{i+1}`` (varies
    with ``i``); ``l3_constant`` compares ``∇^3 x_i`` with ``a_1 α Δ^4`` (does
    not).
    """
    a = _alpha_check(config, "linear", alpha, probe)
    l_values = list(l_range)
    if min(l_values) < 2:
        raise ValueError("orders start at 2")
    table = difference_table(config, max(max(l_values), 3))
    report = TheoremReport("thm2")
    report.rows += _bound_rows("thm2", config, table, lambda: 2 * as_mpfr(a), l_values, tol)
    if 2 in l_values:
        report.rows.append(_profile_row("thm2", config, table, a, 1, tol))
    if 3 in l_values:
        a1 = as_mpfr(series_coefficient(1))

        def stats(view):
            lead = a1 * as_mpfr(a) * view.base_gap**4
            rs = [v / lead for v in view.rows[3].values]
            worst = max(range(len(rs)), key=lambda j: abs(rs[j] - 1))
            return view.rows[3].values[worst], lead, rs[worst], max(rs) - min(rs)

        lo, hi = _both(table, stats)
        obs, lead, r, spread = lo
        digits = _digits(obs, hi[0] if hi else None)
        report.rows.append(ReportRow(
            "thm2", "l3_constant", config.n_points, 3, obs, lead, r, digits,
            bool(abs(r - 1) <= tol.profile_band) and digits >= tol.certified_digits,
            uniformity=spread,
        ))
    if probe and a < 1:
        for row in report.rows:
            row.extra["probe"] = True
    return report


def thm3_constant(alpha, n: int):
    """``2 α n! e^6``."""
    return 2 * as_mpfr(alpha) * math.factorial(n) * gmpy2.exp(6)


def thm3_report(
    config: Configuration,
    alpha=None,
    n=None,
    l_range=range(2, 9),
    probe: bool = False,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TheoremReport:
    """Power force ``α x^n``: ``κ(N, l) <= Δ (CΔ)^l l!`` with ``C = 2 α n! e^6``."""
    a = _alpha_check(config, "power", alpha, probe)
    power = config.force.exponent
    if n is not None and int(n) != power:
        raise ValueError(f"n={n} does not match {config.force.spec}")
    l_values = list(l_range)
    if min(l_values) < 2:
        raise ValueError("orders start at 2")
    table = difference_table(config, max(l_values))
    report = TheoremReport("thm3")
    report.rows += _bound_rows(
        "thm3", config, table, lambda: thm3_constant(a, power), l_values, tol
    )
    if 2 in l_values:
        report.rows.append(_profile_row("thm3", config, table, a, power, tol))
    return report


# -- smooth discretization ---------------------------------------------------


def discretization_demo(n: int, n_max: int, bits: int | None = None) -> TheoremReport:
    """``|∇^k g_i| <= (2π)^(k+1) N^-k`` for ``g_i = sin(2π i / N)``, ``k <= n_max``."""
    if n < n_max + 1:
        raise ValueError("need N >= n_max + 1")
    ctx = make_context(n, max(n_max, 1), bits)
    report = TheoremReport("discretize")

    def rows_at(c: PrecisionContext):
        with c.local():
            two_pi = 2 * gmpy2.const_pi()
            g = Sequence(tuple(gmpy2.sin(two_pi * i / n) for i in range(1, n + 1)), 1)
            return [diff_order(g, k) for k in range(n_max + 1)]

    lo_rows, hi_rows = rows_at(ctx), rows_at(ctx.doubled())
    for k in range(n_max + 1):
        with ctx.local():
            two_pi = 2 * gmpy2.const_pi()
            bound = two_pi ** (k + 1) / mpfr(n) ** k
            obs = max(abs(v) for v in lo_rows[k].values)
            obs_hi = max(abs(v) for v in hi_rows[k].values)
            digits = agreed_digits(obs, obs_hi)
            report.rows.append(ReportRow(
                "discretize", "bound", n, k, obs, bound, bound - obs, digits,
                bool(obs <= bound) and all(abs(v) <= bound for v in lo_rows[k].values),
                constant=two_pi,
            ))
    return report


# ---------------------------------------------------------------------------
# convergence helpers


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = [math.log(float(x)) for x in xs]
    ly = [float(gmpy2.log(mpfr(y))) for y in ys]
    return statistics.linear_regression(lx, ly).slope


def first_difference_deviation(config: Configuration):
    """``max_i |Δ_i (N - 1) - 1|``."""
    with config.context.local():
        return max(abs(g * (config.n_points - 1) - 1) for g in config.gaps)


def pipeline_digits(n: int, force: ForceModel, l: int, bits: int) -> int:
    """Certified digits of ``κ`` for ``∇^l δ`` when the whole pipeline runs at ``bits``.

    Solves at ``bits`` and ``2 * bits`` with no sizing rule, so it shows what
    happens when precision is too low.
    """
    ctx = PrecisionContext.unsized(bits, n, l + 1)
    config = solve_newton(n, force, ctx)
    table = difference_table(config, l + 1, allow_undersized=True)

    def observed(view):
        return max(abs(v) for v in _delta_diffs(view, l))

    lo, hi = _both(table, observed)
    return agreed_digits(lo, hi)
