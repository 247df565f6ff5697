"""Fixed configurations of a Coulomb chain on [0, 1] under an external force.

Interior points balance the neighbour repulsion ``f(r) = r^-2`` against the
external force::

    f(x_i - x_{i-1}) - f(x_{i+1} - x_i) + F(x_i) = 0,   i = 2..N-1

with ``x_1 = 0`` and ``x_N = 1``.  Two unrelated solvers are provided:
damped Newton on the tridiagonal system, and shooting on the first gap.
"""

from __future__ import annotations

import decimal
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import gmpy2
from gmpy2 import mpfr

from .findiff import Sequence
from .precision import PrecisionContext, decimal_text

MAX_NEWTON_ITER = 60
CONTINUATION_STAGES = 4
MIN_STEP = 2.0**-40


class SolverError(RuntimeError):
    """Raised when a solver cannot reach the requested residual."""


class BracketError(SolverError):
    """Shooting could not bracket the closure condition."""


class InteractionLaw:
    """Coulomb repulsion between neighbours."""

    @staticmethod
    def f(r):
        return 1 / (r * r)

    @staticmethod
    def df(r):
        return -2 / (r * r * r)


coulomb = InteractionLaw()


def _exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value))


@dataclass(frozen=True)
class ForceModel:
    """External force ``F(x)`` on [0, 1].

    ``kind`` is ``zero``, ``const`` (``F``), ``linear`` (``alpha * x``) or
    ``power`` (``alpha * x**n``).  The amplitude is kept as an exact rational
    so the same model can be evaluated at any precision.
    """

    kind: str = "zero"
    amplitude: Fraction = Fraction(0)
    exponent: int = 0

    KINDS = ("zero", "const", "linear", "power")

    def __post_init__(self):
        object.__setattr__(self, "amplitude", _exact(self.amplitude))
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown force kind {self.kind!r}")
        if self.kind == "zero":
            object.__setattr__(self, "amplitude", Fraction(0))
        elif self.kind == "const" and self.amplitude < 0:
            raise ValueError("constant force must be >= 0")
        elif self.kind in ("linear", "power") and self.amplitude <= 0:
            raise ValueError("alpha must be > 0")
        if self.kind == "power":
            if self.exponent < 2:
                raise ValueError("power force needs n >= 2")
        elif self.kind == "linear":
            object.__setattr__(self, "exponent", 1)
        else:
            object.__setattr__(self, "exponent", 0)

    @classmethod
    def zero(cls) -> "ForceModel":
        return cls("zero")

    @classmethod
    def constant(cls, F) -> "ForceModel":
        return cls("const", F)

    @classmethod
    def linear(cls, alpha) -> "ForceModel":
        return cls("linear", alpha, 1)

    @classmethod
    def power(cls, alpha, n: int) -> "ForceModel":
        return cls("power", alpha, n)

    @classmethod
    def parse(cls, spec: str) -> "ForceModel":
        """Parse ``zero | const:<F> | linear:<alpha> | power:<alpha>:<n>``."""
        parts = spec.strip().split(":")
        kind = parts[0]
        try:
            if kind == "zero" and len(parts) == 1:
                return cls.zero()
            if kind == "const" and len(parts) == 2:
                return cls.constant(Fraction(parts[1]))
            if kind == "linear" and len(parts) == 2:
                return cls.linear(Fraction(parts[1]))
            if kind == "power" and len(parts) == 3:
                return cls.power(Fraction(parts[1]), int(parts[2]))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad force spec {spec!r}: {exc}") from None
        raise ValueError(f"bad force spec {spec!r}")

    @property
    def spec(self) -> str:
        a = _fraction_text(self.amplitude)
        return {
            "zero": "zero",
            "const": f"const:{a}",
            "linear": f"linear:{a}",
            "power": f"power:{a}:{self.exponent}",
        }[self.kind]

    @property
    def alpha(self) -> Fraction:
        return self.amplitude

    def scaled(self, s: Fraction) -> "ForceModel":
        if self.kind == "zero":
            return self
        return ForceModel(self.kind, self.amplitude * s, self.exponent)

    def _amp(self):
        return gmpy2.mpfr(gmpy2.mpq(self.amplitude.numerator, self.amplitude.denominator))

    def value(self, x):
        """``F(x)`` at the current MPFR precision."""
        if self.kind == "zero":
            return mpfr(0)
        if self.kind == "const":
            return self._amp()
        return self._amp() * x**self.exponent

    def derivative(self, x):
        if self.kind in ("zero", "const"):
            return mpfr(0)
        if self.kind == "linear":
            return self._amp()
        return self._amp() * self.exponent * x ** (self.exponent - 1)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "const":
            out["F"] = _fraction_text(self.amplitude)
        elif self.kind in ("linear", "power"):
            out["alpha"] = _fraction_text(self.amplitude)
        if self.kind == "power":
            out["n"] = self.exponent
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ForceModel":
        kind = data["kind"]
        if kind == "zero":
            return cls.zero()
        if kind == "const":
            return cls.constant(Fraction(str(data["F"])))
        if kind == "linear":
            return cls.linear(Fraction(str(data["alpha"])))
        if kind == "power":
            return cls.power(Fraction(str(data["alpha"])), int(data["n"]))
        raise ValueError(f"unknown force kind {kind!r}")


def _fraction_text(q: Fraction) -> str:
    """Exact text for an amplitude: integer, terminating decimal, or ``p/q``."""
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    with decimal.localcontext() as dctx:
        dctx.prec = 200
        return str(decimal.Decimal(q.numerator) / decimal.Decimal(q.denominator))


@dataclass(frozen=True)
class Configuration:
    """Solved point system ``x_1 = 0 < x_2 < ... < x_N = 1``.

    Gaps, base gap and normalized deviations are derived on demand at the
    context precision.  ``gaps[k]`` is ``Δ_{k+1}`` (0-based storage of the
    1-based gap index).
    """

    n_points: int
    points: tuple
    force: ForceModel
    context: PrecisionContext
    residual: object = field(compare=False)
    iterations: int = field(default=0, compare=False)
    solver: str = field(default="newton", compare=False)
    domain_length: int = 1

    @cached_property
    def gaps(self) -> tuple:
        x = self.points
        with self.context.local():
            return tuple(x[k + 1] - x[k] for k in range(len(x) - 1))

    @property
    def base_gap(self):
        return self.gaps[0]

    @cached_property
    def deviations(self) -> tuple:
        """``δ_i`` with ``Δ_i = Δ (1 + δ_i)``; ``δ_1`` is exactly 0."""
        d = self.base_gap
        with self.context.local():
            return (mpfr(0),) + tuple(g / d - 1 for g in self.gaps[1:])

    @property
    def bits(self) -> int:
        return self.context.mantissa_bits


def _interior_residuals(x: list, force: ForceModel) -> list:
    n = len(x)
    gaps = [x[k + 1] - x[k] for k in range(n - 1)]
    pull = [1 / (g * g) for g in gaps]
    return [pull[k - 1] - pull[k] + force.value(x[k]) for k in range(1, n - 1)]


def _max_abs(values) -> object:
    return max((abs(v) for v in values), default=mpfr(0))


def solve_tridiagonal(sub: list, diag: list, sup: list, rhs: list) -> list:
    """Thomas algorithm; ``sub[0]`` and ``sup[-1]`` are ignored."""
    n = len(diag)
    c = [None] * n
    d = [None] * n
    c[0] = sup[0] / diag[0] if n > 1 else 0
    d[0] = rhs[0] / diag[0]
    for k in range(1, n):
        denom = diag[k] - sub[k] * c[k - 1]
        if k < n - 1:
            c[k] = sup[k] / denom
        d[k] = (rhs[k] - sub[k] * d[k - 1]) / denom
    out = [None] * n
    out[-1] = d[-1]
    for k in range(n - 2, -1, -1):
        out[k] = d[k] - c[k] * out[k + 1]
    return out


def _newton(x: list, force: ForceModel, tol, max_iter: int) -> tuple[list, object, int]:
    """Damped Newton from ``x``; returns (points, residual, iterations)."""
    n = len(x)
    res = _interior_residuals(x, force)
    norm = _max_abs(res)
    for it in range(max_iter + 1):
        if norm <= tol:
            return x, norm, it
        if it == max_iter:
            break
        gaps = [x[k + 1] - x[k] for k in range(n - 1)]
        slope = [coulomb.df(g) for g in gaps]
        # rows are interior points 1..n-2
        sub = [-slope[k - 1] for k in range(1, n - 1)]
        sup = [-slope[k] for k in range(1, n - 1)]
        diag = [slope[k - 1] + slope[k] + force.derivative(x[k]) for k in range(1, n - 1)]
        step = solve_tridiagonal(sub, diag, sup, [-r for r in res])
        t = mpfr(1)
        while True:
            trial = [x[0]] + [x[k] + t * step[k - 1] for k in range(1, n - 1)] + [x[-1]]
            if all(trial[k] < trial[k + 1] for k in range(n - 1)):
                trial_res = _interior_residuals(trial, force)
                trial_norm = _max_abs(trial_res)
                if trial_norm < norm:
                    break
            t /= 2
            if t < MIN_STEP:
                raise SolverError(f"Newton stalled at residual {float(norm):.3e}")
        x, res, norm = trial, trial_res, trial_norm
    raise SolverError(f"Newton did not converge in {max_iter} iterations")


def solve_newton(
    n: int, force: ForceModel, ctx: PrecisionContext, max_iter: int = MAX_NEWTON_ITER
) -> Configuration:
    """Solve the equilibrium system by damped Newton iteration.

    Unknowns are the interior points; the Jacobian is tridiagonal and each
    step costs O(N).  Steps are halved until ordering is preserved and the
    residual drops.  If the full force stalls from equal spacing, the force
    is ramped up geometrically over a few continuation stages.

    Raises
    ------
    SolverError
        No convergence within ``max_iter`` iterations at any stage.
    """
    if n < 2:
        raise ValueError("need at least two points")
    with ctx.local():
        x = [mpfr(k) / (n - 1) for k in range(n)]
        x[0], x[-1] = mpfr(0), mpfr(1)
        if n == 2:
            return Configuration(n, tuple(x), force, ctx, mpfr(0), 0, "newton")
        tol = mpfr(ctx.solver_tol)
        try:
            x, norm, its = _newton(x, force, tol, max_iter)
        except SolverError:
            its = 0
            for stage in range(CONTINUATION_STAGES - 1, -1, -1):
                scale = Fraction(1, 2**stage)
                x, norm, k = _newton(x, force.scaled(scale), tol, max_iter)
                its += k
        return Configuration(n, tuple(x), force, ctx, norm, its, "newton")


def solve_shooting(n: int, force: ForceModel, ctx: PrecisionContext) -> Configuration:
    """Solve by shooting on the first gap.

    For a trial first gap, ``Δ_i = (Δ_{i-1}^-2 + F(x_i))^(-1/2)`` fixes the
    whole chain; the first gap is bisected until the chain ends at 1.
    Independent of :func:`solve_newton`.
    """
    if n < 2:
        raise ValueError("need at least two points")
    with ctx.local():
        if n == 2:
            return Configuration(n, (mpfr(0), mpfr(1)), force, ctx, mpfr(0), 0, "shooting")

        def chain(first_gap):
            x = [mpfr(0), first_gap]
            gap = first_gap
            for k in range(1, n - 1):
                gap = gmpy2.rec_sqrt(1 / (gap * gap) + force.value(x[k]))
                x.append(x[k] + gap)
            return x

        lo = mpfr(1) / (2 * (n - 1))
        hi = mpfr(1)
        if not (chain(lo)[-1] < 1 < chain(hi)[-1]):
            raise BracketError(f"cannot bracket first gap for {force.spec}")
        iterations = 0
        while True:
            mid = (lo + hi) / 2
            if mid <= lo or mid >= hi:
                break
            iterations += 1
            if chain(mid)[-1] < 1:
                lo = mid
            else:
                hi = mid
        # keep whichever end lands closer to 1
        x_lo, x_hi = chain(lo), chain(hi)
        x = x_lo if abs(x_lo[-1] - 1) <= abs(x_hi[-1] - 1) else x_hi
        x[-1] = mpfr(1)
        if not all(x[k] < x[k + 1] for k in range(n - 1)):
            raise SolverError("shooting produced an unordered chain")
        residual = _max_abs(_interior_residuals(x, force))
        return Configuration(n, tuple(x), force, ctx, residual, iterations, "shooting")


@lru_cache(maxsize=64)
def solve(n: int, force: ForceModel, ctx: PrecisionContext) -> Configuration:
    """Cached :func:`solve_newton`; solves are deterministic."""
    return solve_newton(n, force, ctx)


@dataclass(frozen=True)
class KKTReport:
    left_slack: object
    right_slack: object
    passed: bool


def kkt_check(config: Configuration, force: ForceModel | None = None) -> KKTReport:
    """Endpoint conditions for pinned endpoints.

    Left: ``-f(x_2 - x_1) + F(x_1) <= 0``.  Right: ``f(x_N - x_{N-1}) + F(x_N) >= 0``.
    """
    force = force or config.force
    x = config.points
    with config.context.local():
        left = -coulomb.f(x[1] - x[0]) + force.value(x[0])
        right = coulomb.f(x[-1] - x[-2]) + force.value(x[-1])
    return KKTReport(left, right, bool(left <= 0 and right >= 0))


def q_profile(config: Configuration, force: ForceModel | None = None) -> Sequence:
    """``Q_i = Δ^2 * sum_{k=2..i} F(x_k)`` for ``i = 2..N-1`` (offset 2)."""
    force = force or config.force
    n = config.n_points
    if n < 3:
        raise ValueError("Q profile needs an interior point")
    x = config.points
    with config.context.local():
        d2 = config.base_gap**2
        acc = mpfr(0)
        out = []
        for k in range(1, n - 1):
            acc += force.value(x[k])
            out.append(d2 * acc)
    return Sequence(tuple(out), 2)


def series_coefficient(m: int) -> Fraction:
    """``a_m = (-1)^m (2m)! / (2^m m!)^2``, the Taylor coefficients of ``(1+Q)^(-1/2)``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return (-1) ** m * Fraction(math.factorial(2 * m), (2**m * math.factorial(m)) ** 2)


def series_delta(q, terms: int):
    """Partial sum ``sum_{m=1..terms} a_m q^m`` of ``(1 + q)^(-1/2) - 1``.

    Exact for Fraction input, MPFR at the current precision otherwise.
    """
    if terms < 1:
        raise ValueError("need at least one term")
    if abs(q) >= 1:
        raise ValueError("series diverges for |Q| >= 1")
    exact = isinstance(q, (Fraction, int))
    if not exact:
        q = mpfr(q)
    total = Fraction(0) if exact else mpfr(0)
    power = q
    for m in range(1, terms + 1):
        a = series_coefficient(m)
        coeff = a if exact else mpfr(gmpy2.mpq(a.numerator, a.denominator))
        total += coeff * power
        power *= q
    return total


def series_truncation_bound(q, terms: int):
    """``|q|^(terms+1) / (1 - |q|)``, valid because ``|a_m| <= 1``."""
    q = abs(q)
    return q ** (terms + 1) / (1 - q)


def series_consistency(config: Configuration, force: ForceModel | None = None):
    """``max_i |δ_i - ((1 + Q_i)^(-1/2) - 1)|`` over ``i = 2..N-1``."""
    if config.n_points < 3:
        return mpfr(0)
    qs = q_profile(config, force)
    dev = config.deviations
    with config.context.local():
        return _max_abs(
            dev[i - 1] - (gmpy2.rec_sqrt(1 + qs.at(i)) - 1) for i in range(2, config.n_points)
        )


def sig_digits(bits: int) -> int:
    """Digits written per point in configuration JSON."""
    return math.ceil(bits * 0.3011) + 5


def config_to_json(config: Configuration) -> str:
    ctx = config.context
    digits = sig_digits(ctx.mantissa_bits)
    doc = {
        "n": config.n_points,
        "force": config.force.to_json(),
        "bits": ctx.mantissa_bits,
        "tol": repr(ctx.solver_tol),
        "l_max": ctx.l_max,
        "points": [decimal_text(p, digits) for p in config.points],
    }
    return json.dumps(doc, indent=1) + "\n"


def config_from_json(text: str) -> Configuration:
    """Rebuild a configuration; points are re-rounded at the stored precision."""
    doc = json.loads(text)
    n = int(doc["n"])
    bits = int(doc["bits"])
    force = ForceModel.from_json(doc["force"])
    ctx = PrecisionContext(bits, float(doc["tol"]), int(doc.get("l_max", 1)), n)
    points = tuple(mpfr(p, bits) for p in doc["points"])
    if len(points) != n:
        raise ValueError(f"expected {n} points, found {len(points)}")
    with ctx.local():
        residual = _max_abs(_interior_residuals(list(points), force)) if n > 2 else mpfr(0)
    return Configuration(n, points, force, ctx, residual, 0, "file")
