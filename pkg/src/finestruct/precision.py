"""Working-precision policy and two-precision digit certification.

Order-``l`` differences of a near-uniform point set are many orders of
magnitude smaller than the points themselves, so each difference table is
computed in MPFR arithmetic sized to the order being inspected.  Digits are
certified by recomputing at twice the precision and counting how many leading
decimal digits survive.  This is a consistency check, not interval
arithmetic.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import gmpy2

GUARD_BITS = 128
LIMB_BITS = 64
MIN_BITS = 64
# bits reserved between working precision and solver tolerance
TOL_SLACK_BITS = 48
ENV_BITS = "FINESTRUCT_BITS"


def required_bits(n_points: int, l_max: int) -> int:
    """Mantissa bits needed to resolve order-``l_max`` differences at ``n_points``.

    ``(l_max + 2) * log2(N) + 128`` rounded up to a multiple of 64.
    """
    raw = math.ceil((l_max + 2) * math.log2(n_points)) + GUARD_BITS
    return _round_up(max(raw, MIN_BITS))


def _round_up(bits: int) -> int:
    return -(-bits // LIMB_BITS) * LIMB_BITS


def default_tolerance(bits: int) -> float:
    return 2.0 ** (-(bits - TOL_SLACK_BITS))


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable precision policy for one problem size.

    Parameters
    ----------
    mantissa_bits : int
        MPFR significand bits used for every real in a pipeline.
    solver_tol : float
        Absolute bound on the interior equilibrium residuals.
    l_max : int
        Highest difference order this context is meant to certify.
    n_points : int
        Number of points the context was sized for.
    sized : bool
        False only for deliberately under-sized demonstration contexts
        built with :meth:`unsized`; analysis refuses those by default.
    """

    mantissa_bits: int
    solver_tol: float
    l_max: int
    n_points: int
    sized: bool = True

    def __post_init__(self):
        if self.n_points < 2 or self.l_max < 0:
            raise ValueError("invalid problem size")
        if not self.solver_tol > 0:
            raise ValueError("solver_tol must be positive")
        if not self.sized:
            return
        if self.mantissa_bits < required_bits(self.n_points, self.l_max):
            raise ValueError(
                f"{self.mantissa_bits} bits is below the sizing rule "
                f"({required_bits(self.n_points, self.l_max)}) for "
                f"N={self.n_points}, l_max={self.l_max}"
            )
        if self.solver_tol > default_tolerance(self.mantissa_bits):
            raise ValueError("solver_tol is looser than 2^-(bits-48)")

    @classmethod
    def unsized(cls, bits: int, n_points: int, l_max: int = 1) -> "PrecisionContext":
        """Context at an arbitrary precision, exempt from the sizing rule.

        Only for demonstrating what happens without enough bits (e.g. IEEE
        double at 53 bits).
        """
        if bits < 2:
            raise ValueError("bits must be >= 2")
        return cls(bits, default_tolerance(bits), l_max, n_points, sized=False)

    @property
    def digits(self) -> int:
        """Decimal digit capacity of the significand."""
        return digit_capacity(self.mantissa_bits)

    def doubled(self) -> "PrecisionContext":
        """Same problem at twice the mantissa bits (the certification twin)."""
        bits = 2 * self.mantissa_bits
        return PrecisionContext(
            bits, default_tolerance(bits), self.l_max, self.n_points, self.sized
        )

    def local(self):
        """Context manager making this precision current for MPFR arithmetic."""
        return gmpy2.context(gmpy2.get_context(), precision=self.mantissa_bits)

    def mpfr(self, value) -> gmpy2.mpfr:
        """Round ``value`` (int, str, Fraction, mpfr, ...) to this precision."""
        if hasattr(value, "numerator") and not isinstance(value, int):
            value = gmpy2.mpq(value.numerator, value.denominator)
        return gmpy2.mpfr(value, self.mantissa_bits)


def make_context(
    n_points: int, l_max: int, requested_bits: int | None = None
) -> PrecisionContext:
    """Size a :class:`PrecisionContext` for ``n_points`` and order ``l_max``.

    An explicit ``requested_bits`` wins when it exceeds the sizing rule.

    >>> make_context(1000, 8).mantissa_bits
    256
    >>> make_context(1000, 8, requested_bits=512).mantissa_bits
    512
    """
    if n_points < 2 or l_max < 1:
        raise ValueError(f"invalid problem size: n_points={n_points}, l_max={l_max}")
    if requested_bits is not None and requested_bits < MIN_BITS:
        raise ValueError(f"requested_bits must be >= {MIN_BITS}")
    bits = max(requested_bits or 0, required_bits(n_points, l_max))
    bits = _round_up(bits)
    return PrecisionContext(bits, default_tolerance(bits), l_max, n_points)


def env_bits() -> int | None:
    """Requested bits from ``FINESTRUCT_BITS``, or None when unset."""
    raw = os.environ.get(ENV_BITS)
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{ENV_BITS} must be an integer, got {raw!r}") from None


def digit_capacity(bits: int) -> int:
    return int(bits * math.log10(2))


def _precision_of(value) -> int:
    return getattr(value, "precision", 53)


def agreed_digits(value_lo, value_hi) -> int:
    """Leading significant decimal digits on which two values agree.

    ``value_lo`` is a result at some precision ``p`` and ``value_hi`` the same
    quantity recomputed at ``2p``.  The count is capped at the digit capacity
    of ``p``.  Values of opposite sign, or a zero against a non-zero, agree
    on no digits.

    >>> agreed_digits(1.23456789, 1.23456700)
    7
    >>> agreed_digits(0.5, -0.5)
    0
    """
    cap = digit_capacity(_precision_of(value_lo))
    bits = max(_precision_of(value_lo), _precision_of(value_hi)) + 16
    lo = gmpy2.mpfr(value_lo, bits)
    hi = gmpy2.mpfr(value_hi, bits)
    if not (gmpy2.is_finite(lo) and gmpy2.is_finite(hi)):
        raise ValueError("agreed_digits needs finite values")
    if lo == hi:
        return cap
    if lo == 0 or hi == 0 or (lo < 0) != (hi < 0):
        return 0

    # digit-string prefix, then the relative-error count for carries like 0.999|1.000
    m_lo, e_lo, _ = lo.digits(10, cap + 1)
    m_hi, e_hi, _ = hi.digits(10, cap + 1)
    prefix = 0
    if e_lo == e_hi:
        for a, b in zip(m_lo.lstrip("-"), m_hi.lstrip("-")):
            if a != b:
                break
            prefix += 1
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        rel = abs(lo - hi) / abs(hi)
        by_error = int(gmpy2.floor(-gmpy2.log10(rel)))
    return max(0, min(cap, max(prefix, by_error)))


def decimal_text(value, sig: int) -> str:
    """``value`` as scientific decimal text with ``sig`` significant digits."""
    bits = max(_precision_of(value), math.ceil(sig * 3.33) + 8)
    v = gmpy2.mpfr(value, bits) if not isinstance(value, gmpy2.mpfr) else value
    if v == 0:
        return "0"
    if not gmpy2.is_finite(v):
        raise ValueError("cannot format a non-finite value")
    mant, exp, _ = v.digits(10, sig)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1:+d}" if sig > 1 else f"{sign}{mant}e{exp - 1:+d}"
