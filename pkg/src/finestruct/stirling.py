"""Exact differences of powers and generalized Stirling numbers.

``∇^l i^n`` counts the ways to drop ``n`` labelled objects into ``l + i``
labelled cells so that each of ``l`` marked cells is hit;
``S(n, l, i) = ∇^l i^n / l!``.  Everything here is exact integer or rational
arithmetic, apart from the two asymptotic formulas, which are returned as
exact rationals of the formula itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

# brute-force enumeration is used below this many assignments
BRUTE_LIMIT = 20_000
MAX_OBJECTS = 10
MAX_CELLS = 12


def diff_power_exact(l: int, i: int, n: int) -> int:
    """``∇^l i^n`` from the alternating binomial sum."""
    _check_nonneg(l=l, i=i, n=n)
    return sum((-1) ** (l - k) * comb(l, k) * (i + k) ** n for k in range(l + 1))


@lru_cache(maxsize=None)
def _recurrence_row(i: int, n: int) -> tuple:
    # entry l holds ∇^l i^n
    if n == 0:
        return (1,)
    prev = _recurrence_row(i, n - 1)
    row = [i**n]
    for l in range(1, n + 1):
        here = prev[l] if l < len(prev) else 0
        below = prev[l - 1]
        row.append((l + i) * here + l * below)
    return tuple(row)


def diff_power_recurrence(l: int, i: int, n: int) -> int:
    """``∇^l i^n`` by dynamic programming over the marked-cell recurrence.

    ``∇^l i^(n+1) = (l + i) ∇^l i^n + l ∇^(l-1) i^n`` with ``∇^0 i^n = i^n``
    and ``∇^l i^0 = [l == 0]``.
    """
    _check_nonneg(l=l, i=i, n=n)
    if l > n:
        return 0
    return _recurrence_row(i, n)[l]


def stirling2(n: int, l: int) -> int:
    """Ordinary Stirling number of the second kind, ``∇^l 0^n / l!``."""
    return gen_stirling(n, l, 0)


def gen_stirling(n: int, l: int, i: int) -> int:
    """Generalized Stirling number ``S(n, l, i) = ∇^l i^n / l!``."""
    value, rem = divmod(diff_power_exact(l, i, n), factorial(l))
    if rem:
        raise ArithmeticError(f"l! does not divide ∇^{l} {i}^{n}; arithmetic is broken")
    return value


def placement_oracle(n: int, l: int, i: int) -> int:
    """Count maps from ``n`` objects to ``l + i`` cells that hit all ``l`` marked cells.

    Small instances are enumerated assignment by assignment.  Larger ones
    (up to 10 objects and 12 cells) walk the objects one at a time, tracking
    which marked cells are already occupied; still a direct count, with no
    use of difference identities.
    """
    _check_nonneg(l=l, i=i, n=n)
    if n > MAX_OBJECTS or l + i > MAX_CELLS:
        raise ValueError(
            f"placement oracle limited to n <= {MAX_OBJECTS}, l + i <= {MAX_CELLS}"
        )
    if (l + i) ** n <= BRUTE_LIMIT:
        return _placements_enumerated(n, l, i)
    return _placements_by_state(n, l, i)


def _placements_enumerated(n: int, l: int, i: int) -> int:
    marked = set(range(l))
    return sum(
        1 for cells in itertools.product(range(l + i), repeat=n) if marked <= set(cells)
    )


def _placements_by_state(n: int, l: int, i: int) -> int:
    full = (1 << l) - 1
    counts = {0: 1}
    for _ in range(n):
        step: dict[int, int] = {}
        for mask, ways in counts.items():
            if i:
                step[mask] = step.get(mask, 0) + ways * i
            for cell in range(l):
                nxt = mask | (1 << cell)
                step[nxt] = step.get(nxt, 0) + ways
        counts = step
    return counts.get(full, 0)


def riordan_approx(n: int, l: int) -> Fraction:
    """``l^n / l!``, the fixed-``l`` large-``n`` estimate of ``S(n, l)``.

    Poor outside ``n >> l``: at ``(5, 5)`` it gives 26.04 against the exact 1.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    return Fraction(l**n, factorial(l))


def asymp_bounded_k(n: int, l: int, i: int) -> Fraction:
    """``C(l + k, k) (i + l/2)^k`` with ``k = n - l``, the bounded-``k`` estimate."""
    if l < 1 or n < l:
        raise ValueError("need n >= l >= 1")
    k = n - l
    return comb(l + k, k) * (Fraction(i) + Fraction(l, 2)) ** k


@dataclass
class StirlingTable:
    """Exact ``∇^l i^n`` for a box of ``(l, i, n)``; immutable once built."""

    entries: dict = field(default_factory=dict)

    @classmethod
    def build(cls, n_max: int, l_max: int, i_max: int) -> "StirlingTable":
        entries = {
            (l, i, n): diff_power_recurrence(l, i, n)
            for l in range(l_max + 1)
            for i in range(i_max + 1)
            for n in range(n_max + 1)
        }
        return cls(entries)

    def value(self, l: int, i: int, n: int) -> int:
        return self.entries[(l, i, n)]

    def stirling(self, n: int, l: int, i: int) -> int:
        return self.entries[(l, i, n)] // factorial(l)

    def rows(self, kind: str = "diff"):
        """``(n, l, i, value)`` tuples sorted by ``n, l, i``."""
        for l, i, n in sorted(self.entries, key=lambda key: (key[2], key[0], key[1])):
            v = self.entries[(l, i, n)]
            yield n, l, i, (v if kind == "diff" else v // factorial(l))


def _check_nonneg(**kw):
    for name, v in kw.items():
        if v < 0:
            raise ValueError(f"{name} must be non-negative, got {v}")
