"""Forward-difference calculus on finite sequences.

Values may be ints, Fractions or MPFR reals; every operation uses only ring
arithmetic, so integer and rational inputs are handled exactly and MPFR
inputs at whatever precision is current.  Shift operators never materialize:
a shifted sequence is the same values with a different ``offset``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, prod
from typing import Iterable


@dataclass(frozen=True)
class Sequence:
    """Finite run of values ``s[offset], s[offset + 1], ...``."""

    values: tuple
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("Sequence needs at least one value")

    @classmethod
    def of(cls, values: Iterable, offset: int = 0) -> "Sequence":
        return cls(tuple(values), offset)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def at(self, index: int):
        """Value at ambient index ``index`` (offset-aware)."""
        k = index - self.offset
        if not 0 <= k < len(self.values):
            raise IndexError(f"index {index} outside [{self.offset}, {self.stop})")
        return self.values[k]

    @property
    def stop(self) -> int:
        return self.offset + len(self.values)

    def shift(self, k: int = 1) -> "Sequence":
        """``S^k``: same values viewed ``k`` steps to the left."""
        return Sequence(self.values, self.offset - k)

    def __mul__(self, other: "Sequence") -> "Sequence":
        n = min(len(self), len(other))
        return Sequence(tuple(a * b for a, b in zip(self.values[:n], other.values[:n])), self.offset)


def _as_sequence(s) -> Sequence:
    return s if isinstance(s, Sequence) else Sequence.of(s)


def forward_diff(s) -> Sequence:
    """``(s[i+1] - s[i])_i``, one entry shorter, same offset."""
    s = _as_sequence(s)
    if len(s) < 2:
        raise ValueError("forward difference of a length-1 sequence is undefined")
    v = s.values
    return Sequence(tuple(v[i + 1] - v[i] for i in range(len(v) - 1)), s.offset)


def diff_order(s, l: int) -> Sequence:
    """``l``-fold forward difference by repeated pairwise subtraction."""
    s = _as_sequence(s)
    if l < 0 or l > len(s) - 1:
        raise ValueError(f"order {l} needs at least {l + 1} values, have {len(s)}")
    for _ in range(l):
        s = forward_diff(s)
    return s


def diff_binomial(s, l: int, i: int):
    """``(S - 1)^l s`` at position ``i`` via the alternating binomial sum.

    ``i`` is a position within ``s.values``.  Cross-check for
    :func:`diff_order`; the iterated form has better cancellation behaviour.
    """
    s = _as_sequence(s)
    if l < 0 or i < 0 or i + l >= len(s):
        raise IndexError(f"difference of order {l} at {i} is out of range")
    total = 0
    for k in range(l + 1):
        term = comb(l, k) * s.values[i + k]
        total = total + term if (l - k) % 2 == 0 else total - term
    return total


def leibniz_pair(f, g, l: int, i: int):
    """Right side of the two-factor discrete Leibniz rule at position ``i``.

    ``sum_k C(l,k) (∇^k f)(i) (∇^(l-k) g)(i + k)``; equals ``∇^l(f g)`` at ``i``.
    """
    f, g = _as_sequence(f), _as_sequence(g)
    if l < 0 or i < 0 or i + l >= min(len(f), len(g)):
        raise ValueError(f"sequences too short for order {l} at {i}")
    total = 0
    df = f
    for k in range(l + 1):
        if k:
            df = forward_diff(df)
        dg = diff_order(Sequence(g.values[k:]), l - k)
        total = total + comb(l, k) * df.values[i] * dg.values[i]
    return total


def compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def leibniz_bound(factors: list, l: int):
    """Upper bound on ``|∇^l(f_1 ... f_n)|`` from shifted-difference maxima.

    Each factor contributes ``γ_k(q) = max_i |∇^q f_k(i)|`` over the index
    window common to all factors; the bound sums
    ``l! / prod(l_k!) * prod(γ_k(l_k))`` over every split ``l_1 + ... + l_n = l``.
    """
    if not factors:
        raise ValueError("need at least one factor")
    factors = [_as_sequence(f) for f in factors]
    width = min(len(f) for f in factors)
    if l < 0 or l >= width:
        raise ValueError(f"factors too short for order {l}")
    gammas = []
    for f in factors:
        row = Sequence(f.values[:width])
        gammas.append([max(abs(v) for v in diff_order(row, q)) for q in range(l + 1)])
    bound = 0
    for split in compositions(l, len(factors)):
        weight = factorial(l) // prod(factorial(q) for q in split)
        bound = bound + weight * prod((gammas[k][q] for k, q in enumerate(split)), start=1)
    return bound


@dataclass(frozen=True)
class MultiIndex:
    """Admissible array ``q = (q_0, ..., q_d)``.

    ``q_k`` counts product factors differentiated exactly ``k`` times; the
    ``m`` factors absorb ``d`` differentiations in total.
    """

    q: tuple
    m: int
    d: int

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(self.q))
        if any(v < 0 for v in self.q):
            raise ValueError("negative multiplicity")
        if sum(self.q) != self.m or sum(k * v for k, v in enumerate(self.q)) != self.d:
            raise ValueError(f"{self.q} is not admissible for m={self.m}, d={self.d}")


def admissible_arrays(m: int, d: int) -> list[MultiIndex]:
    """Every admissible array for ``m`` factors and ``d`` differentiations.

    Sorted lexicographically in ``(q_0, q_1, ...)``.
    """
    if m < 1 or d < 0:
        raise ValueError("need m >= 1 and d >= 0")

    def tail(k: int, budget: int, slots: int):
        # choose q_k..q_d given remaining differentiations and factors
        if k > d:
            if budget == 0:
                yield ()
            return
        for qk in range(min(budget // k, slots) + 1):
            for rest in tail(k + 1, budget - k * qk, slots - qk):
                yield (qk,) + rest

    arrays = [(m - sum(t),) + t for t in tail(1, d, m)] if d else [(m,)]
    return [MultiIndex(q, m, d) for q in sorted(arrays)]


def multinomial_constant(index: MultiIndex) -> int:
    """Number of ways the ``d`` differentiations can realize ``index``.

    ``m! / prod(q_k!) * d! / prod((k!)^q_k)``.
    """
    q = index.q
    ways_factors = factorial(index.m) // prod(factorial(v) for v in q)
    ways_steps = factorial(index.d) // prod(factorial(k) ** v for k, v in enumerate(q))
    return ways_factors * ways_steps


def product_difference_bruteforce(factors: list, l: int, i: int):
    """``∇^l`` of the pointwise product at position ``i``, computed directly."""
    factors = [_as_sequence(f) for f in factors]
    width = min(len(f) for f in factors)
    rows = zip(*(f.values[:width] for f in factors))
    product = Sequence(tuple(prod(r, start=1) for r in rows))
    return diff_order(product, l).values[i]


__all__ = [
    "Sequence",
    "MultiIndex",
    "forward_diff",
    "diff_order",
    "diff_binomial",
    "leibniz_pair",
    "leibniz_bound",
    "admissible_arrays",
    "multinomial_constant",
    "compositions",
    "product_difference_bruteforce",
]
