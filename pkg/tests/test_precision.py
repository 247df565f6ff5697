import math

import gmpy2
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finestruct.precision import (
    PrecisionContext,
    agreed_digits,
    decimal_text,
    default_tolerance,
    env_bits,
    make_context,
    required_bits,
)


def sizing_by_hand(n, l_max):
    raw = math.ceil((l_max + 2) * math.log2(n)) + 128
    return 64 * math.ceil(raw / 64)


def test_sizing_examples():
    # 10 * log2(1000) = 99.66 -> 100 + 128 = 228 -> 256
    assert make_context(1000, 8).mantissa_bits == 256
    # ceil(3 * 1) + 128 = 131 -> 192
    assert make_context(2, 1).mantissa_bits == 192
    assert make_context(1000, 8, requested_bits=512).mantissa_bits == 512


def test_small_request_does_not_undercut_rule():
    assert make_context(1000, 8, requested_bits=64).mantissa_bits == 256


@pytest.mark.parametrize("n,l", [(1, 3), (0, 1), (10, 0)])
def test_rejects_bad_sizes(n, l):
    with pytest.raises(ValueError):
        make_context(n, l)


def test_rejects_tiny_request():
    with pytest.raises(ValueError):
        make_context(100, 2, requested_bits=53)


@given(st.integers(2, 5000), st.integers(1, 40))
def test_context_invariants(n, l):
    ctx = make_context(n, l)
    assert ctx.mantissa_bits == sizing_by_hand(n, l)
    assert ctx.mantissa_bits % 64 == 0 and ctx.mantissa_bits >= 64
    assert 0 < ctx.solver_tol <= 2.0 ** -(ctx.mantissa_bits - 48)


@given(st.integers(2, 5000), st.integers(1, 30), st.integers(0, 200), st.integers(0, 5))
def test_sizing_is_monotone(n, l, dn, dl):
    assert required_bits(n + dn, l + dl) >= required_bits(n, l)


def test_context_is_frozen_and_validated():
    ctx = make_context(100, 3)
    with pytest.raises(AttributeError):
        ctx.mantissa_bits = 10
    with pytest.raises(ValueError):
        PrecisionContext(64, default_tolerance(64), 3, 100)
    with pytest.raises(ValueError):
        PrecisionContext(256, 1e-3, 3, 100)


def test_unsized_context_skips_rule():
    ctx = PrecisionContext.unsized(53, 1000, 7)
    assert ctx.mantissa_bits == 53 and not ctx.sized
    assert ctx.doubled().mantissa_bits == 106


def test_doubled_keeps_problem():
    ctx = make_context(500, 4)
    twin = ctx.doubled()
    assert twin.mantissa_bits == 2 * ctx.mantissa_bits
    assert (twin.n_points, twin.l_max) == (500, 4)


def test_agreed_digits_examples():
    assert agreed_digits(1.23456789, 1.23456700) == 7
    assert agreed_digits(0.5, -0.5) == 0
    assert agreed_digits(0.0, 1e-30) == 0


def test_agreed_digits_identical_is_capacity():
    x = gmpy2.mpfr("0.1", 256)
    assert agreed_digits(x, x) == int(256 * math.log10(2))
    assert agreed_digits(0.25, 0.25) == 15


def test_agreed_digits_across_carry():
    # digit strings differ from the first digit, values agree to 8
    assert agreed_digits(0.999999997, 1.0) == 8


def test_agreed_digits_of_twin_computation():
    with gmpy2.context(gmpy2.get_context(), precision=100):
        lo = gmpy2.mpfr(1) / 3
    with gmpy2.context(gmpy2.get_context(), precision=200):
        hi = gmpy2.mpfr(1) / 3
    assert 29 <= agreed_digits(lo, hi) <= 30


def test_agreed_digits_rejects_nonfinite():
    with pytest.raises(ValueError):
        agreed_digits(float("inf"), 1.0)


def test_env_bits(monkeypatch):
    monkeypatch.delenv("FINESTRUCT_BITS", raising=False)
    assert env_bits() is None
    monkeypatch.setenv("FINESTRUCT_BITS", "384")
    assert env_bits() == 384
    monkeypatch.setenv("FINESTRUCT_BITS", "lots")
    with pytest.raises(ValueError):
        env_bits()


def test_decimal_text_round_trips():
    x = gmpy2.mpfr(2, 256) ** gmpy2.mpfr(0.5, 256)
    text = decimal_text(x, 85)
    assert gmpy2.mpfr(text, 256) == x
    assert decimal_text(-0.5, 3) == "-5.00e-1"
    assert decimal_text(0, 10) == "0"
