import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from padicforms.padic import (
    NotASimpleRoot,
    NotASquare,
    PAdicNumber,
    PrecisionExhausted,
    PrimeContext,
    from_rational,
    hensel_lift,
    is_prime,
    is_square,
    legendre,
    parse,
    sqrt,
)

PRIMES = st.sampled_from([3, 5, 7, 11, 13])
NONZERO = st.fractions(max_denominator=10_000).filter(lambda x: x != 0).map(lambda x: x * 1000)


def val(x: Fraction, p: int) -> int:
    n, d, v = x.numerator, x.denominator, 0
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def agrees(x: PAdicNumber, exact: Fraction) -> bool:
    """x is a truncation of the exact rational ``exact``."""
    if exact == 0:
        return x.is_zero
    d = x.to_fraction() - exact
    return d == 0 or val(d, x.p) >= x.absolute_precision


def test_context_rejects_bad_primes():
    with pytest.raises(ValueError):
        PrimeContext(2)
    with pytest.raises(ValueError):
        PrimeContext(15)
    with pytest.raises(ValueError):
        PrimeContext(7, default_precision=2)


@pytest.mark.parametrize("p,lam", [(3, 2), (5, 2), (7, 3), (11, 2), (13, 2), (17, 3), (23, 5)])
def test_least_nonresidue(p, lam):
    assert PrimeContext(p).lam == lam


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_one_third_at_five():
    ctx = PrimeContext(5)
    x = from_rational(1, 3, ctx, 4)
    # 2 + 3*5 + 1*25 + 3*125 = 417 and 3 * 417 = 1 + 2 * 5^4
    assert x.digits == [2, 3, 1, 3]
    assert (x * 3).congruent(1, 4)


def test_valuation_of_rationals():
    ctx = PrimeContext(7)
    assert from_rational(98, 3, ctx).valuation == 2
    assert from_rational(3, 49, ctx).valuation == -2
    assert from_rational(0, 1, ctx).valuation == math.inf


@given(PRIMES, NONZERO, NONZERO)
def test_ring_operations_track_rationals(p, a, b):
    ctx = PrimeContext(p, 24)
    x, y = ctx(a), ctx(b)
    assert agrees(x * y, a * b)
    assert agrees(x / y, a / b)
    assume(a + b != 0)
    try:
        s = x + y
    except PrecisionExhausted:
        # only possible when the sum cancels every digit both operands know
        assert val(a + b, p) >= min(x.absolute_precision, y.absolute_precision)
        return
    assert agrees(s, a + b)


@given(PRIMES, NONZERO)
def test_exact_negation_gives_zero(p, a):
    x = PrimeContext(p)(a)
    assert (x + (-x)).is_zero
    assert (x - x).is_zero


def test_total_cancellation_raises():
    ctx = PrimeContext(5)
    x = from_rational(1, 1, ctx, 3)
    y = from_rational(-1 + 5**3 * 2, 1, ctx, 6)  # agrees with -1 on every digit x knows
    with pytest.raises(PrecisionExhausted):
        x + y


def test_congruent_needs_known_digits():
    x = from_rational(1, 1, PrimeContext(5), 3)
    assert x.congruent(126, 3)
    with pytest.raises(PrecisionExhausted):
        x.congruent(1, 5)


@given(PRIMES, st.integers(-10_000, 10_000).filter(lambda n: n != 0))
def test_legendre_matches_enumeration(p, u):
    squares = {i * i % p for i in range(1, p)}
    expected = 0 if u % p == 0 else (1 if u % p in squares else -1)
    assert legendre(u, p) == expected


@given(PRIMES, NONZERO)
def test_sqrt_of_square(p, a):
    ctx = PrimeContext(p, 20)
    x = ctx(a) * ctx(a)
    r = sqrt(x)
    assert (r * r).congruent(x, x.absolute_precision)
    assert r.digits[0] <= (p - 1) // 2


def test_sqrt_of_nonsquare_raises():
    ctx = PrimeContext(7)
    with pytest.raises(NotASquare):
        sqrt(ctx(3))
    with pytest.raises(NotASquare):
        sqrt(ctx(7))
    assert not is_square(ctx(3)) and is_square(ctx(2)) and is_square(ctx(98))


def test_hensel_lift_sum_of_squares_identity():
    # at p = 7: 2^2 + 3^2 = 13 = -1 mod 7; lift c with c^2 = 7 - 13
    ctx = PrimeContext(7)
    a, b = 2, 3
    assert (a * a + b * b) % 7 == 6
    c0 = next(x for x in range(7) if (x * x + a * a + b * b - 7) % 7 == 0)
    c = hensel_lift([a * a + b * b - 7, 0, 1], c0, ctx, 32)
    assert (c * c + a * a + b * b).congruent(7, 32)


def test_hensel_lift_requires_simple_root():
    ctx = PrimeContext(5)
    with pytest.raises(NotASimpleRoot):
        hensel_lift([-2, 0, 1], 1, ctx)  # 1 is not a root of x^2 - 2
    with pytest.raises(NotASimpleRoot):
        hensel_lift([0, 0, 1], 0, ctx)  # double root


def test_hensel_lift_cube_root():
    ctx = PrimeContext(7)
    r = hensel_lift([-6, 0, 0, 1], 3, ctx, 16)  # 3^3 = 27 = 6 mod 7
    assert (r**3).congruent(6, 16)


@given(PRIMES, NONZERO, st.integers(4, 30))
def test_compact_round_trip(p, a, n):
    ctx = PrimeContext(p)
    x = from_rational(a.numerator, a.denominator, ctx, n)
    assert parse(x.compact(), ctx) == x


def test_parse_forms():
    ctx = PrimeContext(5, 8)
    assert parse("p^2*3", ctx).to_fraction() == 75
    assert parse("5^-1", ctx).valuation == -1
    assert parse("2/3", ctx) == from_rational(2, 3, ctx)
    assert parse("0", ctx).is_zero
    with pytest.raises(ValueError):
        parse("7^2", ctx)
    with pytest.raises(ValueError):
        parse("...1 2 (base 7) * 7^0", ctx)


def test_render_lists_nonzero_terms():
    x = from_rational(26, 1, PrimeContext(5), 3)
    assert x.render() == "5^0 * (1 + 1*5^2) [mod 5^3]"
