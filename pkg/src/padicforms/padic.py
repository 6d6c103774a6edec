"""Finite-precision arithmetic in Q_p for odd primes p.

A nonzero element is stored as ``p**valuation * unit`` where ``unit`` is an
integer in ``[0, p**precision)`` prime to p.  The precision is *relative*:
the element is known modulo ``p**(valuation + precision)``.  Zero is a
distinguished exact value with infinite valuation.

Everything is exact integer arithmetic; no floating point is involved.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

__all__ = [
    "PAdicError",
    "PrecisionExhausted",
    "NotASquare",
    "NotASimpleRoot",
    "PrimeContext",
    "PAdicNumber",
    "from_rational",
    "is_square",
    "sqrt",
    "hensel_lift",
    "legendre",
    "is_prime",
    "valuation_of",
    "parse",
]

DEFAULT_PRECISION = 32


class PAdicError(ArithmeticError):
    pass


class PrecisionExhausted(PAdicError):
    """Cancellation consumed every known digit; the valuation is unknown."""


class NotASquare(PAdicError):
    pass


class NotASimpleRoot(PAdicError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def valuation_of(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _least_nonresidue(p: int) -> int:
    e = (p - 1) // 2
    for a in range(2, p):
        if pow(a, e, p) == p - 1:
            return a
    raise ValueError(f"no nonresidue mod {p}")


@dataclass(frozen=True)
class PrimeContext:
    """An odd prime together with its canonical nonresidue ``lam``."""

    p: int
    default_precision: int = DEFAULT_PRECISION
    lam: int = field(init=False)

    def __post_init__(self) -> None:
        if self.p == 2:
            raise ValueError("p = 2 is not supported (odd residue characteristic only)")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.default_precision < 4:
            raise ValueError("default_precision must be at least 4")
        object.__setattr__(self, "lam", _least_nonresidue(self.p))

    @property
    def residue(self) -> int:
        """p mod 4, either 1 or 3."""
        return self.p % 4

    def __call__(self, value, precision: int | None = None) -> "PAdicNumber":
        return PAdicNumber.coerce(value, self, precision)


@dataclass(frozen=True)
class PAdicNumber:
    ctx: PrimeContext
    valuation: int | float
    unit: int
    precision: int

    # construction -----------------------------------------------------

    @classmethod
    def zero(cls, ctx: PrimeContext, precision: int | None = None) -> "PAdicNumber":
        return cls(ctx, math.inf, 0, precision or ctx.default_precision)

    @classmethod
    def from_parts(cls, ctx: PrimeContext, valuation: int, unit: int, precision: int) -> "PAdicNumber":
        """Build ``p**valuation * unit``; ``unit`` must be prime to p."""
        if precision < 1:
            raise PrecisionExhausted("no known digits")
        mod = ctx.p**precision
        unit %= mod
        if unit % ctx.p == 0:
            raise ValueError("unit part must be prime to p")
        return cls(ctx, valuation, unit, precision)

    @classmethod
    def coerce(cls, value, ctx: PrimeContext, precision: int | None = None) -> "PAdicNumber":
        if isinstance(value, PAdicNumber):
            return value
        if isinstance(value, (int, Fraction)):
            value = Fraction(value)
            return from_rational(value.numerator, value.denominator, ctx, precision)
        raise TypeError(f"cannot convert {type(value).__name__} to a p-adic number")

    # basic properties -------------------------------------------------

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def is_zero(self) -> bool:
        return self.valuation == math.inf

    @property
    def absolute_precision(self) -> int | float:
        if self.is_zero:
            return math.inf
        return self.valuation + self.precision

    @property
    def digits(self) -> list[int]:
        """Base-p digits d_0 .. d_{N-1} of the unit part, little-endian."""
        out = []
        u = self.unit
        for _ in range(self.precision):
            u, d = divmod(u, self.p)
            out.append(d)
        return out

    def to_fraction(self) -> Fraction:
        """The rational p**v * unit (the stored truncation)."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation

    def with_precision(self, precision: int) -> "PAdicNumber":
        """Truncate to fewer digits (never invents digits)."""
        if self.is_zero or precision >= self.precision:
            return self
        return PAdicNumber.from_parts(self.ctx, self.valuation, self.unit, precision)

    def unit_part(self) -> "PAdicNumber":
        if self.is_zero:
            raise ZeroDivisionError("zero has no unit part")
        return PAdicNumber(self.ctx, 0, self.unit, self.precision)

    # arithmetic -------------------------------------------------------

    def _other(self, other) -> "PAdicNumber":
        if isinstance(other, PAdicNumber):
            if other.ctx.p != self.ctx.p:
                raise ValueError("operands live over different primes")
            return other
        # an exact operand must be known at least as far as we are
        prec = self.precision
        if not self.is_zero and Fraction(other) != 0:
            prec = max(prec, self.absolute_precision - _rational_valuation(other, self.p))
        return PAdicNumber.coerce(other, self.ctx, prec)

    def __neg__(self) -> "PAdicNumber":
        if self.is_zero:
            return self
        return PAdicNumber(self.ctx, self.valuation, (-self.unit) % self.p**self.precision, self.precision)

    def __add__(self, other) -> "PAdicNumber":
        y = self._other(other)
        x = self
        if x.is_zero:
            return y
        if y.is_zero:
            return x
        p = x.p
        v0 = min(x.valuation, y.valuation)
        absprec = min(x.absolute_precision, y.absolute_precision)
        width = absprec - v0
        mod = p**width
        s = (x.unit * p ** (x.valuation - v0) + y.unit * p ** (y.valuation - v0)) % mod
        if s == 0:
            if (
                x.valuation == y.valuation
                and x.precision == y.precision
                and (x.unit + y.unit) % p**x.precision == 0
            ):
                return PAdicNumber.zero(x.ctx, x.precision)
            raise PrecisionExhausted(
                f"sum vanishes modulo p^{absprec}; valuation cannot be certified"
            )
        w = 0
        while s % p == 0:
            s //= p
            w += 1
        return PAdicNumber(x.ctx, v0 + w, s, width - w)

    __radd__ = __add__

    def __sub__(self, other) -> "PAdicNumber":
        return self + (-self._other(other))

    def __rsub__(self, other) -> "PAdicNumber":
        return self._other(other) + (-self)

    def __mul__(self, other) -> "PAdicNumber":
        y = self._other(other)
        if self.is_zero or y.is_zero:
            return PAdicNumber.zero(self.ctx, min(self.precision, y.precision))
        prec = min(self.precision, y.precision)
        unit = (self.unit * y.unit) % self.p**prec
        return PAdicNumber(self.ctx, self.valuation + y.valuation, unit, prec)

    __rmul__ = __mul__

    def inverse(self) -> "PAdicNumber":
        if self.is_zero:
            raise ZeroDivisionError("p-adic zero has no inverse")
        unit = pow(self.unit, -1, self.p**self.precision)
        return PAdicNumber(self.ctx, -self.valuation, unit, self.precision)

    def __truediv__(self, other) -> "PAdicNumber":
        return self * self._other(other).inverse()

    def __rtruediv__(self, other) -> "PAdicNumber":
        return self._other(other) * self.inverse()

    def __pow__(self, e: int) -> "PAdicNumber":
        if e < 0:
            return self.inverse() ** (-e)
        result = PAdicNumber.from_parts(self.ctx, 0, 1, self.precision)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def congruent(self, other, modulus_exponent: int) -> bool:
        """True if self and other agree modulo p**modulus_exponent.

        Raises PrecisionExhausted if either operand is not known that far.
        """
        y = self._other(other)
        if min(self.absolute_precision, y.absolute_precision) < modulus_exponent:
            raise PrecisionExhausted("operands not known to the requested modulus")
        diff = self.to_fraction() - y.to_fraction()
        return diff == 0 or _rational_valuation(diff, self.p) >= modulus_exponent

    # rendering --------------------------------------------------------

    def __str__(self) -> str:
        return self.render()

    def render(self) -> str:
        """``p^v * (d0 + d1*p + ...) [mod p^(v+N)]`` with nonzero terms only."""
        p = self.p
        if self.is_zero:
            return "0"
        terms = []
        for i, d in enumerate(self.digits):
            if d == 0:
                continue
            if i == 0:
                terms.append(str(d))
            elif i == 1:
                terms.append(f"{d}*{p}")
            else:
                terms.append(f"{d}*{p}^{i}")
        return f"{p}^{self.valuation} * ({' + '.join(terms)}) [mod {p}^{self.absolute_precision}]"

    def compact(self) -> str:
        """``...d3 d2 d1 d0 (base p) * p^v``; round-trips through :func:`parse`."""
        if self.is_zero:
            return "0"
        body = " ".join(str(d) for d in reversed(self.digits))
        return f"...{body} (base {self.p}) * {self.p}^{self.valuation}"


def _rational_valuation(value, p: int) -> int:
    value = Fraction(value)
    if value == 0:
        return 0
    return valuation_of(value.numerator, p) - valuation_of(value.denominator, p)


def from_rational(num: int, den: int, ctx: PrimeContext, precision: int | None = None) -> PAdicNumber:
    """p-adic expansion of num/den with exact valuation and ``precision`` unit digits."""
    if den == 0:
        raise ZeroDivisionError("denominator must be nonzero")
    precision = precision or ctx.default_precision
    if num == 0:
        return PAdicNumber.zero(ctx, precision)
    p = ctx.p
    a = valuation_of(num, p)
    b = valuation_of(den, p)
    mod = p**precision
    unit = (num // p**a) * pow(den // p**b, -1, mod) % mod
    return PAdicNumber(ctx, a - b, unit, precision)


def legendre(u: int, ctx: PrimeContext | int) -> int:
    """Legendre symbol (u/p) by Euler's criterion."""
    p = ctx if isinstance(ctx, int) else ctx.p
    r = pow(u % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def is_square(x: PAdicNumber) -> bool:
    if x.is_zero:
        raise ValueError("is_square is undefined for 0")
    return x.valuation % 2 == 0 and legendre(x.unit % x.p, x.ctx) == 1


def _poly_eval(coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_deriv(coeffs: Sequence[int]) -> list[int]:
    return [i * c for i, c in enumerate(coeffs)][1:]


def hensel_lift(f: Sequence[int], x0: int, ctx: PrimeContext, precision: int | None = None) -> PAdicNumber:
    """Lift a simple root of ``f`` modulo p to a root in Z_p.

    ``f`` is a list of integer coefficients, constant term first.  The root
    is refined by Newton iteration with doubling precision and returned with
    absolute precision ``precision``.
    """
    p = ctx.p
    precision = precision or ctx.default_precision
    df = _poly_deriv(f)
    if _poly_eval(f, x0) % p != 0:
        raise NotASimpleRoot(f"f({x0}) is not 0 mod {p}")
    if _poly_eval(df, x0) % p == 0:
        raise NotASimpleRoot(f"f'({x0}) vanishes mod {p}")
    r = x0 % p
    k = 1
    while k < precision:
        k = min(2 * k, precision)
        mod = p**k
        r = (r - _poly_eval(f, r) * pow(_poly_eval(df, r), -1, mod)) % mod
    if r == 0:
        return PAdicNumber.zero(ctx, precision)
    v = valuation_of(r, p)
    return PAdicNumber(ctx, v, r // p**v, precision - v)


def sqrt(x: PAdicNumber) -> PAdicNumber:
    """Square root whose leading digit is at most (p-1)/2."""
    if x.is_zero:
        return x
    if not is_square(x):
        raise NotASquare(f"{x.compact()} is not a square in Q_{x.p}")
    p = x.p
    u0 = x.unit % p
    r0 = next(r for r in range(1, (p + 1) // 2) if r * r % p == u0)
    root = hensel_lift([-x.unit, 0, 1], r0, x.ctx, x.precision)
    return PAdicNumber(x.ctx, x.valuation // 2, root.unit, x.precision)


_COMPACT = re.compile(r"^\.\.\.([\d ]+)\(base (\d+)\) \* (\d+)\^(-?\d+)$")
_POWER = re.compile(r"^(p|\d+)\^(-?\d+)(?:\*(.+))?$")


def parse(text: str, ctx: PrimeContext, precision: int | None = None) -> PAdicNumber:
    """Parse an integer, ``a/b``, ``p^k*u`` or a compact digit string."""
    s = text.strip()
    m = _COMPACT.match(s)
    if m:
        digits, base, base2, v = m.groups()
        if int(base) != ctx.p or int(base2) != ctx.p:
            raise ValueError(f"digit string is base {base}, expected {ctx.p}")
        ds = [int(d) for d in digits.split()]
        if any(d >= ctx.p for d in ds):
            raise ValueError("digit out of range")
        unit = 0
        for d in ds:
            unit = unit * ctx.p + d
        return PAdicNumber.from_parts(ctx, int(v), unit, len(ds))
    s = s.replace(" ", "")
    m = _POWER.match(s)
    if m:
        base, k, rest = m.groups()
        if base != "p" and int(base) != ctx.p:
            raise ValueError(f"power base {base} is not p={ctx.p}")
        scale = Fraction(ctx.p) ** int(k)
        value = scale * (Fraction(rest) if rest else 1)
    else:
        try:
            value = Fraction(s)
        except ValueError:
            raise ValueError(f"cannot parse p-adic number from {text!r}") from None
    return from_rational(value.numerator, value.denominator, ctx, precision)
