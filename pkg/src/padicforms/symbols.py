"""Square classes of Q_p^x and the Hilbert symbol over them."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .padic import PAdicNumber, PrimeContext, legendre, valuation_of

__all__ = [
    "ZeroHasNoClass",
    "SquareClass",
    "HilbertTable",
    "TABLE_P1",
    "TABLE_P3",
    "table_for",
    "classify",
    "hilbert",
    "hilbert_general",
    "representative",
    "minus_one_class",
]


class ZeroHasNoClass(ValueError):
    pass


class SquareClass(enum.Enum):
    """The four cosets {1, l, p, lp}; ``l`` is the canonical nonresidue."""

    ONE = "1"
    LAMBDA = "l"
    P = "p"
    LAMBDA_P = "lp"

    @property
    def odd(self) -> bool:
        """Valuation parity of the class."""
        return self in (SquareClass.P, SquareClass.LAMBDA_P)

    @property
    def nonresidue(self) -> bool:
        return self in (SquareClass.LAMBDA, SquareClass.LAMBDA_P)

    @classmethod
    def from_parts(cls, odd: bool, nonresidue: bool) -> "SquareClass":
        return _BY_PARTS[(odd, nonresidue)]

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass.from_parts(self.odd != other.odd, self.nonresidue != other.nonresidue)

    def __str__(self) -> str:
        return self.value


_BY_PARTS = {
    (False, False): SquareClass.ONE,
    (False, True): SquareClass.LAMBDA,
    (True, False): SquareClass.P,
    (True, True): SquareClass.LAMBDA_P,
}

ORDER = (SquareClass.ONE, SquareClass.LAMBDA, SquareClass.P, SquareClass.LAMBDA_P)


@dataclass(frozen=True)
class HilbertTable:
    residue_class: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for i in range(4):
            if self.entries[0][i] != 1:
                raise ValueError("class 1 must pair trivially")
            for j in range(4):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError("Hilbert table must be symmetric")

    def __call__(self, a: SquareClass, b: SquareClass) -> int:
        return self.entries[ORDER.index(a)][ORDER.index(b)]


# rows/columns in the order 1, l, p, lp
TABLE_P1 = HilbertTable(
    1,
    (
        (1, 1, 1, 1),
        (1, 1, -1, -1),
        (1, -1, 1, -1),
        (1, -1, -1, 1),
    ),
)
TABLE_P3 = HilbertTable(
    3,
    (
        (1, 1, 1, 1),
        (1, 1, -1, -1),
        (1, -1, -1, 1),
        (1, -1, 1, -1),
    ),
)


def table_for(ctx: PrimeContext | int) -> HilbertTable:
    p = ctx if isinstance(ctx, int) else ctx.p
    return TABLE_P1 if p % 4 == 1 else TABLE_P3


def classify(x, ctx: PrimeContext) -> SquareClass:
    """Square class of a nonzero p-adic number, integer or fraction."""
    if isinstance(x, PAdicNumber):
        if x.is_zero:
            raise ZeroHasNoClass("0 has no square class")
        return SquareClass.from_parts(x.valuation % 2 == 1, legendre(x.unit, ctx) == -1)
    x = Fraction(x)
    if x == 0:
        raise ZeroHasNoClass("0 has no square class")
    p = ctx.p
    a = valuation_of(x.numerator, p)
    b = valuation_of(x.denominator, p)
    unit = (x.numerator // p**a) * (x.denominator // p**b)
    return SquareClass.from_parts((a - b) % 2 == 1, legendre(unit, ctx) == -1)


def representative(c: SquareClass, ctx: PrimeContext) -> int:
    """The integer 1, lam, p or lam*p standing for class ``c``."""
    return (ctx.lam if c.nonresidue else 1) * (ctx.p if c.odd else 1)


def minus_one_class(ctx: PrimeContext | int) -> SquareClass:
    p = ctx if isinstance(ctx, int) else ctx.p
    return SquareClass.ONE if p % 4 == 1 else SquareClass.LAMBDA


def hilbert(a: SquareClass, b: SquareClass, ctx: PrimeContext | int) -> int:
    return table_for(ctx)(a, b)


def hilbert_general(a, b, ctx: PrimeContext) -> int:
    """(a, b)_p for nonzero rationals or p-adic numbers."""
    return hilbert(classify(a, ctx), classify(b, ctx), ctx)
