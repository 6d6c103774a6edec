"""Isometric embeddings of quadratic spaces into diag(1^n) and diag(1^(n-1), l).

The decision procedure splits hyperbolic planes off the target for the
radical of the source (a k-dimensional radical needs k hyperbolic planes),
then decides the nondegenerate remainder by searching the finite list of
canonical complements.  :func:`embeds_by_invariants` is an independent
shortcut that computes the forced complement invariants directly; the two
are cross-checked by the test suite.

Witnesses are explicit coordinate bases, verified digit-exactly against the
target Gram form before they are returned.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .forms import (
    DiagonalForm,
    FormInvariants,
    canonical_forms,
    direct_sum,
    equivalent,
    form_exists,
    invariants,
    parse_form,
)
from .padic import (
    PAdicNumber,
    PrecisionExhausted,
    PrimeContext,
    hensel_lift,
    legendre,
    sqrt,
    valuation_of,
)
from .symbols import (
    ORDER,
    SquareClass,
    classify,
    hilbert,
    minus_one_class,
    representative,
)

__all__ = [
    "Family",
    "Reason",
    "TargetSpace",
    "Reduction",
    "EmbedDecision",
    "HenselConstants",
    "Witness",
    "VerificationFailed",
    "RetryBudgetExhausted",
    "NotEmbeddable",
    "hensel_constants",
    "reduce_degenerate",
    "embeds_nondegenerate",
    "embeds_by_invariants",
    "decide",
    "min_dimension",
    "max_isotropic_dim",
    "isotropic_bound",
    "isotropic_basis",
    "witness",
    "verify_rows",
    "DEFAULT_WITNESS_PRECISION",
    "RETRY_BUDGET",
]

ONE, LAM, P, LAMP = ORDER

DEFAULT_WITNESS_PRECISION = 20
RETRY_BUDGET = 64


class VerificationFailed(RuntimeError):
    """A constructed witness failed its Gram check.  Indicates a bug."""


class RetryBudgetExhausted(RuntimeError):
    pass


class NotEmbeddable(ValueError):
    pass


class Family(enum.Enum):
    EUCLIDEAN = "euclid"
    LORENTZIAN = "lorentz"

    @property
    def other(self) -> "Family":
        return Family.LORENTZIAN if self is Family.EUCLIDEAN else Family.EUCLIDEAN


class Reason(str, enum.Enum):
    INVARIANT_MATCH = "INVARIANT_MATCH"
    INVARIANT_MISMATCH = "INVARIANT_MISMATCH"
    COMPLEMENT_EXISTS = "COMPLEMENT_EXISTS"
    NO_COMPLEMENT = "NO_COMPLEMENT"
    DIMENSION_EXCEEDED = "DIMENSION_EXCEEDED"
    ISOTROPIC_BOUND_EXCEEDED = "ISOTROPIC_BOUND_EXCEEDED"


@dataclass(frozen=True)
class TargetSpace:
    """EUCLIDEAN(n) is diag(1^n); LORENTZIAN(n) is diag(1^(n-1), l)."""

    family: Family
    n: int

    def __post_init__(self) -> None:
        minimum = 1 if self.family is Family.LORENTZIAN else 0
        if self.n < minimum:
            raise ValueError(f"{self.family.value} target needs n >= {minimum}")

    @property
    def classes(self) -> tuple[SquareClass, ...]:
        if self.family is Family.EUCLIDEAN:
            return (ONE,) * self.n
        return (ONE,) * (self.n - 1) + (LAM,)

    def as_form(self, ctx: PrimeContext) -> DiagonalForm:
        return DiagonalForm(ctx, 0, self.classes)

    def coefficients(self, ctx: PrimeContext) -> list[int]:
        return [representative(c, ctx) for c in self.classes]

    def __str__(self) -> str:
        return f"{self.family.value}:{self.n}"

    @classmethod
    def parse(cls, text: str) -> "TargetSpace":
        fam, _, n = text.partition(":")
        return cls(Family(fam), int(n))


def _split(t: TargetSpace, k: int, ctx: PrimeContext) -> TargetSpace | None:
    """The space R with t = H^k + R, or None if no such R exists."""
    m = t.n - 2 * k
    if m < 0:
        return None
    fam = t.family
    # H = diag(1, -1): diag(1,1) when -1 is a square, diag(1, l) otherwise
    if ctx.residue == 3 and k % 2 == 1:
        fam = fam.other
    if fam is Family.LORENTZIAN and m == 0:
        return None
    return TargetSpace(fam, m)


@dataclass(frozen=True)
class Reduction:
    nondegenerate: DiagonalForm
    zero_count: int
    target: TargetSpace | None
    k_bound: int
    blocked: Reason | None = None

    def to_json(self) -> dict:
        return {
            "form": self.nondegenerate.to_dsl(),
            "k": self.zero_count,
            "target": str(self.target) if self.target is not None else None,
            "k_bound": self.k_bound,
            "blocked": self.blocked.value if self.blocked else None,
        }


def isotropic_bound(t: TargetSpace, ctx: PrimeContext) -> int:
    """Witt index of t in closed form."""
    n = t.n
    if n % 2 == 1:
        return n // 2
    if ctx.residue == 1:
        return n // 2 if t.family is Family.EUCLIDEAN else (n - 2) // 2
    # p = 3 mod 4: the answer depends on n mod 4
    full = (n % 4 == 0) == (t.family is Family.EUCLIDEAN)
    return n // 2 if full else (n - 2) // 2


def reduce_degenerate(f: DiagonalForm, t: TargetSpace) -> Reduction:
    """Trade the radical diag(0^k) for k hyperbolic planes of the target."""
    ctx = f.ctx
    k = f.zero_count
    bound = isotropic_bound(t, ctx)
    s = f.nondegenerate
    r = _split(t, k, ctx)
    if r is None:
        return Reduction(s, k, None, bound, Reason.ISOTROPIC_BOUND_EXCEEDED)
    if r.n < s.rank:
        why = Reason.DIMENSION_EXCEEDED if k == 0 else Reason.ISOTROPIC_BOUND_EXCEEDED
        return Reduction(s, k, r, bound, why)
    return Reduction(s, k, r, bound)


@dataclass(frozen=True)
class EmbedDecision:
    embeds: bool
    reason: Reason
    form: DiagonalForm
    target: TargetSpace
    reduced: Reduction
    complement: DiagonalForm | None = None

    def to_json(self) -> dict:
        red = self.reduced.to_json()
        red["complement"] = self.complement.to_dsl() if self.complement is not None else None
        return {
            "embeds": self.embeds,
            "reason": self.reason.value,
            "form": self.form.to_dsl(),
            "target": str(self.target),
            "reduced": red,
        }

    @classmethod
    def from_json(cls, obj: dict, ctx: PrimeContext) -> "EmbedDecision":
        red = obj["reduced"]
        reduction = Reduction(
            parse_form(red["form"], ctx),
            red["k"],
            TargetSpace.parse(red["target"]) if red["target"] else None,
            red["k_bound"],
            Reason(red["blocked"]) if red["blocked"] else None,
        )
        comp = red.get("complement")
        return cls(
            obj["embeds"],
            Reason(obj["reason"]),
            parse_form(obj["form"], ctx),
            TargetSpace.parse(obj["target"]),
            reduction,
            parse_form(comp, ctx) if comp else None,
        )


def embeds_nondegenerate(s: DiagonalForm, t: TargetSpace) -> tuple[bool, Reason, DiagonalForm | None]:
    """Decide S -> t for nondegenerate S by enumerating canonical complements.

    Returns ``(embeds, reason, complement)``.
    """
    if s.zero_count:
        raise ValueError("source must be nondegenerate")
    ctx = s.ctx
    tf = t.as_form(ctx)
    if s.rank > t.n:
        return False, Reason.DIMENSION_EXCEEDED, None
    if s.rank == t.n:
        ok = equivalent(s, tf)
        return ok, Reason.INVARIANT_MATCH if ok else Reason.INVARIANT_MISMATCH, None
    for c in canonical_forms(t.n - s.rank, ctx):
        if equivalent(direct_sum(s, c), tf):
            return True, Reason.COMPLEMENT_EXISTS, c
    return False, Reason.NO_COMPLEMENT, None


def _combine(a: FormInvariants, b: FormInvariants, ctx) -> FormInvariants:
    """Invariants of an orthogonal sum."""
    return FormInvariants(
        a.dim + b.dim,
        a.rank + b.rank,
        a.disc * b.disc,
        a.hasse * b.hasse * hilbert(a.disc, b.disc, ctx),
    )


def _hyperbolic_invariants(k: int, ctx: PrimeContext) -> FormInvariants:
    m1 = minus_one_class(ctx)
    inv = FormInvariants(0, 0, ONE, 1)
    plane = FormInvariants(2, 2, m1, hilbert(ONE, m1, ctx))
    for _ in range(k):
        inv = _combine(inv, plane, ctx)
    return inv


def embeds_by_invariants(f: DiagonalForm, t: TargetSpace) -> bool:
    """Independent decision: does some C satisfy S + H^k + C = t?"""
    ctx = f.ctx
    m = t.n - f.rank - 2 * f.zero_count
    if m < 0:
        return False
    x = _combine(invariants(f.nondegenerate), _hyperbolic_invariants(f.zero_count, ctx), ctx)
    tinv = invariants(t.as_form(ctx))
    disc_c = tinv.disc * x.disc
    hasse_c = tinv.hasse * x.hasse * hilbert(x.disc, disc_c, ctx)
    return form_exists(m, disc_c, hasse_c, ctx)


def decide(f: DiagonalForm, t: TargetSpace) -> EmbedDecision:
    red = reduce_degenerate(f, t)
    if red.blocked is not None:
        return EmbedDecision(False, red.blocked, f, t, red)
    ok, why, comp = embeds_nondegenerate(red.nondegenerate, red.target)
    return EmbedDecision(ok, why, f, t, red, comp)


def min_dimension(f: DiagonalForm, family: Family) -> int:
    """Smallest n >= dim(f) with f embedded in family(n)."""
    start = max(1, f.dim)
    # a complement of rank >= 3 always exists once n >= rank + 2k + 3
    stop = f.rank + 2 * f.zero_count + 4
    for n in range(start, max(start, stop) + 1):
        if decide(f, TargetSpace(family, n)).embeds:
            return n
    raise AssertionError(f"no embedding of {f} found up to n={stop}")


def max_isotropic_dim(t: TargetSpace, ctx: PrimeContext) -> int:
    """Largest k with diag(0^k) embedded in t."""
    for k in range(t.n // 2, -1, -1):
        if decide(DiagonalForm(ctx, k), t).embeds:
            return k
    raise AssertionError("diag(0^0) always embeds")


# -- Hensel constants ---------------------------------------------------------


@dataclass(frozen=True)
class HenselConstants:
    """a..e (p = 3 mod 4) or A..H (p = 1 mod 4)."""

    ctx: PrimeContext
    precision: int
    values: dict = field(hash=False, compare=False)

    def __getitem__(self, name: str) -> PAdicNumber:
        return self.values[name]

    def identities(self) -> list[tuple[str, Fraction, int]]:
        """(label, left-hand side, right-hand side) for each defining identity.

        Left-hand sides are exact rationals built from the truncated digits,
        so identities with right-hand side 0 can be checked too.
        """
        v = {k: x.to_fraction() for k, x in self.values.items()}
        lam, p = self.ctx.lam, self.ctx.p
        if self.ctx.residue == 3:
            ab = v["a"] ** 2 + v["b"] ** 2
            return [
                ("a^2+b^2 = l", ab, lam),
                ("a^2+b^2+c^2 = p", ab + v["c"] ** 2, p),
                ("a^2+b^2+d^2 = lp", ab + v["d"] ** 2, lam * p),
                ("a^2+b^2+e^2 = 0", ab + v["e"] ** 2, 0),
            ]
        return [
            ("A^2+B^2 = l", v["A"] ** 2 + v["B"] ** 2, lam),
            ("C^2+D^2 = p", v["C"] ** 2 + v["D"] ** 2, p),
            ("E^2+F^2 = lp", v["E"] ** 2 + v["F"] ** 2, lam * p),
            ("G^2+H^2 = 0", v["G"] ** 2 + v["H"] ** 2, 0),
        ]

    def check(self, modulus_exponent: int) -> dict[str, bool]:
        p = self.ctx.p
        out = {}
        for label, lhs, rhs in self.identities():
            d = lhs - rhs
            out[label] = d == 0 or _fval(d, p) >= modulus_exponent
        return out


def _fval(x: Fraction, p: int) -> int:
    return valuation_of(x.numerator, p) - valuation_of(x.denominator, p)


def _root_mod_p(target: int, p: int) -> int:
    return next(r for r in range(1, p) if (r * r - target) % p == 0)


def _lift_sqrt(target: int, ctx: PrimeContext, precision: int) -> PAdicNumber:
    """The root of x^2 = target (target a unit square) with smallest leading digit."""
    return hensel_lift([-target, 0, 1], _root_mod_p(target, ctx.p), ctx, precision)


@lru_cache(maxsize=64)
def hensel_constants(ctx: PrimeContext, precision: int | None = None) -> HenselConstants:
    p, lam = ctx.p, ctx.lam
    precision = precision or ctx.default_precision
    # smallest a with l - a^2 a nonzero square mod p; then b^2 = l - a^2 exactly
    a = next(x for x in range(p) if legendre(lam - x * x, ctx) == 1)
    b = hensel_lift([a * a - lam, 0, 1], _root_mod_p(lam - a * a, p), ctx, precision)
    a_p = ctx(a, precision)
    if ctx.residue == 3:
        values = {
            "a": a_p,
            "b": b,
            "c": _lift_sqrt(p - lam, ctx, precision),
            "d": _lift_sqrt(lam * p - lam, ctx, precision),
            "e": _lift_sqrt(-lam, ctx, precision),
        }
    else:
        one = ctx(1, precision)
        values = {
            "A": a_p,
            "B": b,
            "C": one,
            "D": _lift_sqrt(p - 1, ctx, precision),
            "E": one,
            "F": _lift_sqrt(lam * p - 1, ctx, precision),
            "G": _lift_sqrt(-1, ctx, precision),
            "H": one,
        }
    return HenselConstants(ctx, precision, values)


# -- witnesses ---------------------------------------------------------------


Vector = tuple  # tuple[PAdicNumber, ...]


def _zero(ctx: PrimeContext, prec: int) -> PAdicNumber:
    return PAdicNumber.zero(ctx, prec)


@dataclass(frozen=True)
class Witness:
    """Rows spanning an isometric copy of ``form`` inside ``target``.

    Rows for the radical come first, then one row per class of the form.
    """

    form: DiagonalForm
    target: TargetSpace
    vectors: tuple
    precision: int

    def verify(self) -> int:
        """Check the Gram identity mod p^precision and independence.

        Returns the valuation of a nonvanishing maximal minor.
        """
        return verify_rows(self.form, self.target, self.vectors, self.precision)

    def to_json(self) -> list[list[str]]:
        return [[x.compact() for x in row] for row in self.vectors]

    @classmethod
    def from_json(cls, rows, form: DiagonalForm, target: TargetSpace, precision: int) -> "Witness":
        from .padic import parse

        ctx = form.ctx
        return cls(form, target, tuple(tuple(parse(s, ctx) for s in row) for row in rows), precision)


def _scaled_integers(rows: Sequence[Sequence[PAdicNumber]]):
    """Scale all coordinates by p^-vmin to integers; also return their common precision."""
    coords = [x for row in rows for x in row if not x.is_zero]
    if not coords:
        return 0, [[0] * len(r) for r in rows], None
    p = coords[0].p
    vmin = min(x.valuation for x in coords)
    known = min(x.absolute_precision for x in coords) - vmin
    mats = [[0 if x.is_zero else x.unit * p ** (x.valuation - vmin) for x in row] for row in rows]
    return vmin, mats, known


def verify_rows(form: DiagonalForm, target: TargetSpace, rows, precision: int) -> int:
    ctx = form.ctx
    p = ctx.p
    if len(rows) != form.dim:
        raise VerificationFailed(f"expected {form.dim} rows, got {len(rows)}")
    if any(len(r) != target.n for r in rows):
        raise VerificationFailed("row length differs from target dimension")
    coeffs = target.coefficients(ctx)
    expected = [0] * form.zero_count + [representative(c, ctx) for c in form.classes]
    vmin, mats, known = _scaled_integers(rows)
    if known is None:
        if form.dim:
            raise VerificationFailed("all rows vanish")
        return 0
    if known + 2 * vmin < precision:
        raise VerificationFailed(
            f"witness is only known modulo p^{known + 2 * vmin}, need p^{precision}"
        )
    need = precision - 2 * vmin
    scale = Fraction(p) ** (-2 * vmin)
    for i in range(len(rows)):
        for j in range(i, len(rows)):
            b = sum(c * x * y for c, x, y in zip(coeffs, mats[i], mats[j]))
            want = (expected[i] if i == j else 0) * scale
            d = Fraction(b) - want
            if d != 0 and _fval(d, p) < need:
                raise VerificationFailed(f"Gram entry ({i}, {j}) is wrong modulo p^{precision}")
    return _minor_valuation(mats, known, p) + len(rows) * vmin


def _minor_valuation(mats: list[list[int]], known: int, p: int) -> int:
    """Valuation of a nonvanishing maximal minor, certified at finite precision."""
    rows = [list(r) for r in mats]
    total = 0
    cols = list(range(len(rows[0]))) if rows else []
    while rows:
        best = None
        for i, r in enumerate(rows):
            for c in cols:
                x = r[c] % p**known
                if x:
                    v = valuation_of(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, c)
        if best is None or best[0] >= known:
            raise VerificationFailed("rows are not certifiably independent")
        v, i, c = best
        piv = rows.pop(i)
        unit_inv = pow(piv[c] // p**v, -1, p**known)
        for r in rows:
            q = (r[c] // p**v) * unit_inv
            for cc in cols:
                r[cc] = r[cc] - q * piv[cc]
        cols.remove(c)
        total += v
        known -= v
    return total


def _truncate_rows(rows, precision: int):
    coords = [x for row in rows for x in row if not x.is_zero]
    if not coords:
        return rows
    vmin = min(x.valuation for x in coords)
    keep = precision - vmin + 1
    return tuple(
        tuple(x if x.is_zero else x.with_precision(max(1, keep - x.valuation)) for x in row) for row in rows
    )


# explicit block patterns ------------------------------------------------------


def _class_block(c: SquareClass, k: HenselConstants) -> list[list]:
    """Coordinates of a vector of norm rep(c) inside a diag(1,...,1) block."""
    if k.ctx.residue == 1:
        return {
            ONE: [[1]],
            LAM: [[k["A"], k["B"]]],
            P: [[k["C"], k["D"]]],
            LAMP: [[k["E"], k["F"]]],
        }[c]
    return {
        ONE: [[1]],
        LAM: [[k["a"], k["b"]]],
        P: [[k["a"], k["b"], k["c"]]],
        LAMP: [[k["a"], k["b"], k["d"]]],
    }[c]


def _isotropic_blocks(count: int, k: HenselConstants) -> list[list[list]]:
    """Blocks of mutually orthogonal isotropic vectors inside diag(1,...,1)."""
    out = []
    if k.ctx.residue == 1:
        for _ in range(count):
            out.append([[k["G"], k["H"]]])
        return out
    a, b, e = k["a"], k["b"], k["e"]
    while count >= 2:
        out.append([[a, b, e, 0], [-b, a, 0, e]])
        count -= 2
    if count:
        out.append([[a, b, e]])
    return out


def _place(blocks: list[list[list]], n: int, ctx: PrimeContext, prec: int) -> list[list[PAdicNumber]] | None:
    rows = []
    col = 0
    for block in blocks:
        width = len(block[0])
        if col + width > n:
            return None
        for vec in block:
            row = [_zero(ctx, prec)] * n
            for i, x in enumerate(vec):
                row[col + i] = ctx(x, prec)
            rows.append(row)
        col += width
    return rows


def _explicit_rows(f: DiagonalForm, t: TargetSpace, consts: HenselConstants, prec: int):
    """Fixed-pattern coordinate blocks, when they fit; None otherwise."""
    ctx = f.ctx
    if t.family is Family.EUCLIDEAN:
        blocks = _isotropic_blocks(f.zero_count, consts) + [_class_block(c, consts) for c in f.classes]
        return _place(blocks, t.n, ctx, prec)
    # Lorentzian: the last coordinate hosts one l class, or one isotropic vector when p = 3 mod 4
    classes = list(f.classes)
    iso = f.zero_count
    tail = None
    if LAM in classes:
        classes.remove(LAM)
        tail = [[1]]
    elif iso and ctx.residue == 3:
        iso -= 1
        tail = [[consts["e"], 1]]  # e^2 + l = 0
    blocks = _isotropic_blocks(iso, consts) + [_class_block(c, consts) for c in classes]
    # without a tail the l coordinate stays empty
    width = 1 if tail is None else len(tail[0])
    head = _place(blocks, t.n - width, ctx, prec)
    if head is None:
        return None
    head = [row + [_zero(ctx, prec)] * width for row in head]
    if tail is not None:
        row = [_zero(ctx, prec)] * (t.n - width) + [ctx(x, prec) for x in tail[0]]
        # put the tail row where its class/radical slot belongs
        if f.zero_count > iso:
            head.insert(0, row)
        else:
            idx = f.zero_count + list(f.classes).index(LAM)
            head.insert(idx, row)
    return head


def isotropic_basis(t: TargetSpace, ctx: PrimeContext, precision: int = DEFAULT_WITNESS_PRECISION):
    """An explicit maximal totally isotropic family of rows in t."""
    k = max_isotropic_dim(t, ctx)
    consts = hensel_constants(ctx, precision + 4)
    rows = _explicit_rows(DiagonalForm(ctx, k), t, consts, precision + 4)
    if rows is None:
        raise AssertionError(f"explicit isotropic pattern does not fit {t}")
    return tuple(tuple(r) for r in rows)


# randomized value representation ---------------------------------------------


def _represents(classes: Sequence[SquareClass], c: SquareClass, ctx: PrimeContext) -> bool:
    """Does diag(classes) represent the class c?"""
    m = len(classes)
    if m == 0:
        return False
    inv = invariants(DiagonalForm(ctx, 0, tuple(classes)))
    disc_c = inv.disc * c
    return form_exists(m - 1, disc_c, inv.hasse * hilbert(c, disc_c, ctx), ctx)


def _normalizer(q: PAdicNumber) -> tuple[SquareClass, PAdicNumber]:
    """(class, s) with s^2 * q equal to the class representative."""
    ctx = q.ctx
    cls = classify(q, ctx)
    h = q.valuation // 2
    unit_rep = ctx.lam if cls.nonresidue else 1
    s = sqrt(q.unit_part().inverse() * unit_rep) * ctx(Fraction(ctx.p) ** (-h), q.precision)
    return cls, s


class _Builder:
    def __init__(self, ctx: PrimeContext, t: TargetSpace, prec: int, rng: random.Random, budget: int):
        self.ctx = ctx
        self.prec = prec
        self.rng = rng
        self.budget = budget
        n = t.n
        self.vecs = []
        for i in range(n):
            row = [_zero(ctx, prec)] * n
            row[i] = ctx(1, prec)
            self.vecs.append(row)
        self.classes = list(t.classes)

    def rep(self, c: SquareClass) -> PAdicNumber:
        return self.ctx(representative(c, self.ctx), self.prec)

    def represent(self, value: PAdicNumber, classes: list[SquareClass]) -> list[PAdicNumber]:
        """Coefficients t with sum rep(classes[i]) * t_i^2 = value."""
        ctx, rng = self.ctx, self.rng
        r0 = self.rep(classes[0])
        zero = _zero(ctx, self.prec)
        if len(classes) == 1 or classify(value, ctx) is classes[0]:
            return [sqrt(value / r0)] + [zero] * (len(classes) - 1)
        base = (value.valuation - r0.valuation) // 2
        for _ in range(self.budget):
            if rng.random() < 0.2:
                x = zero
            else:
                j = base + rng.choice((-1, 0, 1))
                x = ctx(Fraction(rng.randrange(1, ctx.p**2)) * Fraction(ctx.p) ** j, self.prec)
            try:
                rest = value - r0 * x * x
            except PrecisionExhausted:
                continue
            if rest.is_zero or not _represents(classes[1:], classify(rest, ctx), ctx):
                continue
            return [x] + self.represent(rest, classes[1:])
        raise RetryBudgetExhausted(f"no representation found in {self.budget} attempts")

    def combine(self, coeffs, vecs) -> list[PAdicNumber]:
        n = len(vecs[0])
        out = [_zero(self.ctx, self.prec)] * n
        for c, v in zip(coeffs, vecs):
            if c.is_zero:
                continue
            out = [o + c * x for o, x in zip(out, v)]
        return out

    def complement(self, vecs, classes, coeffs, value) -> tuple[list, list]:
        """Orthogonal, normalized basis of v^perp inside span(vecs), v = sum coeffs*vecs."""
        support = [i for i, c in enumerate(coeffs) if not c.is_zero]
        new_vecs = [vecs[i] for i in range(len(vecs)) if coeffs[i].is_zero]
        new_classes = [classes[i] for i in range(len(vecs)) if coeffs[i].is_zero]
        rho = [self.rep(classes[i]) * coeffs[i] * coeffs[i] for i in support]
        sigma = [value]
        for r in rho[:-1]:
            sigma.append(sigma[-1] - r)
        for l in range(len(support) - 1):
            cs = [sigma[l + 1] * coeffs[support[l]]]
            cs += [-(rho[l] * coeffs[i]) for i in support[l + 1:]]
            u = self.combine(cs, [vecs[i] for i in support[l:]])
            cls, s = _normalizer(sigma[l + 1] * rho[l] * sigma[l])
            new_vecs.append([s * x for x in u])
            new_classes.append(cls)
        return new_vecs, new_classes

    def place_class(self, c: SquareClass) -> list[PAdicNumber]:
        if not _represents(self.classes, c, self.ctx):
            raise VerificationFailed(f"remaining space {self.classes} cannot host class {c.value}")
        value = self.rep(c)
        coeffs = self.represent(value, self.classes)
        v = self.combine(coeffs, self.vecs)
        self.vecs, self.classes = self.complement(self.vecs, self.classes, coeffs, value)
        return v

    def place_isotropic(self) -> list[PAdicNumber]:
        ctx = self.ctx
        for i in reversed(range(len(self.classes))):
            rest = self.classes[:i] + self.classes[i + 1:]
            target = classify(-representative(self.classes[i], ctx), ctx)
            if _represents(rest, target, ctx):
                break
        else:
            raise VerificationFailed("remaining space is anisotropic")
        value = -self.rep(self.classes[i])
        rest_vecs = self.vecs[:i] + self.vecs[i + 1:]
        coeffs = self.represent(value, rest)
        v = self.combine(coeffs, rest_vecs)
        x = [a + b for a, b in zip(v, self.vecs[i])]
        self.vecs, self.classes = self.complement(rest_vecs, rest, coeffs, value)
        return x


def _random_rows(f: DiagonalForm, t: TargetSpace, prec: int, rng: random.Random, budget: int):
    b = _Builder(f.ctx, t, prec, rng, budget)
    placed = [b.place_class(c) for c in f.classes]
    iso = [b.place_isotropic() for _ in range(f.zero_count)]
    return iso + placed


def witness(
    f: DiagonalForm,
    t: TargetSpace,
    precision: int = DEFAULT_WITNESS_PRECISION,
    seed: int = 0,
    budget: int = RETRY_BUDGET,
    explicit: bool = True,
) -> Witness:
    """Explicit basis of an isometric copy of ``f`` inside ``t``, verified mod p^precision."""
    if not decide(f, t).embeds:
        raise NotEmbeddable(f"{f} does not embed in {t}")
    ctx = f.ctx
    rng = random.Random(seed)
    work = precision + 2 * t.n + 16
    builders = [lambda prec: _random_rows(f, t, prec, rng, budget)] * 8
    if explicit:
        builders.insert(0, lambda prec: _explicit_rows(f, t, hensel_constants(ctx, prec), prec))
    last: Exception | None = None
    for build in builders:
        try:
            rows = build(work)
        except PrecisionExhausted as exc:
            last = exc
            work += 16
            continue
        if rows is None:
            continue
        # nearly dependent rows need extra digits before independence is certifiable
        for extra in (0, 8, 24):
            w = Witness(f, t, tuple(tuple(r) for r in _truncate_rows(rows, precision + extra)), precision)
            try:
                w.verify()
                return w
            except VerificationFailed as exc:
                last = exc
    raise VerificationFailed(f"could not build a verified witness: {last}")
