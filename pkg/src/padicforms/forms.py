"""Quadratic spaces over Q_p: Gram input, diagonalization, invariants,
canonical representatives and the ``diag(...)`` form language."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .padic import PrimeContext
from .symbols import (
    ORDER,
    SquareClass,
    classify,
    hilbert,
    minus_one_class,
    representative,
)

__all__ = [
    "FormSyntaxError",
    "GramForm",
    "DiagonalForm",
    "FormInvariants",
    "diag",
    "diagonalize",
    "radical",
    "invariants",
    "canonical",
    "equivalent",
    "direct_sum",
    "form_exists",
    "canonical_forms",
    "parse_form",
    "CANONICAL_RANK2",
    "CANONICAL_RANK3",
]

ONE, LAM, P, LAMP = ORDER


class FormSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class GramForm:
    ctx: PrimeContext
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"Gram matrix is not symmetric at ({i}, {j})")
        object.__setattr__(self, "matrix", rows)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def bilinear(self, u: Sequence, v: Sequence):
        return sum(u[i] * self.matrix[i][j] * v[j] for i in range(self.n) for j in range(self.n))

    @classmethod
    def from_json(cls, obj: dict, ctx: PrimeContext) -> "GramForm":
        """``{"n": 3, "m": [[...], ...]}``; entries are ints or ``"a/b"`` strings."""
        n = obj["n"]
        m = obj["m"]
        if len(m) != n:
            raise ValueError(f"expected {n} rows, got {len(m)}")
        return cls(ctx, tuple(tuple(Fraction(x) for x in row) for row in m))

    def to_json(self) -> dict:
        def enc(x: Fraction):
            return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        return {"n": self.n, "m": [[enc(x) for x in row] for row in self.matrix]}


@dataclass(frozen=True)
class DiagonalForm:
    """diag(0^k) + diag(c_1, ..., c_r) with each c_i a square class."""

    ctx: PrimeContext
    zero_count: int = 0
    classes: tuple[SquareClass, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.zero_count < 0:
            raise ValueError("zero_count must be non-negative")
        object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def rank(self) -> int:
        return len(self.classes)

    @property
    def dim(self) -> int:
        return self.zero_count + self.rank

    @property
    def nondegenerate(self) -> "DiagonalForm":
        return DiagonalForm(self.ctx, 0, self.classes)

    def as_gram(self) -> GramForm:
        entries = [Fraction(0)] * self.zero_count + [Fraction(representative(c, self.ctx)) for c in self.classes]
        n = len(entries)
        return GramForm(self.ctx, tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    def to_dsl(self) -> str:
        tokens = [c.value for c in self.classes] + ["0"] * self.zero_count
        parts = []
        i = 0
        while i < len(tokens):
            j = i
            while j < len(tokens) and tokens[j] == tokens[i]:
                j += 1
            parts.append(tokens[i] if j - i == 1 else f"{tokens[i]}^{j - i}")
            i = j
        return f"diag({','.join(parts)})"

    def __str__(self) -> str:
        return self.to_dsl()


@dataclass(frozen=True)
class FormInvariants:
    dim: int
    rank: int
    disc: SquareClass
    hasse: int

    def to_json(self) -> dict:
        return {"dim": self.dim, "rank": self.rank, "disc": self.disc.value, "hasse": self.hasse}


def diag(ctx: PrimeContext, *tokens, zeros: int = 0) -> DiagonalForm:
    """Shorthand: ``diag(ctx, "l", "p", zeros=2)``; tokens may be classes or rationals."""
    classes = []
    for t in tokens:
        if isinstance(t, SquareClass):
            classes.append(t)
        elif isinstance(t, str) and t in ("1", "l", "p", "lp"):
            classes.append(SquareClass(t))
        elif Fraction(t) == 0:
            zeros += 1
        else:
            classes.append(classify(t, ctx))
    return DiagonalForm(ctx, zeros, tuple(classes))


# -- diagonalization ---------------------------------------------------------


def radical(g: GramForm) -> list[list[Fraction]]:
    """Basis of the kernel of the Gram matrix, by exact row reduction."""
    n = g.n
    rows = [list(r) for r in g.matrix]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


def _symmetric_pivots(matrix: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Diagonal entries of a congruent diagonal matrix (nonzero ones only)."""
    m = [list(r) for r in matrix]
    out = []
    while m:
        n = len(m)
        i = next((i for i in range(n) if m[i][i] != 0), None)
        if i is None:
            pair = next(((a, b) for a in range(n) for b in range(a + 1, n) if m[a][b] != 0), None)
            if pair is None:
                break  # the rest is radical
            a, b = pair
            # u -> u + v makes the diagonal entry 2*B(u, v) != 0
            for k in range(n):
                m[a][k] += m[b][k]
            for k in range(n):
                m[k][a] += m[k][b]
            i = a
        d = m[i][i]
        out.append(d)
        rest = [k for k in range(n) if k != i]
        m = [[m[r][c] - m[r][i] * m[i][c] / d for c in rest] for r in rest]
    return out


def diagonalize(g: GramForm) -> DiagonalForm:
    k = len(radical(g))
    entries = _symmetric_pivots(g.matrix)
    if len(entries) != g.n - k:
        raise AssertionError("rank mismatch between elimination and kernel")
    return DiagonalForm(g.ctx, k, tuple(classify(d, g.ctx) for d in entries))


# -- invariants and classification ------------------------------------------


def _disc(classes: Iterable[SquareClass]) -> SquareClass:
    d = ONE
    for c in classes:
        d = d * c
    return d


def _hasse(classes: Sequence[SquareClass], ctx) -> int:
    e = 1
    for a, b in combinations(classes, 2):
        e *= hilbert(a, b, ctx)
    return e


def invariants(f: DiagonalForm) -> FormInvariants:
    return FormInvariants(f.dim, f.rank, _disc(f.classes), _hasse(f.classes, f.ctx))


def form_exists(rank: int, disc: SquareClass, hasse: int, ctx: PrimeContext | int) -> bool:
    """Whether a nondegenerate form with these invariants exists."""
    if rank == 0:
        return disc is ONE and hasse == 1
    if rank == 1:
        return hasse == 1
    if rank == 2:
        # a binary form of discriminant -1 is the hyperbolic plane
        return disc is not minus_one_class(ctx) or hasse == 1
    return True


CANONICAL_RANK2 = {
    1: ((ONE, ONE), (ONE, LAM), (ONE, P), (ONE, LAMP), (LAM, P), (LAM, LAMP), (P, LAMP)),
    3: ((ONE, ONE), (P, P), (ONE, LAM), (ONE, P), (ONE, LAMP), (LAM, P), (LAM, LAMP)),
}
CANONICAL_RANK3 = {
    1: (
        (ONE, ONE, ONE), (LAM, P, LAMP), (ONE, ONE, LAM), (ONE, ONE, P),
        (ONE, ONE, LAMP), (ONE, LAM, P), (ONE, LAM, LAMP), (ONE, P, LAMP),
    ),
    3: (
        (ONE, ONE, ONE), (ONE, P, P), (ONE, ONE, P), (P, P, P),
        (ONE, LAM, P), (ONE, ONE, LAMP), (P, P, LAM), (ONE, P, LAMP),
    ),
}


def _index(table: dict) -> dict:
    out = {}
    for residue, forms in table.items():
        idx = {}
        for cl in forms:
            key = (_disc(cl), _hasse(cl, residue))
            if key in idx:
                raise AssertionError(f"duplicate canonical invariants {key}")
            idx[key] = cl
        out[residue] = idx
    return out


_RANK2_BY_INV = _index(CANONICAL_RANK2)
_RANK3_BY_INV = _index(CANONICAL_RANK3)


def _canonical_classes(rank: int, disc: SquareClass, hasse: int, residue: int) -> tuple[SquareClass, ...]:
    if rank == 0:
        return ()
    if rank == 1:
        return (disc,)
    if rank == 2:
        return _RANK2_BY_INV[residue][(disc, hasse)]
    return (ONE,) * (rank - 3) + _RANK3_BY_INV[residue][(disc, hasse)]


def canonical(f: DiagonalForm) -> DiagonalForm:
    inv = invariants(f)
    cl = _canonical_classes(f.rank, inv.disc, inv.hasse, f.ctx.residue)
    return DiagonalForm(f.ctx, f.zero_count, cl)


def canonical_forms(rank: int, ctx: PrimeContext) -> Iterator[DiagonalForm]:
    """One representative per isometry class of nondegenerate rank-``rank`` forms."""
    if rank == 0:
        yield DiagonalForm(ctx)
    elif rank == 1:
        for c in ORDER:
            yield DiagonalForm(ctx, 0, (c,))
    elif rank == 2:
        for cl in CANONICAL_RANK2[ctx.residue]:
            yield DiagonalForm(ctx, 0, cl)
    else:
        for cl in CANONICAL_RANK3[ctx.residue]:
            yield DiagonalForm(ctx, 0, (ONE,) * (rank - 3) + cl)


def equivalent(f1: DiagonalForm, f2: DiagonalForm) -> bool:
    if f1.ctx.p != f2.ctx.p:
        raise ValueError("forms over different primes")
    if f1.zero_count != f2.zero_count or f1.rank != f2.rank:
        return False
    return invariants(f1) == invariants(f2)


def direct_sum(f1: DiagonalForm, f2: DiagonalForm) -> DiagonalForm:
    if f1.ctx.p != f2.ctx.p:
        raise ValueError("forms over different primes")
    return DiagonalForm(f1.ctx, f1.zero_count + f2.zero_count, f1.classes + f2.classes)


# -- the diag(...) language --------------------------------------------------

_TOKEN = re.compile(r"\s*(lp|l|p|-?\d+(?:/\d+)?)(?:\s*\^\s*(\d+))?\s*")


def parse_form(text: str, ctx: PrimeContext) -> DiagonalForm:
    """Parse ``diag(1,l,p,lp,0^2)``; rational entries are classified on parse."""
    s = text.strip()
    offset = len(text) - len(text.lstrip())
    if not s.startswith("diag("):
        raise FormSyntaxError("expected 'diag('", offset)
    if not s.endswith(")"):
        raise FormSyntaxError("expected ')'", offset + len(s))
    body = s[5:-1]
    base = offset + 5
    classes: list[SquareClass] = []
    zeros = 0
    if body.strip() == "":
        return DiagonalForm(ctx)
    pos = 0
    for piece in body.split(","):
        m = _TOKEN.fullmatch(piece)
        if m is None:
            raise FormSyntaxError(f"bad entry {piece.strip()!r}", base + pos + (len(piece) - len(piece.lstrip())))
        tok, rep = m.groups()
        count = int(rep) if rep is not None else 1
        if tok in ("l", "p", "lp"):
            classes.extend([SquareClass(tok)] * count)
        else:
            try:
                value = Fraction(tok)
            except ZeroDivisionError:
                raise FormSyntaxError(f"zero denominator in {tok!r}", base + pos) from None
            if value == 0:
                zeros += count
            else:
                classes.extend([classify(value, ctx)] * count)
        pos += len(piece) + 1
    return DiagonalForm(ctx, zeros, tuple(classes))
