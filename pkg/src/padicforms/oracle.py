"""Brute-force cross-checks that share no code with the table-driven path.

Isotropy of a diagonal form over Z_p is decided by searching for primitive
zeros modulo p, p^2, ...  A node s is certified when some partial
derivative satisfies v(F(s)) > 2 v(dF/dx_i (s)), which Hensel's lemma turns
into a genuine p-adic zero.  A level with no surviving nodes refutes
isotropy.  Square classes are read off an enumerated table of squares mod p
rather than Euler's criterion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = [
    "OracleConfig",
    "Inconclusive",
    "isotropic_oracle",
    "hilbert_oracle",
    "represents_oracle",
    "square_class_oracle",
    "invariants_oracle",
]


class Inconclusive(RuntimeError):
    """The search hit its depth or size limit without a verdict."""


@dataclass(frozen=True)
class OracleConfig:
    m: int = 6
    samples: int = 200
    seed: int = 0
    max_nodes: int = 200_000


def _val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _normalize(x, p: int, digits: int) -> int:
    """p^(v mod 2) * (unit mod p^digits); same square class as x."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("coefficients must be nonzero")
    v = _val(x.numerator, p) - _val(x.denominator, p)
    num = x.numerator // p ** max(v, 0)
    den = x.denominator // p ** max(-v, 0)
    mod = p**digits
    unit = num * pow(den, -1, mod) % mod
    return unit * p ** (v % 2)


def isotropic_oracle(coeffs: Sequence, p: int, config: OracleConfig = OracleConfig()) -> bool:
    """Does sum coeffs[i] * x_i^2 have a nontrivial zero over Q_p?"""
    a = [_normalize(c, p, config.m + 2) for c in coeffs]
    r = len(a)
    if r < 2:
        return False

    def F(s):
        return sum(c * x * x for c, x in zip(a, s))

    def certified(s) -> bool:
        fv = F(s)
        if fv == 0:
            return True
        vf = _val(fv, p)
        for c, x in zip(a, s):
            d = 2 * c * x
            if d and vf > 2 * _val(d, p):
                return True
        return False

    # projective points mod p: first unit coordinate normalized to 1
    level = []
    for j in range(r):
        for rest in itertools.product(range(p), repeat=r - j - 1):
            s = (0,) * j + (1,) + rest
            if F(s) % p == 0:
                level.append((j, s))
    t = 1
    nodes = len(level)
    while True:
        if not level:
            return False
        if any(certified(s) for _, s in level):
            return True
        if t >= config.m:
            raise Inconclusive(f"no verdict at depth {t}")
        nxt = []
        step = p**t
        for j, s in level:
            free = [i for i in range(r) if i != j]
            for delta in itertools.product(range(p), repeat=r - 1):
                s2 = list(s)
                for i, d in zip(free, delta):
                    s2[i] += d * step
                if F(s2) % (step * p) == 0:
                    nxt.append((j, tuple(s2)))
        nodes += len(nxt)
        if nodes > config.max_nodes:
            raise Inconclusive(f"search exceeded {config.max_nodes} nodes")
        level = nxt
        t += 1


def hilbert_oracle(a, b, p: int, config: OracleConfig = OracleConfig()) -> int:
    """(a, b)_p as +1 iff z^2 - a x^2 - b y^2 is isotropic."""
    return 1 if isotropic_oracle([1, -Fraction(a), -Fraction(b)], p, config) else -1


def represents_oracle(coeffs: Sequence, c, p: int, config: OracleConfig = OracleConfig()) -> bool:
    """Does the nondegenerate form diag(coeffs) represent c != 0?"""
    return isotropic_oracle(list(coeffs) + [-Fraction(c)], p, config)


def square_class_oracle(x, p: int) -> tuple[bool, bool]:
    """(odd valuation, unit part is a nonsquare) for a nonzero rational."""
    x = Fraction(x)
    v = _val(x.numerator, p) - _val(x.denominator, p)
    unit = _normalize(x / Fraction(p) ** v, p, 1) % p
    squares = {i * i % p for i in range(1, p)}
    return v % 2 == 1, unit not in squares


def invariants_oracle(coeffs: Sequence, p: int, config: OracleConfig = OracleConfig()) -> tuple[tuple[bool, bool], int]:
    """Discriminant (as class parts) and Hasse invariant of diag(coeffs)."""
    d = Fraction(1)
    for c in coeffs:
        d *= Fraction(c)
    hasse = 1
    for i in range(len(coeffs)):
        for j in range(i + 1, len(coeffs)):
            hasse *= hilbert_oracle(coeffs[i], coeffs[j], p, config)
    return square_class_oracle(d, p), hasse
