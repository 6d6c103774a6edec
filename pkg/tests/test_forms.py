import random
from fractions import Fraction
from itertools import combinations_with_replacement

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padicforms import PrimeContext
from padicforms.forms import (
    CANONICAL_RANK2,
    CANONICAL_RANK3,
    DiagonalForm,
    FormSyntaxError,
    GramForm,
    canonical,
    canonical_forms,
    diag,
    diagonalize,
    direct_sum,
    equivalent,
    form_exists,
    invariants,
    parse_form,
    radical,
)
from padicforms.symbols import ORDER, SquareClass, representative

ONE, LAM, P, LAMP = ORDER


def test_parse_and_print():
    ctx = PrimeContext(7)
    f = parse_form("diag(1, l^2, p, lp, 0^3)", ctx)
    assert f.zero_count == 3 and f.classes == (ONE, LAM, LAM, P, LAMP)
    assert f.to_dsl() == "diag(1,l^2,p,lp,0^3)"
    assert parse_form(f.to_dsl(), ctx) == f
    assert parse_form("diag(9, 14, 3/49, -1)", ctx).classes == (ONE, P, LAM, LAM)
    assert parse_form("diag()", ctx).dim == 0


@pytest.mark.parametrize(
    "text,pos",
    [("diag(1,q)", 7), ("dag(1)", 0), ("diag(1,2", 8), ("diag(1,,p)", 7), ("diag(1/0)", 5)],
)
def test_parse_errors_report_position(text, pos):
    with pytest.raises(FormSyntaxError) as err:
        parse_form(text, PrimeContext(5))
    assert err.value.position == pos


def test_gram_json_round_trip():
    ctx = PrimeContext(5)
    g = GramForm(ctx, ((1, Fraction(1, 2)), (Fraction(1, 2), 3)))
    assert GramForm.from_json(g.to_json(), ctx) == g
    with pytest.raises(ValueError):
        GramForm(ctx, ((1, 2), (3, 4)))


def test_diagonalize_degenerate():
    ctx = PrimeContext(5)
    g = GramForm(ctx, ((0, 1, 0), (1, 0, 0), (0, 0, 0)))
    f = diagonalize(g)
    assert f.zero_count == 1 and f.rank == 2
    assert equivalent(f.nondegenerate, DiagonalForm(ctx, 0, (ONE, ONE)))  # hyperbolic plane at p = 5
    assert len(radical(g)) == 1


def _random_gram(rng, n, ctx):
    d = [rng.choice([0] + [representative(c, ctx) * rng.choice([1, 4, 9]) for c in ORDER]) for _ in range(n)]
    m = [[Fraction(d[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    return d, m


def _congruent_transform(m, rng):
    n = len(m)
    while True:
        a = [[Fraction(rng.randint(-4, 4), rng.choice([1, 1, 2, 3])) for _ in range(n)] for _ in range(n)]
        det = _det(a)
        if det != 0:
            break
    return [[sum(a[k][i] * m[k][l] * a[l][j] for k in range(n) for l in range(n)) for j in range(n)] for i in range(n)]


def _det(a):
    a = [row[:] for row in a]
    n, det = len(a), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_diagonalization_is_congruence_invariant(p):
    ctx = PrimeContext(p)
    rng = random.Random(p)
    for _ in range(200):
        n = rng.randint(1, 5)
        d, m = _random_gram(rng, n, ctx)
        base = diagonalize(GramForm(ctx, m))
        moved = diagonalize(GramForm(ctx, _congruent_transform(m, rng)))
        assert moved.zero_count == base.zero_count
        assert equivalent(moved, base)


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_canonical_lists_have_expected_sizes(p):
    ctx = PrimeContext(p)
    sizes = [len(list(canonical_forms(r, ctx))) for r in (1, 2, 3, 4, 5)]
    assert sizes == [4, 7, 8, 8, 8]
    lists = {2: CANONICAL_RANK2[ctx.residue], 3: CANONICAL_RANK3[ctx.residue]}
    for rank in (1, 2, 3):
        seen = set()
        for cl in combinations_with_replacement(ORDER, rank):
            c = canonical(DiagonalForm(ctx, 0, cl))
            assert equivalent(c, DiagonalForm(ctx, 0, cl))
            assert canonical(c) == c
            seen.add(c.classes)
        if rank > 1:
            assert seen == set(lists[rank])


def test_form_exists_matches_enumeration():
    for p in (3, 5, 7, 13):
        ctx = PrimeContext(p)
        for rank in range(0, 5):
            realised = {
                (invariants(DiagonalForm(ctx, 0, cl)).disc, invariants(DiagonalForm(ctx, 0, cl)).hasse)
                for cl in combinations_with_replacement(ORDER, rank)
            }
            for disc in ORDER:
                for hasse in (1, -1):
                    assert form_exists(rank, disc, hasse, ctx) == ((disc, hasse) in realised)


@pytest.mark.parametrize("p", [5, 13])
def test_equivalences_p1(p):
    ctx = PrimeContext(p)
    assert equivalent(diag(ctx, "p", "p"), diag(ctx, "1", "1"))
    assert equivalent(diag(ctx, "lp", "lp"), diag(ctx, "1", "1"))
    assert not equivalent(diag(ctx, "l", "p"), diag(ctx, "1", "lp"))


@pytest.mark.parametrize("p", [3, 7, 11])
def test_equivalences_p3(p):
    ctx = PrimeContext(p)
    assert equivalent(diag(ctx, "l", "l"), diag(ctx, "1", "1"))
    assert equivalent(diag(ctx, "lp", "lp"), diag(ctx, "p", "p"))
    assert equivalent(diag(ctx, "p", "lp"), diag(ctx, "1", "l"))
    assert not equivalent(diag(ctx, "p", "p"), diag(ctx, "1", "1"))


def test_equivalent_respects_radical():
    ctx = PrimeContext(5)
    assert not equivalent(diag(ctx, "1", zeros=1), diag(ctx, "1", "1"))
    assert equivalent(diag(ctx, "p", "p", zeros=2), diag(ctx, "1", "1", zeros=2))


@given(
    st.sampled_from([3, 5, 7, 13]),
    st.lists(st.sampled_from(ORDER), max_size=6),
    st.lists(st.sampled_from(ORDER), max_size=6),
    st.lists(st.sampled_from(ORDER), min_size=1, max_size=4),
)
def test_witt_cancellation(p, a, b, c):
    ctx = PrimeContext(p)
    fa, fb, fc = (DiagonalForm(ctx, 0, tuple(x)) for x in (a, b, c))
    if equivalent(direct_sum(fa, fc), direct_sum(fb, fc)):
        assert equivalent(fa, fb)
    if equivalent(fa, fb):
        assert equivalent(direct_sum(fa, fc), direct_sum(fc, fb))


@given(st.sampled_from([3, 5, 7, 13]), st.lists(st.sampled_from(ORDER), max_size=7), st.randoms())
def test_canonical_idempotent_and_order_free(p, classes, rnd):
    ctx = PrimeContext(p)
    f = DiagonalForm(ctx, 0, tuple(classes))
    shuffled = list(classes)
    rnd.shuffle(shuffled)
    assert canonical(canonical(f)) == canonical(f)
    assert canonical(DiagonalForm(ctx, 0, tuple(shuffled))) == canonical(f)
