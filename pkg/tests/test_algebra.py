"""Core graded-algebra arithmetic, checked against an independent
sign-bookkeeping oracle.

The oracle multiplies generator words by bubble-sorting them into
canonical order while counting odd-odd transpositions, annihilating
repeated odd factors and reducing Clifford squares.  It shares no code
with the engine's merge-based product.
"""

from fractions import Fraction

import pytest

from superjet.algebra import (
    EVEN,
    ODD,
    Clifford,
    FieldSymbol,
    JetVar,
    SuperPoly,
    Theta,
    normalize,
    parity_of,
    prod,
)

Q = Fraction

b = FieldSymbol("b", EVEN, 1)
f = FieldSymbol("f", ODD, 1)
u2 = FieldSymbol("u", EVEN, 2)


def jp(sym, d1=0, d2=0, m=0):
    return SuperPoly.from_gen(JetVar(sym, d1, d2, m))


# ---------------------------------------------------------------------------
# independent oracle


def oracle_word(factors):
    """Canonicalize a generator word; returns (sign Fraction, params, word).

    A zero product is reported as (0, (), ()).  Implemented as a plain
    bubble sort with explicit transposition signs, independent of the
    engine's merge logic.
    """
    word = list(factors)
    coeff = Q(1)
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i + 1].sort_key() < word[i].sort_key():
                if word[i].parity == ODD and word[i + 1].parity == ODD:
                    coeff = -coeff
                word[i], word[i + 1] = word[i + 1], word[i]
                changed = True
    params = {}
    reduced = []
    i = 0
    while i < len(word):
        g = word[i]
        if i + 1 < len(word) and word[i + 1] == g and g.parity == ODD:
            if isinstance(g, Clifford):
                sq_rat, sq_params = g.square
                coeff *= sq_rat
                for n, e in sq_params:
                    params[n] = params.get(n, 0) + e
                i += 2
                continue
            return Q(0), (), ()
        reduced.append(g)
        i += 1
    if coeff == 0:
        return Q(0), (), ()
    return coeff, tuple(sorted(params.items())), tuple(reduced)


def oracle_product(factors):
    """SuperPoly for a product of single generators, via the oracle."""
    coeff, params, word = oracle_word(factors)
    if coeff == 0:
        return SuperPoly.zero()
    out = SuperPoly.scalar(coeff)
    for n, e in params:
        out = out * SuperPoly.param(n, e)
    for g in word:
        out = out * SuperPoly.from_gen(g)
    return out


# ---------------------------------------------------------------------------
# directed identities


def test_odd_jets_anticommute():
    a, c = jp(f), jp(f, m=1)
    assert (a * c + c * a).is_zero
    assert not (a * c).is_zero


def test_odd_square_vanishes():
    assert (jp(f) * jp(f)).is_zero
    assert (jp(f, m=3) * jp(f, m=3)).is_zero
    assert (jp(b, d1=1) * jp(b, d1=1)).is_zero  # D-derivative of even is odd


def test_theta_relations():
    t1, t2 = SuperPoly.from_gen(Theta(1)), SuperPoly.from_gen(Theta(2))
    assert (t1 * t1).is_zero
    assert (t1 * t2 + t2 * t1).is_zero


def test_clifford_square_is_declared_parameter():
    v = Clifford("v", (Q(1), (("alpha", 1),)))
    p = SuperPoly.from_gen(v)
    assert p * p == SuperPoly.param("alpha")


def test_clifford_conjugation_sign():
    # v * f * v = -alpha * f for odd f: one transposition then the square.
    v = Clifford("v", (Q(1), (("alpha", 1),)))
    pv = SuperPoly.from_gen(v)
    assert pv * jp(f) * pv == SuperPoly.scalar(-1) * SuperPoly.param("alpha") * jp(f)


def test_even_jets_commute():
    x, y = jp(b), jp(b, m=2)
    assert x * y == y * x
    assert (x * x) * y == x * (x * y)


def test_even_odd_commute():
    assert jp(b) * jp(f) == jp(f) * jp(b)


def test_laurent_parameters():
    a = SuperPoly.param("alpha")
    ainv = SuperPoly.param("alpha", -1)
    assert a * ainv == SuperPoly.one()
    assert SuperPoly.param("alpha", 2) * ainv == a


def test_scalar_arithmetic():
    two = SuperPoly.scalar(2)
    half = SuperPoly.scalar(Q(1, 2))
    assert two * half == SuperPoly.one()
    assert (two - two).is_zero
    assert (-two + two).is_zero
    assert two ** 3 == SuperPoly.scalar(8)


def test_parity_classification():
    assert jp(b).parity() == EVEN
    assert jp(f).parity() == ODD
    assert (jp(f) * jp(f, m=1)).parity() == EVEN
    assert (jp(b) + jp(f)).parity() is None
    even_part, odd_part = (jp(b) + jp(f)).parity_report()
    assert even_part == jp(b) and odd_part == jp(f)
    assert parity_of(SuperPoly.zero()) == EVEN  # zero counts as even


def test_n2_jet_directions():
    g = JetVar(u2, 1, 1, 0)
    assert g.parity == EVEN
    with pytest.raises(ValueError):
        JetVar(b, 0, 1, 0)  # b has a single odd direction
    with pytest.raises(ValueError):
        JetVar(b, 2, 0, 0)  # direction indices are 0/1


def test_normalize_merges_raw_terms():
    g = JetVar(b)
    p = normalize([(Q(1), (g,)), (Q(2), (g,)), (Q(-3), (g,))])
    assert p.is_zero


def test_function_factor_requires_even_zero_order_argument():
    q = SuperPoly.func("Q", 0, JetVar(b))
    assert q.parity() == EVEN
    with pytest.raises(ValueError):
        SuperPoly.func("Q", 0, JetVar(f))
    with pytest.raises(ValueError):
        SuperPoly.func("Q", 0, JetVar(b, m=1))


# ---------------------------------------------------------------------------
# randomized cross-check against the oracle

GENS = [
    Theta(1),
    Theta(2),
    Clifford("v", (Q(1), (("alpha", 1),))),
    JetVar(f),
    JetVar(f, m=1),
    JetVar(f, d1=1),
    JetVar(b),
    JetVar(b, m=2),
    JetVar(b, d1=1),
    JetVar(u2, 1, 1, 0),
    JetVar(u2, 0, 1, 1),
]


def test_products_match_oracle(rng):
    for _ in range(400):
        k = rng.randint(0, 6)
        word = [rng.choice(GENS) for _ in range(k)]
        engine = prod(word)
        assert engine == oracle_product(word), word


def test_associativity_random(rng):
    for _ in range(200):
        a, b_, c = (prod([rng.choice(GENS) for _ in range(rng.randint(1, 3))])
                    for _ in range(3))
        assert (a * b_) * c == a * (b_ * c)


def test_distributivity_random(rng):
    for _ in range(200):
        a, b_, c = (prod([rng.choice(GENS) for _ in range(rng.randint(1, 3))])
                    for _ in range(3))
        assert a * (b_ + c) == a * b_ + a * c
