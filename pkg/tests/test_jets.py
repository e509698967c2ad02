"""Derivations on jet space: Leibniz rules, direction algebra, flows."""

from fractions import Fraction

from superjet.algebra import (
    D1,
    D2,
    DX,
    EVEN,
    ODD,
    FieldSymbol,
    JetVar,
    SuperPoly,
    prod,
)
from superjet.jets import (
    Flow,
    check_symmetry,
    commutator,
    dt_apply,
    evolutionary_apply,
    jet_poly,
    nonlocal_jet,
    substitute,
    substitute_params,
    super_derive,
)

from conftest import cached_entry

Q = Fraction

b = FieldSymbol("b", EVEN, 1)
f = FieldSymbol("f", ODD, 1)
u2 = FieldSymbol("u", EVEN, 2)

GENS1 = [JetVar(b, d1, 0, m) for d1 in (0, 1) for m in (0, 1, 2)] + [
    JetVar(f, d1, 0, m) for d1 in (0, 1) for m in (0, 1, 2)
]
GENS2 = [JetVar(u2, d1, d2, m) for d1 in (0, 1) for d2 in (0, 1) for m in (0, 1)]


def random_monomial(rng, gens):
    word = [rng.choice(gens) for _ in range(rng.randint(1, 3))]
    return prod(word, Q(rng.randint(-3, 3) or 1, rng.randint(1, 3)))


def random_poly(rng, gens):
    out = SuperPoly.zero()
    for _ in range(rng.randint(1, 3)):
        out = out + random_monomial(rng, gens)
    return out


# ---------------------------------------------------------------------------
# direction algebra


def test_super_derivative_squares_to_dx(rng):
    for _ in range(100):
        p = random_poly(rng, GENS1)
        assert super_derive(super_derive(p, D1), D1) == super_derive(p, DX)


def test_two_directions_anticommute(rng):
    for _ in range(100):
        p = random_poly(rng, GENS2)
        d12 = super_derive(super_derive(p, D2), D1)
        d21 = super_derive(super_derive(p, D1), D2)
        assert (d12 + d21).is_zero
        assert super_derive(super_derive(p, D2), D2) == super_derive(p, DX)


def test_left_leibniz_rule(rng):
    for direction in (D1, DX):
        for _ in range(100):
            a = random_monomial(rng, GENS1)
            c = random_monomial(rng, GENS1)
            pa = a.parity()
            lhs = super_derive(a * c, direction)
            sign = 1
            if direction == D1 and pa == ODD:
                sign = -1
            rhs = super_derive(a, direction) * c + SuperPoly.scalar(sign) * a * super_derive(c, direction)
            assert lhs == rhs


def test_dx_commutes_with_d1(rng):
    for _ in range(100):
        p = random_poly(rng, GENS1)
        assert super_derive(super_derive(p, D1), DX) == super_derive(
            super_derive(p, DX), D1
        )


# ---------------------------------------------------------------------------
# evolution and flows


def test_time_derivation_commutes_with_dx(rng):
    sys = cached_entry("burgers-repr").doc.system()
    gens = [JetVar(u, d1, 0, m) for u in sys.fields for d1 in (0, 1) for m in (0, 1)]
    for _ in range(60):
        p = random_poly(rng, gens)
        assert dt_apply(sys, super_derive(p, DX)) == super_derive(dt_apply(sys, p), DX)


def test_time_derivation_commutes_with_d1(rng):
    sys = cached_entry("skdv").doc.system()
    gens = [JetVar(u, d1, 0, m) for u in sys.fields for d1 in (0, 1) for m in (0, 1)]
    for _ in range(60):
        p = random_poly(rng, gens)
        assert dt_apply(sys, super_derive(p, D1)) == super_derive(dt_apply(sys, p), D1)


def test_check_symmetry_matches_commutator():
    doc = cached_entry("burgers-repr").doc
    sys = doc.system()
    good = doc.flows["eq3_4_x"]
    assert check_symmetry(sys, good).is_zero
    assert commutator(sys.as_flow(), good).is_zero
    # a perturbed flow must fail both ways
    bad = Flow(
        {u: good.components[u] + jet_poly(u, m=1) * jet_poly(sys.fields[1])
         for u in sys.fields},
        good.parameter_parity,
    )
    assert not check_symmetry(sys, bad).is_zero
    assert not commutator(sys.as_flow(), bad).is_zero


def test_evolutionary_derivation_is_even_leibniz(rng):
    flow = cached_entry("burgers-repr").doc.flows["eq3_4_x"]
    gens = [JetVar(u, d1, 0, m) for u in flow.components for d1 in (0, 1) for m in (0, 1)]
    for _ in range(60):
        a = random_monomial(rng, gens)
        c = random_monomial(rng, gens)
        assert evolutionary_apply(flow, a * c) == evolutionary_apply(
            flow, a
        ) * c + a * evolutionary_apply(flow, c)


# ---------------------------------------------------------------------------
# substitution and nonlocal jets


def test_substitute_identity(rng):
    for _ in range(40):
        p = random_poly(rng, GENS1)
        mapping = {b: SuperPoly.from_gen(JetVar(b)), f: SuperPoly.from_gen(JetVar(f))}
        assert substitute(p, mapping) == p


def test_substitute_respects_chain_rule():
    # map b -> b^2: Dx must act through the substitution
    p = SuperPoly.from_gen(JetVar(b, m=1))
    mapping = {b: SuperPoly.from_gen(JetVar(b)) ** 2}
    want = SuperPoly.scalar(2) * SuperPoly.from_gen(JetVar(b)) * SuperPoly.from_gen(
        JetVar(b, m=1)
    )
    assert substitute(p, mapping) == want


def test_substitute_params():
    p = SuperPoly.param("alpha") * SuperPoly.from_gen(JetVar(b)) + SuperPoly.param(
        "alpha", 2
    )
    out = substitute_params(p, {"alpha": Q(1, 2)})
    want = SuperPoly.scalar(Q(1, 2)) * SuperPoly.from_gen(JetVar(b)) + SuperPoly.scalar(
        Q(1, 4)
    )
    assert out == want


def test_nonlocal_jets_reduce_to_declared_values():
    doc = cached_entry("skdv-a").doc
    for w in doc.nonlocals.values():
        for direction, value in w.defs.items():
            if direction == DX:
                assert nonlocal_jet(w, m=1) == value
            elif direction == D1:
                assert nonlocal_jet(w, d1=1) == value
        # second derivatives agree regardless of the reduction path
        if D1 in w.defs:
            assert nonlocal_jet(w, m=1) == super_derive(w.defs[D1], D1)


def test_nonlocal_bare_jet_stays_symbolic():
    doc = cached_entry("skdv-a").doc
    for w in doc.nonlocals.values():
        assert nonlocal_jet(w) == SuperPoly.from_gen(JetVar(w))
