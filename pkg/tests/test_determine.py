"""Determining-equation solver: symmetry searches and linear algebra paths."""

from fractions import Fraction

import pytest

from superjet.algebra import EVEN, ODD, FieldSymbol, JetVar, SuperPoly
from superjet.determine import (
    extract_linear_system,
    find_symmetries,
    flows_proportional,
    solve_linear,
)

from conftest import cached_entry

Q = Fraction

NONZERO = ("alpha", "beta", "gamma")


@pytest.fixture(scope="module")
def embed():
    doc = cached_entry("bous-embed").doc
    return doc, doc.system(), doc.weight_system()


def test_even_search_recovers_the_catalogued_flow(embed):
    doc, sys, ws = embed
    res = find_symmetries(sys, ws, Q(-4), EVEN, assume_nonzero=NONZERO)
    assert len(res.flows) == 1
    assert flows_proportional(res.flows[0], doc.flows["eq5_4"])


def test_odd_search_recovers_the_catalogued_flow(embed):
    doc, sys, ws = embed
    res = find_symmetries(sys, ws, Q(-7, 2), ODD, assume_nonzero=NONZERO)
    assert len(res.flows) == 1
    assert flows_proportional(res.flows[0], doc.flows["eq5_5"])


def test_translation_slots(embed):
    doc, sys, ws = embed
    # weight -1: the x-translation only
    res = find_symmetries(sys, ws, Q(-1), EVEN, assume_nonzero=NONZERO)
    assert len(res.flows) == 1
    from superjet.jets import Flow

    translation = Flow(
        {u: SuperPoly.from_gen(JetVar(u, 0, 0, 1)) for u in sys.fields}, EVEN
    )
    assert flows_proportional(res.flows[0], translation)
    # weight -2: the time flow only
    res2 = find_symmetries(sys, ws, Q(-2), EVEN, assume_nonzero=NONZERO)
    assert len(res2.flows) == 1
    assert flows_proportional(res2.flows[0], sys.as_flow())


def test_empty_slot_returns_nothing(embed):
    doc, sys, ws = embed
    res = find_symmetries(sys, ws, Q(-3), EVEN, assume_nonzero=NONZERO)
    assert res.flows == []


def test_rational_and_parametric_paths_agree():
    """The same solution space must come out of the sparse rational
    elimination and the parametric (symbolic-pivot) route."""
    b = FieldSymbol("b", EVEN, 1)
    jb = SuperPoly.from_gen(JetVar(b))
    jbx = SuperPoly.from_gen(JetVar(b, m=1))
    names = ["c0", "c1", "c2", "c3"]
    c = {n: SuperPoly.param(n) for n in names}
    polys = [
        (c["c0"] + SuperPoly.scalar(2) * c["c1"] - c["c2"]) * jb
        + (c["c1"] + c["c2"]) * jbx,
        (c["c0"] - c["c3"]) * jb,
    ]
    plain = solve_linear(extract_linear_system(polys, names), names)
    a = SuperPoly.param("alpha")
    scaled = solve_linear(
        extract_linear_system([a * p for p in polys], names),
        names,
        assume_nonzero=("alpha",),
    )
    assert len(plain) == len(scaled) == 1
    assert len(plain[0].basis) == len(scaled[0].basis) == 1
    # both bases span the same space: check each vector of one satisfies
    # the original equations and is a combination of the other basis
    eqs = extract_linear_system(polys, names)
    for sol in (plain[0], scaled[0]):
        for vec in sol.basis:
            for eq in eqs:
                total = SuperPoly.zero()
                for n, coeff in eq.coeffs.items():
                    total = total + coeff * vec.get(n, SuperPoly.zero())
                total = total + eq.const
                assert total.is_zero


def test_inconsistent_system_has_no_solutions():
    names = ["c0"]
    c0 = SuperPoly.param("c0")
    one = SuperPoly.one()
    # c0 = 0 and c0 = 1 simultaneously
    polys = [c0, c0 - one]
    branches = solve_linear(extract_linear_system(polys, names), names)
    assert branches == [] or all(b is None for b in branches)
