"""Variational calculus: Euler operator, conserved densities, Hamiltonian flows."""

from fractions import Fraction

from superjet.algebra import D1, DX, JetVar, SuperPoly, prod
from superjet.jets import check_symmetry, super_derive
from superjet.variational import (
    conservation_residuals,
    euler,
    hamiltonian_flow,
    is_conserved,
)

from conftest import cached_entry

Q = Fraction


def _random_density(rng, fields, max_len=3):
    gens = [
        JetVar(u, d1, 0, m)
        for u in fields
        for d1 in (0, 1) if d1 <= u.n_susy
        for m in (0, 1, 2)
    ]
    word = [rng.choice(gens) for _ in range(rng.randint(1, max_len))]
    return prod(word, Q(rng.randint(-4, 4) or 1, rng.randint(1, 3)))


def test_euler_annihilates_total_x_derivatives(rng):
    fields = cached_entry("dbous").doc.system().fields
    count = 0
    while count < 100:
        p = _random_density(rng, fields)
        dp = super_derive(p, DX)
        if dp.is_zero:
            continue
        count += 1
        assert all(v.is_zero for v in euler(dp, fields).values())


def test_euler_annihilates_super_derivatives(rng):
    fields = cached_entry("dbous").doc.system().fields
    count = 0
    while count < 100:
        p = _random_density(rng, fields)
        dp = super_derive(p, D1)
        if dp.is_zero:
            continue
        count += 1
        assert all(v.is_zero for v in euler(dp, fields).values())


def test_euler_on_directed_examples():
    doc = cached_entry("pskdv").doc
    b = doc.fields["b"]
    grad = euler(doc.poly("1/2*b^2"), (b,))
    assert grad[b] == doc.poly("b")
    # integration by parts: b*b_xx and -b_x*b_x have the same gradient
    g1 = euler(doc.poly("b*b_xx"), (b,))
    g2 = euler(doc.poly("-1*b_x*b_x"), (b,))
    assert g1[b] == g2[b] == doc.poly("2*b_xx")


def test_conserved_densities_of_potential_equation():
    doc = cached_entry("pskdv").doc
    sys = doc.system()
    assert is_conserved(sys, doc.functionals["rho1"])
    assert is_conserved(sys, doc.functionals["rho2"])
    assert not is_conserved(sys, doc.poly("1/3*b^3"))
    res = conservation_residuals(sys, doc.poly("1/3*b^3"))
    assert any(not v.is_zero for v in res.values())


def test_hydrodynamic_system_is_hamiltonian():
    e = cached_entry("hydro-bous")
    doc = e.doc
    sys = doc.system()
    op = e.extras["make_operator"](sys.fields)
    fl = hamiltonian_flow(op, doc.functionals["H"])
    for u in sys.fields:
        assert (fl.components[u] - sys.rhs[u]).is_zero


def test_hamiltonian_hierarchy_of_susy_boussinesq():
    e = cached_entry("dbous")
    doc = e.doc
    sys = doc.system()
    op = e.extras["make_operator"](tuple(doc.fields[n] for n in ("f", "b")))
    # the two lowest functionals are Casimirs
    assert hamiltonian_flow(op, doc.functionals["H1_0"]).is_zero
    assert hamiltonian_flow(op, doc.functionals["H2_0"]).is_zero
    # the next ones generate the recorded symmetries
    for nm, want in (
        ("H1_1", "seed_x"),
        ("H2_1", "seed_t"),
        ("H1_2", "eq4_9_x"),
        ("H2_2", "eq4_9_t"),
    ):
        fl = hamiltonian_flow(op, doc.functionals[nm])
        assert check_symmetry(sys, fl).is_zero, nm
        assert (fl - doc.flows[want]).is_zero, nm
