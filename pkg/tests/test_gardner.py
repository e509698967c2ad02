"""Parametric deformations and the conserved-density recurrence."""

from fractions import Fraction

from superjet.algebra import JetVar, SuperPoly
from superjet.gardner import (
    deformation_is_valid,
    density_recurrence,
    search_deformation,
    specialize_deformation,
    verify_deformation,
)
from superjet.jets import substitute
from superjet.variational import is_conserved

from conftest import cached_entry

Q = Fraction


def test_susy_kdv_deformation_is_valid():
    e = cached_entry("skdv")
    base = e.doc.system()
    assert deformation_is_valid(base, e.extras["extended"], e.extras["miura"])


def test_hydrodynamic_deformation_is_valid():
    e = cached_entry("hydro-bous")
    base = e.doc.system()
    assert deformation_is_valid(base, e.extras["extended"], e.extras["miura"])


def test_perturbed_miura_map_fails():
    e = cached_entry("hydro-bous")
    base = e.doc.system()
    miura = dict(e.extras["miura"])
    (b, w1), (c, w2) = e.extras["correspondence"]
    miura[b] = miura[b] + SuperPoly.param("eps") * SuperPoly.from_gen(JetVar(w2))
    res = verify_deformation(base, e.extras["extended"], miura)
    assert any(not r.is_zero for r in res.values())


def test_density_recurrence_matches_recorded_table():
    e = cached_entry("hydro-bous")
    (b, w1), (c, w2) = e.extras["correspondence"]
    rows = density_recurrence(e.extras["miura"], e.extras["correspondence"], "eps", 2)
    for wf, nm in ((w1, "w1"), (w2, "w2")):
        assert len(rows[wf]) == 3
        for k in range(3):
            assert (rows[wf][k] - e.extras["densities"][nm][k]).is_zero, (nm, k)


def test_recurrence_densities_are_conserved_through_order_four():
    e = cached_entry("hydro-bous")
    sys = e.doc.system()
    rows = density_recurrence(e.extras["miura"], e.extras["correspondence"], "eps", 4)
    for row in rows.values():
        assert len(row) == 5
        for rho in row:
            assert is_conserved(sys, rho)


def test_search_recovers_the_recorded_deformation():
    e = cached_entry("hydro-bous")
    doc = e.doc
    ws = doc.weight_system()
    found = search_deformation(doc.system(), ws, doc.functionals["H"], "eps", Q(-3), 2)
    assert found
    (b, w1), (c, w2) = e.extras["correspondence"]
    miura = e.extras["miura"]
    hit = False
    for d in found:
        cand = d
        if cand.free_params:
            cand = specialize_deformation(d, {n: Q(1, 6) for n in d.free_params})
        rename = {
            w1: SuperPoly.from_gen(JetVar(cand.fields[0])),
            w2: SuperPoly.from_gen(JetVar(cand.fields[1])),
        }
        if all((cand.miura[u] - substitute(miura[u], rename)).is_zero for u in (b, c)):
            hit = True
            # the specialized extension must still satisfy the Miura condition
            assert deformation_is_valid(doc.system(), cand.extended, cand.miura)
    assert hit
