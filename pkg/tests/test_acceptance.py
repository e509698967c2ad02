"""End-to-end acceptance suite.

Eleven numbered criteria, each an exact (zero-tolerance) symbolic check
against the built-in catalog.  Every test prints a single PASS/FAIL line
(visible with ``pytest -s`` and in failure reports).
"""

import random
from fractions import Fraction

from superjet import catalog
from superjet.algebra import (
    D1,
    DX,
    EVEN,
    ODD,
    FieldSymbol,
    JetVar,
    SuperPoly,
    prod,
)
from superjet.determine import find_symmetries, flows_proportional
from superjet.coverings import covering_is_consistent, derived_equation_check
from superjet.gardner import (
    deformation_is_valid,
    density_recurrence,
    search_deformation,
    specialize_deformation,
)
from superjet.jets import (
    Flow,
    check_symmetry,
    commutator,
    component_expand,
    dt_apply,
    substitute,
    super_derive,
)
from superjet.recursion import (
    apply_shadow,
    flow_order,
    is_local,
    iterate,
    nilpotency_order,
    shadow_is_valid,
    shadow_power,
)
from superjet.variational import euler, hamiltonian_flow, is_conserved
from superjet.weights import infer_weights

from conftest import cached_entry

Q = Fraction
NONZERO = ("alpha", "beta", "gamma")


def _report(number, label, ok):
    print(f"criterion {number:02d} {label}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {number} ({label}) failed"


# ---------------------------------------------------------------------------
# 1. symmetry verifications


def _function_symbol_flows():
    """Commuting flows built from a free function symbol and its derivative."""
    b = FieldSymbol("b", EVEN, 0)
    f = FieldSymbol("f", ODD, 0)
    jb = lambda m=0: SuperPoly.from_gen(JetVar(b, 0, 0, m))
    jf = lambda m=0: SuperPoly.from_gen(JetVar(f, 0, 0, m))
    P = SuperPoly.param

    def flow(name):
        q0 = SuperPoly.func(name, 0, JetVar(b))
        q1 = SuperPoly.func(name, 1, JetVar(b))
        fs = P("alpha") * jf(1) * q0 + P("gamma") * jb(1) * jf() * q1 \
            + P("delta") * jf() * jb() * jb() * q1
        bs = P("alpha") * jb(1) * q0 + P("beta") * jf(1) * jf() * q1
        return Flow({f: fs, b: bs}, EVEN)

    return flow("Q"), flow("S")


def test_criterion_01_symmetry_verifications():
    ok = True
    br = cached_entry("burgers-repr").doc
    for nm in ("eq3_4_x", "eq3_4_t", "eq3_5"):
        ok = ok and check_symmetry(br.system(), br.flows[nm]).is_zero
    be = cached_entry("bous-embed").doc
    for nm in ("eq5_4", "eq5_5"):
        ok = ok and check_symmetry(be.system(), be.flows[nm]).is_zero
    n2 = cached_entry("n2burgers").doc
    ok = ok and check_symmetry(n2.system(), n2.flows["skdv4"]).is_zero
    s4 = cached_entry("skdv4").doc
    ok = ok and check_symmetry(s4.system(), s4.flows["burg"]).is_zero
    fq, fs = _function_symbol_flows()
    ok = ok and commutator(fq, fs).is_zero
    _report(1, "symmetry-verifications", ok)


# ---------------------------------------------------------------------------
# 2. shadow verifications


def test_criterion_02_shadow_verifications():
    ok = True
    for entry_id, doc_name, names in (
        ("burgers-repr", "main", ("R",)),
        ("skdv-a", "main", ("R",)),
        ("skdv-b", "main", ("R",)),
        ("skdv-c", "main", ("R",)),
        ("superburg", "alpha0", ("R1", "R2")),
        ("superburg", "main", ("R1", "R2")),
        ("hospital-1", "main", ("R1", "R2", "R3")),
        ("dbous", "main", ("R",)),
    ):
        doc = cached_entry(entry_id).docs[doc_name]
        for nm in names:
            ok = ok and shadow_is_valid(doc.shadows[nm])
    _report(2, "shadow-verifications", ok)


# ---------------------------------------------------------------------------
# 3. recursion application with recorded scales


def test_criterion_03_recursion_application():
    ok = True
    e = cached_entry("burgers-repr")
    doc = e.doc
    ws = doc.weight_system()
    for seed, target, fixture in (
        ("seed_x", "eq3_4_x", "R-on-fx"),
        ("seed_t", "eq3_4_t", "R-on-ft"),
        ("seed_susy", "eq3_5", "R-on-susy"),
    ):
        out = apply_shadow(doc.shadows["R"], doc.flows[seed], ws)
        ok = ok and (out - doc.flows[target].scaled(e.scales[fixture])).is_zero
    ea = cached_entry("skdv-a")
    da = ea.doc
    out = apply_shadow(da.shadows["R"], da.flows["seed_x"], da.weight_system())
    ok = ok and ea.scales["R-on-fx"] == Q(3)
    ok = ok and (out - da.flows["eq_rhs"].scaled(Q(3))).is_zero
    _report(3, "recursion-application", ok)


# ---------------------------------------------------------------------------
# 4. constant differential order under iteration


def test_criterion_04_constant_order_iteration():
    e = cached_entry("dbous")
    doc = e.doc
    ws = doc.weight_system()
    sys = doc.system()
    ok = True
    for seed in ("seed_x", "seed_t"):
        flows = iterate(doc.shadows["R"], doc.flows[seed], 4, ws)
        for fl in flows:
            ok = ok and is_local(fl)
            ok = ok and check_symmetry(sys, fl).is_zero
            ok = ok and flow_order(fl) == 2
    _report(4, "constant-order-iteration", ok)


# ---------------------------------------------------------------------------
# 5. nilpotency


def test_criterion_05_nilpotency():
    doc = cached_entry("hospital-1").doc
    r1, r2, r3 = doc.shadows["R1"], doc.shadows["R2"], doc.shadows["R3"]
    ok = shadow_power(r1, 4).is_zero and shadow_power(r3, 4).is_zero
    # these zero-order shadows already square to zero, so the least
    # vanishing power is 2 (no cube can be nonzero); see the repository
    # notes for the discussion of this sharpening
    ok = ok and nilpotency_order(r1, 6) == 2
    ok = ok and nilpotency_order(r3, 6) == 2
    ok = ok and nilpotency_order(r2, 4) is None
    _report(5, "nilpotency", ok)


# ---------------------------------------------------------------------------
# 6. parametric deformations


def test_criterion_06_gardner():
    ok = True
    es = cached_entry("skdv")
    ok = ok and deformation_is_valid(
        es.doc.system(), es.extras["extended"], es.extras["miura"]
    )
    eh = cached_entry("hydro-bous")
    main = eh.doc
    ok = ok and deformation_is_valid(
        main.system(), eh.extras["extended"], eh.extras["miura"]
    )
    corr = eh.extras["correspondence"]
    (b, w1), (c, w2) = corr
    rows = density_recurrence(eh.extras["miura"], corr, "eps", 4)
    for wf, nm in ((w1, "w1"), (w2, "w2")):
        for k in range(3):
            ok = ok and (rows[wf][k] - eh.extras["densities"][nm][k]).is_zero
        for rho in rows[wf]:
            ok = ok and is_conserved(main.system(), rho)
    found = search_deformation(
        main.system(), main.weight_system(), main.functionals["H"], "eps", Q(-3), 2
    )
    hit = False
    for d in found:
        cand = d
        if cand.free_params:
            cand = specialize_deformation(d, {n: Q(1, 6) for n in d.free_params})
        rename = {
            w1: SuperPoly.from_gen(JetVar(cand.fields[0])),
            w2: SuperPoly.from_gen(JetVar(cand.fields[1])),
        }
        if all(
            (cand.miura[u] - substitute(eh.extras["miura"][u], rename)).is_zero
            for u in (b, c)
        ):
            hit = True
    _report(6, "gardner-deformations", ok and hit)


# ---------------------------------------------------------------------------
# 7. variational calculus


def test_criterion_07_variational():
    rng = random.Random(7)
    fields = cached_entry("dbous").doc.system().fields
    gens = [
        JetVar(u, d1, 0, m)
        for u in fields
        for d1 in (0, 1)
        for m in (0, 1, 2)
    ]
    ok = True
    count = 0
    while count < 100:
        word = [rng.choice(gens) for _ in range(rng.randint(1, 3))]
        p = prod(word, Q(rng.randint(-4, 4) or 1, rng.randint(1, 3)))
        if p.is_zero:
            continue
        count += 1
        for direction in (DX, D1):
            dp = super_derive(p, direction)
            ok = ok and all(v.is_zero for v in euler(dp, fields).values())
    eh = cached_entry("hydro-bous")
    sysh = eh.doc.system()
    fl = hamiltonian_flow(eh.extras["make_operator"](sysh.fields),
                          eh.doc.functionals["H"])
    ok = ok and all((fl.components[u] - sysh.rhs[u]).is_zero for u in sysh.fields)
    ed = cached_entry("dbous")
    dd = ed.doc
    sysd = dd.system()
    op = ed.extras["make_operator"](tuple(dd.fields[n] for n in ("f", "b")))
    ok = ok and hamiltonian_flow(op, dd.functionals["H1_0"]).is_zero
    ok = ok and hamiltonian_flow(op, dd.functionals["H2_0"]).is_zero
    for nm, want in (
        ("H1_1", "seed_x"),
        ("H2_1", "seed_t"),
        ("H1_2", "eq4_9_x"),
        ("H2_2", "eq4_9_t"),
    ):
        flh = hamiltonian_flow(op, dd.functionals[nm])
        ok = ok and check_symmetry(sysd, flh).is_zero
        ok = ok and (flh - dd.flows[want].scaled(ed.scales["hamiltonian-flows"])).is_zero
    _report(7, "variational-calculus", ok)


# ---------------------------------------------------------------------------
# 8. symmetry search and exhaustive scan


def test_criterion_08_symmetry_search():
    doc = cached_entry("bous-embed").doc
    sys, ws = doc.system(), doc.weight_system()
    res4 = find_symmetries(sys, ws, Q(-4), EVEN, assume_nonzero=NONZERO)
    ok = len(res4.flows) == 1 and flows_proportional(res4.flows[0], doc.flows["eq5_4"])
    res7 = find_symmetries(sys, ws, Q(-7, 2), ODD, assume_nonzero=NONZERO)
    ok = ok and len(res7.flows) == 1
    ok = ok and flows_proportional(res7.flows[0], doc.flows["eq5_5"])
    # exhaustive scan: in weights -1/2 .. -5 (both parities) the only
    # symmetries are the two translations and the two flows above
    translation = Flow(
        {u: SuperPoly.from_gen(JetVar(u, 0, 0, 1)) for u in sys.fields}, EVEN
    )
    known = {
        (Q(-1), EVEN): translation,
        (Q(-2), EVEN): sys.as_flow(),
        (Q(-4), EVEN): doc.flows["eq5_4"],
        (Q(-7, 2), ODD): doc.flows["eq5_5"],
    }
    for num in range(1, 11):
        w = -Q(num, 2)
        for par in (EVEN, ODD):
            res = find_symmetries(sys, ws, w, par, assume_nonzero=NONZERO)
            if (w, par) in known:
                ok = ok and len(res.flows) == 1
                ok = ok and flows_proportional(res.flows[0], known[(w, par)])
            else:
                ok = ok and res.flows == []
    _report(8, "symmetry-search", ok)


# ---------------------------------------------------------------------------
# 9. weight inference


def test_criterion_09_weights():
    ok = True
    sol = infer_weights(cached_entry("burgers-repr").doc.system())
    ok = ok and sol is not None and sol.unique
    ok = ok and sol.particular == {"f": Q(1, 2), "b": Q(1, 2), "t": Q(-1, 2)}
    dd = cached_entry("dbous").doc
    sold = infer_weights(dd.system(), fixed={"t": dd.t_weight})
    declared = {u.name: w for u, w in dd.field_weights.items()}
    declared["t"] = dd.t_weight
    ok = ok and sold is not None and sold.unique and sold.particular == declared
    sols = infer_weights(cached_entry("superburg").doc.system(),
                         param_names=("alpha",))
    ok = ok and sols is not None
    ok = ok and sols.satisfies({"f": Q(1), "alpha": Q(1, 2)}, Q(1))
    _report(9, "weight-inference", ok)


# ---------------------------------------------------------------------------
# 10. coverings and component expansions


def test_criterion_10_coverings_and_components():
    ok = True
    for entry_id in catalog.ids():
        e = cached_entry(entry_id)
        for doc in e.docs.values():
            if doc.nonlocals:
                ok = ok and covering_is_consistent(doc.covering())
    sb = cached_entry("superburg").doc
    w, vt = sb.nonlocals["w"], sb.nonlocals["vt"]
    rhs = {
        w: sb.poly("Dx(Dx(w)) + Dx(vt)*Dx(w)"),
        vt: sb.poly("Dx(Dx(vt)) + 1/2*Dx(vt)^2"),
    }
    res = derived_equation_check(sb.covering(), rhs)
    ok = ok and all(r.is_zero for r in res.values())
    # component expansion of the two-direction system
    rows = catalog.verify("n2burgers")
    ok = ok and all(row[1] for row in rows if row[0] == "component-expansion")
    # Clifford-auxiliary expansion of the scalar equation
    rows = catalog.verify("superburg")
    ok = ok and all(row[1] for row in rows if row[0] == "theta-expansion")
    _report(10, "coverings-and-components", ok)


# ---------------------------------------------------------------------------
# 11. engine properties


def test_criterion_11_engine_properties():
    ok = True
    # parser round trip over the whole catalog
    from superjet.grammar import parse_expression, print_poly

    for entry_id in catalog.ids():
        e = cached_entry(entry_id)
        for doc in e.docs.values():
            polys = list(doc.equations.values()) + list(doc.functionals.values())
            for wsym in doc.nonlocals.values():
                polys.extend(wsym.defs.values())
            for flow in doc.flows.values():
                polys.extend(flow.components.values())
            for p in polys:
                ok = ok and parse_expression(print_poly(p), doc.scope) == p

    rng = random.Random(11)
    b = FieldSymbol("b", EVEN, 1)
    f = FieldSymbol("f", ODD, 1)
    gens = [JetVar(b, d1, 0, m) for d1 in (0, 1) for m in (0, 1, 2)] + [
        JetVar(f, d1, 0, m) for d1 in (0, 1) for m in (0, 1, 2)
    ]

    def monomial():
        word = [rng.choice(gens) for _ in range(rng.randint(0, 4))]
        return prod(word, Q(rng.randint(-4, 4) or 1, rng.randint(1, 3)))

    def poly():
        out = SuperPoly.zero()
        for _ in range(rng.randint(1, 3)):
            out = out + monomial()
        return out

    # graded commutativity (200 cases)
    for _ in range(200):
        a, c = monomial(), monomial()
        if a.is_zero or c.is_zero:
            ok = ok and (a * c).is_zero and (c * a).is_zero
            continue
        sign = -1 if (a.parity() == ODD and c.parity() == ODD) else 1
        ok = ok and a * c == SuperPoly.scalar(sign) * (c * a)

    # the odd direction squares to Dx (200 cases)
    for _ in range(200):
        p = poly()
        ok = ok and super_derive(super_derive(p, D1), D1) == super_derive(p, DX)

    # evolution commutes with Dx (200 cases)
    sys = cached_entry("burgers-repr").doc.system()
    sgens = [
        JetVar(u, d1, 0, m) for u in sys.fields for d1 in (0, 1) for m in (0, 1)
    ]
    for _ in range(200):
        word = [rng.choice(sgens) for _ in range(rng.randint(1, 3))]
        p = prod(word, Q(rng.randint(-4, 4) or 1, rng.randint(1, 3)))
        ok = ok and dt_apply(sys, super_derive(p, DX)) == super_derive(
            dt_apply(sys, p), DX
        )
    _report(11, "engine-properties", ok)
