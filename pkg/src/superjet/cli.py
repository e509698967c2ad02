"""Command-line interface: parsing, derivation, verification and search
commands over documents and the built-in catalog.

Exit codes: 0 = verified / zero residual, 1 = nonzero residual or
negative result, 2 = usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import catalog
from .algebra import D1, D2, DX, EVEN, ODD, SuperPoly
from .coverings import check_covering
from .determine import find_symmetries
from .gardner import (
    density_recurrence,
    search_deformation,
    verify_deformation,
)
from .grammar import (
    SyntaxErrorWithPos,
    UndeclaredSymbolError,
    parse_document,
    parse_expression,
    print_flow,
    print_poly,
)
from .jets import (
    JetVar,
    check_symmetry,
    clifford_expand,
    commutator,
    dt_apply,
    super_derive,
    substitute,
)
from .recursion import (
    NotIntegrableError,
    NotLocalError,
    apply_shadow,
    d_integrate,
    nilpotency_order,
    verify_shadow,
)
from .variational import HamiltonianOperator, euler, hamiltonian_flow
from .weights import infer_weights

Q = Fraction

_DIRECTIONS = {"D": D1, "D1": D1, "D2": D2, "Dx": DX}


class UsageError(Exception):
    pass


def _norm_name(s: str) -> str:
    return re.sub(r"[^a-z0-9]+", "", s.lower())


def _lookup(table, name, what):
    for k, v in table.items():
        if _norm_name(k) == _norm_name(name):
            return v
    raise UsageError(f"unknown {what} {name!r}; known: {', '.join(table)}")


def _load_doc(args):
    if getattr(args, "catalog", None):
        entry = catalog.get(args.catalog)
        docs = entry.docs
        name = getattr(args, "doc", None) or "main"
        if name not in docs:
            raise UsageError(
                f"entry {args.catalog} has documents: {', '.join(docs)}"
            )
        return docs[name], entry
    if getattr(args, "file", None):
        with open(args.file) as fh:
            text = fh.read()
        return parse_document(text, name=args.file), None
    raise UsageError("provide --catalog ID or --file PATH")


def _fr(s):
    return str(s) if isinstance(s, Fraction) else s


def _emit(args, payload, code):
    payload = dict(payload)
    payload["status"] = "ok" if code == 0 else "fail"
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        for k, v in payload.items():
            if isinstance(v, list):
                for item in v:
                    print(f"{k}: {item}")
            elif isinstance(v, dict):
                for kk, vv in v.items():
                    print(f"{k}.{kk}: {vv}")
            else:
                print(f"{k}: {v}")
    return code


def _flow_dict(flow):
    return {u.name: print_poly(p) for u, p in sorted(
        flow.components.items(), key=lambda kv: kv[0].name)}


# ---------------------------------------------------------------------------
# commands


def cmd_parse(args):
    doc, _ = _load_doc(args)
    if args.expr:
        p = parse_expression(args.expr, doc.scope)
        return _emit(args, {"canonical": print_poly(p)}, 0)
    out = {}
    eqs = {u.name + "_t": print_poly(rhs) for u, rhs in doc.equations.items()}
    if eqs:
        out["equations"] = eqs
    if doc.flows:
        out["flows"] = {n: print_flow(f) for n, f in doc.flows.items()}
    if doc.shadows:
        out["shadows"] = {
            n: ", ".join(
                f"{u.name} = {print_poly(p)}"
                for u, p in sorted(s.components.items(), key=lambda kv: kv[0].name)
            )
            for n, s in doc.shadows.items()
        }
    if doc.functionals:
        out["functionals"] = {n: print_poly(p) for n, p in doc.functionals.items()}
    return _emit(args, out, 0)


def cmd_normalize(args):
    doc, _ = _load_doc(args)
    p = parse_expression(args.expr, doc.scope)
    return _emit(args, {"canonical": print_poly(p)}, 0)


def cmd_derive(args):
    doc, _ = _load_doc(args)
    p = parse_expression(args.expr, doc.scope)
    d = _DIRECTIONS.get(args.dir)
    if d is None:
        raise UsageError("--dir must be one of D, D1, D2, Dx")
    for _ in range(args.times):
        p = super_derive(p, d)
    return _emit(args, {"result": print_poly(p)}, 0)


def cmd_dt(args):
    doc, _ = _load_doc(args)
    p = parse_expression(args.expr, doc.scope)
    out = dt_apply(doc.system(), p)
    return _emit(args, {"result": print_poly(out)}, 0)


def cmd_commute(args):
    doc, _ = _load_doc(args)
    a = _lookup(doc.flows, args.flows[0], "flow")
    b = _lookup(doc.flows, args.flows[1], "flow")
    c = commutator(a, b)
    code = 0 if c.is_zero else 1
    return _emit(args, {"commutator": _flow_dict(c)}, code)


def cmd_check_symmetry(args):
    doc, _ = _load_doc(args)
    flow = _lookup(doc.flows, args.flow, "flow")
    res = check_symmetry(doc.system(), flow)
    code = 0 if res.is_zero else 1
    return _emit(args, {"residual": _flow_dict(res)}, code)


def cmd_find_symmetries(args):
    doc, _ = _load_doc(args)
    parity = ODD if args.parity == "odd" else EVEN
    res = find_symmetries(
        doc.system(),
        doc.weight_system(),
        Q(args.weight),
        parity,
        zero_weight_cap=args.max_degree,
        case_split_limit=args.case_split_limit,
    )
    flows = [_flow_dict(f) for f in res.flows]
    code = 0 if flows else 1
    return _emit(args, {"dimension": len(flows), "flows": flows}, code)


def cmd_check_covering(args):
    doc, _ = _load_doc(args)
    res = check_covering(doc.covering())
    bad = {
        f"{w}:{a}:{b}": print_poly(p)
        for (w, a, b), p in res.items()
        if not p.is_zero
    }
    code = 0 if not bad else 1
    out = {"conditions": len(res)}
    if bad:
        out["violations"] = bad
    return _emit(args, out, code)


def cmd_verify_shadow(args):
    doc, _ = _load_doc(args)
    sh = _lookup(doc.shadows, args.shadow, "shadow")
    res = verify_shadow(sh)
    bad = {u.name: print_poly(p) for u, p in res.items() if not p.is_zero}
    code = 0 if not bad else 1
    out = {"shadow": sh.name}
    if bad:
        out["residual"] = bad
    return _emit(args, out, code)


def cmd_apply_recursion(args):
    doc, _ = _load_doc(args)
    sh = _lookup(doc.shadows, args.shadow, "shadow")
    seed = _lookup(doc.flows, args.seed, "flow")
    ws = doc.weight_system()
    results = []
    cur = seed
    try:
        for _ in range(args.iterations):
            cur = apply_shadow(sh, cur, ws, zero_weight_cap=args.max_degree)
            results.append(_flow_dict(cur))
    except NotLocalError as exc:
        return _emit(
            args,
            {"flows": results, "error": str(exc)},
            1,
        )
    return _emit(args, {"flows": results}, 0)


def cmd_nilpotency(args):
    doc, _ = _load_doc(args)
    sh = _lookup(doc.shadows, args.shadow, "shadow")
    k = nilpotency_order(sh, args.max)
    if k is None:
        return _emit(args, {"order": f"not nilpotent up to power {args.max}"}, 1)
    return _emit(args, {"order": k}, 0)


def cmd_euler(args):
    doc, _ = _load_doc(args)
    p = parse_expression(args.expr, doc.scope)
    fields = tuple(doc.fields.values())
    grads = euler(p, fields)
    return _emit(
        args, {"gradient": {u.name: print_poly(g) for u, g in grads.items()}}, 0
    )


def cmd_integrate(args):
    doc, _ = _load_doc(args)
    p = parse_expression(args.expr, doc.scope)
    d = _DIRECTIONS.get(args.dir)
    if d not in (D1, DX):
        raise UsageError("--dir must be D or Dx")
    gens = list(doc.fields.values()) + list(doc.nonlocals.values())
    try:
        out = d_integrate(p, d, doc.weight_system(), gens, args.max_degree)
    except NotIntegrableError as exc:
        return _emit(args, {"error": str(exc)}, 1)
    return _emit(args, {"preimage": print_poly(out)}, 0)


def cmd_conserved(args):
    doc, _ = _load_doc(args)
    if args.expr in doc.functionals:
        rho = doc.functionals[args.expr]
    else:
        rho = parse_expression(args.expr, doc.scope)
    d = _DIRECTIONS.get(args.image)
    if d not in (D1, DX):
        raise UsageError("--image must be D or Dx")
    flux_src = dt_apply(doc.system(), rho)
    gens = list(doc.fields.values()) + list(doc.nonlocals.values())
    try:
        flux = d_integrate(flux_src, d, doc.weight_system(), gens, args.max_degree)
    except NotIntegrableError as exc:
        return _emit(args, {"conserved": False, "error": str(exc)}, 1)
    return _emit(args, {"conserved": True, "flux": print_poly(flux)}, 0)


def _default_operator(fields, kind):
    op_dir = {"dx": (DX,), "susy": (D1,)}[kind]
    n = len(fields)
    entries = {
        fields[i]: {fields[n - 1 - i]: [(SuperPoly.one(), op_dir)]}
        for i in range(n)
    }
    return HamiltonianOperator(tuple(fields), entries)


def cmd_hamiltonian_flow(args):
    doc, entry = _load_doc(args)
    if args.density in doc.functionals:
        H = _lookup(doc.functionals, args.density, "functional")
    else:
        H = parse_expression(args.density, doc.scope)
    sys = doc.system()
    if entry is not None and "make_operator" in entry.extras:
        op = entry.extras["make_operator"](tuple(sys.fields))
    else:
        op = _default_operator(tuple(sys.fields), args.operator)
    flow = hamiltonian_flow(op, H)
    res = check_symmetry(sys, flow)
    return _emit(
        args,
        {"flow": _flow_dict(flow), "is_symmetry": res.is_zero},
        0,
    )


def _gardner_fixture(args):
    doc, entry = _load_doc(args)
    if entry is None or "miura" not in entry.extras:
        raise UsageError(
            "gardner commands need a catalog entry with a recorded deformation"
        )
    base = doc.system()
    extended = entry.extras["extended"]
    miura = entry.extras["miura"]
    corr = entry.extras.get(
        "correspondence",
        tuple(zip(base.fields, extended.fields)),
    )
    return doc, entry, base, extended, miura, corr


def cmd_gardner(args):
    if args.action == "verify":
        _doc, _e, base, extended, miura, _corr = _gardner_fixture(args)
        res = verify_deformation(base, extended, miura)
        bad = {u.name: print_poly(p) for u, p in res.items() if not p.is_zero}
        code = 0 if not bad else 1
        out = {"fields": [u.name for u in base.fields]}
        if bad:
            out["residual"] = bad
        return _emit(args, out, code)
    if args.action == "densities":
        _doc, _e, base, _ext, miura, corr = _gardner_fixture(args)
        rows = density_recurrence(miura, corr, "eps", args.order)
        out = {
            w.name: [print_poly(r) for r in rho_list]
            for w, rho_list in rows.items()
        }
        return _emit(args, {"densities": out}, 0)
    if args.action == "search":
        doc, entry, base, _ext, _miura, _corr = _gardner_fixture(args)
        H0 = next(iter(doc.functionals.values()), None)
        if H0 is None:
            raise UsageError("entry declares no functional to deform")
        make_op = entry.extras.get("make_operator") if entry else None
        eps_weight = doc.param_weights.get("eps")
        if eps_weight is None:
            raise UsageError("entry declares no weighted deformation parameter")
        results = search_deformation(
            base, doc.weight_system(), H0, "eps", eps_weight,
            args.max_order, make_op=make_op,
        )
        out = []
        for d in results:
            out.append({
                "miura": {u.name: print_poly(p) for u, p in d.miura.items()},
                "density": print_poly(d.hamiltonian),
                "free": list(d.free_params),
            })
        return _emit(args, {"deformations": out}, 0 if out else 1)
    raise UsageError("gardner action must be verify, densities or search")


def cmd_theta_expand(args):
    doc, _ = _load_doc(args)
    sys = doc.system()
    field = _lookup(doc.fields, args.field, "field")
    mapping = {field: parse_expression(args.map, doc.scope)}
    sub = type(sys)(
        (field,), {field: sys.rhs[field]}, params=sys.params, name=sys.name
    )
    comp = clifford_expand(sub, mapping)
    out = {u.name + "_t": print_poly(rhs) for u, rhs in comp.rhs.items()}
    return _emit(args, {"components": out}, 0)


def cmd_infer_weights(args):
    doc, _ = _load_doc(args)
    fixed = {}
    for item in args.fix or ():
        k, _, v = item.partition("=")
        if not v:
            raise UsageError("--fix needs name=value")
        fixed[k] = Q(v)
    sol = infer_weights(doc.system(), fixed, tuple(doc.param_weights))
    if sol is None:
        return _emit(args, {"error": "weight balance unsatisfiable"}, 1)
    out = {
        "weights": {n: _fr(v) for n, v in sol.particular.items()},
        "unique": sol.unique,
    }
    if sol.basis:
        out["freedom"] = [
            {n: _fr(v) for n, v in vec.items()} for vec in sol.basis
        ]
    return _emit(args, out, 0)


def cmd_catalog(args):
    if args.action == "list":
        rows = {cid: catalog.get(cid).title for cid in catalog.ids()}
        return _emit(args, {"entries": rows}, 0)
    if args.action == "show":
        if not args.id:
            raise UsageError("catalog show needs an entry id")
        e = catalog.get(args.id)
        out = {"id": e.id, "title": e.title}
        for name, text in e.sources.items():
            out[f"source.{name}"] = text.strip()
        if e.scales:
            out["scales"] = {k: _fr(v) for k, v in e.scales.items()}
        out["checks"] = [name for name, _fn in e.checks]
        return _emit(args, out, 0)
    if args.action == "verify":
        ids = list(catalog.ids()) if (args.all or not args.id) else [args.id]
        results = []
        if args.jobs and args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for cid, rows in zip(ids, pool.map(catalog.verify, ids)):
                    results.extend((cid, *row) for row in rows)
        else:
            for cid in ids:
                results.extend((cid, *row) for row in catalog.verify(cid))
        lines = [
            f"{'PASS' if ok else 'FAIL'} {cid}:{name} {detail}"
            for cid, name, ok, detail in results
        ]
        failures = sum(1 for _c, _n, ok, _d in results if not ok)
        return _emit(args, {"checks": lines, "failures": failures},
                     0 if failures == 0 else 1)
    raise UsageError("catalog action must be list, show or verify")


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sp, expr=False):
    sp.add_argument("--catalog", help="catalog entry id")
    sp.add_argument("--doc", help="document name within the entry (default main)")
    sp.add_argument("--file", help="path to a source document")
    sp.add_argument("--json", action="store_true", help="structured output")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--max-degree", type=int, default=2, dest="max_degree",
                    help="cap on powers of weight-zero factors in ansatze")
    sp.add_argument("--case-split-limit", type=int, default=0,
                    dest="case_split_limit")
    if expr:
        sp.add_argument("--expr", required=True)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="superjet",
        description="exact computations for evolutionary super-systems",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse and print canonically")
    _add_common(sp)
    sp.add_argument("--expr", help="single expression instead of the document")
    sp.set_defaults(fn=cmd_parse)

    sp = sub.add_parser("normalize", help="canonical form of an expression")
    _add_common(sp, expr=True)
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("derive", help="apply a derivation to an expression")
    _add_common(sp, expr=True)
    sp.add_argument("--dir", required=True, choices=list(_DIRECTIONS))
    sp.add_argument("--times", type=int, default=1)
    sp.set_defaults(fn=cmd_derive)

    sp = sub.add_parser("dt", help="t-derivative along the system")
    _add_common(sp, expr=True)
    sp.set_defaults(fn=cmd_dt)

    sp = sub.add_parser("commute", help="graded commutator of two named flows")
    _add_common(sp)
    sp.add_argument("--flow", dest="flows", action="append", required=True,
                    help="flow name (give twice)")
    sp.set_defaults(fn=cmd_commute)

    sp = sub.add_parser("check-symmetry", help="verify a named flow")
    _add_common(sp)
    sp.add_argument("--flow", required=True)
    sp.set_defaults(fn=cmd_check_symmetry)

    sp = sub.add_parser("find-symmetries", help="solve for homogeneous flows")
    _add_common(sp)
    sp.add_argument("--weight", required=True, help="flow weight, e.g. -7/2")
    sp.add_argument("--parity", choices=["even", "odd"], default="even")
    sp.set_defaults(fn=cmd_find_symmetries)

    sp = sub.add_parser("check-covering", help="cross-derivative consistency")
    _add_common(sp)
    sp.set_defaults(fn=cmd_check_covering)

    sp = sub.add_parser("verify-shadow", help="verify a named shadow")
    _add_common(sp)
    sp.add_argument("--shadow", required=True)
    sp.set_defaults(fn=cmd_verify_shadow)

    sp = sub.add_parser("apply-recursion", help="apply a shadow to a seed flow")
    _add_common(sp)
    sp.add_argument("--shadow", required=True)
    sp.add_argument("--seed", required=True)
    sp.add_argument("--iterations", type=int, default=1)
    sp.set_defaults(fn=cmd_apply_recursion)

    sp = sub.add_parser("nilpotency", help="least vanishing power of a shadow")
    _add_common(sp)
    sp.add_argument("--shadow", required=True)
    sp.add_argument("--max", type=int, default=8)
    sp.set_defaults(fn=cmd_nilpotency)

    sp = sub.add_parser("euler", help="variational derivative of a density")
    _add_common(sp, expr=True)
    sp.set_defaults(fn=cmd_euler)

    sp = sub.add_parser("integrate", help="exact preimage under D or Dx")
    _add_common(sp, expr=True)
    sp.add_argument("--dir", required=True, choices=["D", "Dx"])
    sp.set_defaults(fn=cmd_integrate)

    sp = sub.add_parser("conserved", help="check a density is conserved")
    _add_common(sp, expr=True)
    sp.add_argument("--image", required=True, choices=["D", "Dx"])
    sp.set_defaults(fn=cmd_conserved)

    sp = sub.add_parser("hamiltonian-flow", help="flow of a functional")
    _add_common(sp)
    sp.add_argument("--density", required=True,
                    help="functional name or density expression")
    sp.add_argument("--operator", choices=["dx", "susy"], default="dx")
    sp.set_defaults(fn=cmd_hamiltonian_flow)

    sp = sub.add_parser("gardner", help="deformations of integrable systems")
    sp.add_argument("action", choices=["verify", "densities", "search"])
    _add_common(sp)
    sp.add_argument("--order", type=int, default=2)
    sp.add_argument("--max-order", type=int, default=2, dest="max_order")
    sp.set_defaults(fn=cmd_gardner)

    sp = sub.add_parser("theta-expand", help="expand through a Clifford auxiliary")
    _add_common(sp)
    sp.add_argument("--field", required=True)
    sp.add_argument("--map", required=True,
                    help="expression for the field in component fields")
    sp.set_defaults(fn=cmd_theta_expand)

    sp = sub.add_parser("infer-weights", help="solve the weight balance")
    _add_common(sp)
    sp.add_argument("--fix", action="append", help="name=value (repeatable)")
    sp.set_defaults(fn=cmd_infer_weights)

    sp = sub.add_parser("catalog", help="built-in systems")
    sp.add_argument("action", choices=["list", "show", "verify"])
    sp.add_argument("id", nargs="?")
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_catalog)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "command", None) == "commute" and len(args.flows or ()) != 2:
        print("commute needs exactly two --flow arguments", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SyntaxErrorWithPos, UndeclaredSymbolError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
