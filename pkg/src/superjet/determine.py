"""Determining equations: extraction and exact solution of linear systems.

Unknown constants are carried inside expressions as distinguished
parameter names, so building an ansatz, pushing it through the calculus
and reading off the determining system needs no special data flow.  The
solver works over the field of rational functions in the declared
parameters; every pivot whose non-vanishing is not guaranteed is
recorded, and optional case splitting re-solves with such parameters
pinned to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import sympy

from .algebra import SuperPoly, term_order_key
from .jets import EvolutionSystem, Flow, check_symmetry
from .weights import WeightSystem, enumerate_monomials, items_from_gens, jets_up_to_weight

Q = Fraction


class NonlinearSystemError(ValueError):
    pass


def unknown_names(n: int, prefix: str = "c") -> list:
    return [f"{prefix}{i}" for i in range(n)]


# ---------------------------------------------------------------------------
# extraction

# a "coefficient" below is a SuperPoly containing only parameter factors


def _param_only(params) -> SuperPoly:
    return SuperPoly({((), (), (), params): Q(1)})


@dataclass
class LinearEquation:
    coeffs: dict  # unknown name -> SuperPoly in parameters
    const: SuperPoly

    def is_trivial(self):
        return self.const.is_zero and all(c.is_zero for c in self.coeffs.values())


def extract_linear_system(
    residuals: Iterable[SuperPoly], unknowns: Sequence[str]
) -> list:
    """Split residuals into per-monomial equations linear in the unknowns."""
    uset = set(unknowns)
    eqs = []
    for p in residuals:
        grouped: dict = {}
        for (evens, odds, funcs, params), c in p.terms.items():
            upart = [(n, e) for n, e in params if n in uset]
            rest = tuple((n, e) for n, e in params if n not in uset)
            if sum(e for _n, e in upart) > 1 or any(e < 0 for _n, e in upart):
                raise NonlinearSystemError(
                    f"residual is not linear in the unknowns: {upart}"
                )
            slot = upart[0][0] if upart else None
            grouped.setdefault((evens, odds, funcs), {}).setdefault(
                slot, SuperPoly.zero()
            )
            grouped[(evens, odds, funcs)][slot] = (
                grouped[(evens, odds, funcs)][slot] + c * _param_only(rest)
            )
        for mono in sorted(grouped, key=lambda k: term_order_key((k[0], k[1], k[2], ()))):
            parts = grouped[mono]
            const = parts.pop(None, SuperPoly.zero())
            eq = LinearEquation({n: v for n, v in parts.items() if not v.is_zero}, const)
            if not eq.is_trivial():
                eqs.append(eq)
    return eqs


# ---------------------------------------------------------------------------
# sympy bridge


def _pp_to_sympy(p: SuperPoly, symtab: dict):
    e = sympy.Integer(0)
    for (_ev, _od, _fn, params), c in p.terms.items():
        t = sympy.Rational(c.numerator, c.denominator)
        for n, x in params:
            t *= symtab.setdefault(n, sympy.Symbol(n)) ** x
        e += t
    return e


def _sympy_to_pp(e) -> SuperPoly:
    """Convert a sympy expression back; denominators must be monomials."""
    e = sympy.together(sympy.expand(e))
    num, den = sympy.fraction(e)
    num = sympy.expand(num)
    dc, dm = den.as_coeff_Mul()
    den_params = {}
    for factor in sympy.Mul.make_args(dm):
        if factor == 1:
            continue
        base, exp = factor.as_base_exp()
        if not base.is_Symbol or not (exp.is_Integer and exp > 0):
            raise NonlinearSystemError(
                f"solution denominator {den} is not a parameter monomial"
            )
        den_params[str(base)] = int(exp)
    out = SuperPoly.zero()
    for term in sympy.Add.make_args(num):
        coeff, mon = term.as_coeff_Mul()
        params = dict((n, -x) for n, x in den_params.items())
        for factor in sympy.Mul.make_args(mon):
            if factor == 1:
                continue
            base, exp = factor.as_base_exp()
            if not base.is_Symbol or not exp.is_Integer:
                raise NonlinearSystemError(f"non-polynomial solution term {term}")
            params[str(base)] = params.get(str(base), 0) + int(exp)
        c = sympy.Rational(coeff) / sympy.Rational(dc)
        params = tuple(sorted((n, x) for n, x in params.items() if x))
        out = out + Q(int(c.p), int(c.q)) * _param_only(params)
    return out


# ---------------------------------------------------------------------------
# solving


@dataclass
class LinearSolution:
    """Affine solution set of a linear system over the parameter field."""

    unknowns: tuple
    particular: dict  # unknown -> SuperPoly (parameters only)
    basis: list  # list of {unknown: SuperPoly}
    assumptions: list = dc_field(default_factory=list)  # pivots assumed nonzero
    zero_params: frozenset = frozenset()  # parameters pinned to 0 in this branch
    constraints: list = dc_field(default_factory=list)  # residual conditions on free parameters

    @property
    def dim(self):
        return len(self.basis)

    @property
    def is_trivial(self):
        return not self.basis and all(v.is_zero for v in self.particular.values())


def _substitute_zero(eqs, params):
    """Pin the given parameters to zero inside every coefficient."""
    if not params:
        return eqs
    out = []
    for eq in eqs:
        def drop(p):
            return SuperPoly(
                {
                    k: c
                    for k, c in p.terms.items()
                    if all(n not in params or e < 0 for n, e in k[3])
                }
            )
        coeffs = {n: drop(v) for n, v in eq.coeffs.items()}
        coeffs = {n: v for n, v in coeffs.items() if not v.is_zero}
        e2 = LinearEquation(coeffs, drop(eq.const))
        if not e2.is_trivial():
            out.append(e2)
    return out


def _is_sure_nonzero(expr, nonzero_syms) -> bool:
    """True if the expression cannot vanish for admissible parameter values."""
    if expr.is_Rational:
        return expr != 0
    coeff, mon = sympy.factor(expr).as_coeff_Mul()
    if coeff == 0:
        return False
    for factor in sympy.Mul.make_args(mon):
        base, _exp = factor.as_base_exp()
        if not (base.is_Symbol and str(base) in nonzero_syms):
            return False
    return True


def solve_linear(
    eqs: Sequence[LinearEquation],
    unknowns: Sequence[str],
    assume_nonzero: Iterable[str] = (),
    case_split_limit: int = 0,
    constraint_params: Iterable[str] = (),
) -> list:
    """Solve exactly; returns a list of solution branches.

    With ``case_split_limit == 0`` only the generic branch is returned
    (pivots recorded in ``assumptions``).  Otherwise each parameter whose
    non-vanishing the generic branch relied on is also pinned to zero in
    a separate branch, recursively up to the given depth.

    Ordinary parameters are treated as arbitrary symbols, so a leftover
    equation without unknowns kills the branch unless it vanishes
    identically.  Parameters listed in ``constraint_params`` are instead
    adjustable: leftover equations built from them alone are returned in
    ``constraints`` for the caller to resolve.
    """
    cp = frozenset(constraint_params)
    branches = _solve_branch(
        eqs, tuple(unknowns), frozenset(assume_nonzero), frozenset(), cp
    )
    if case_split_limit:
        seen = {frozenset()}
        frontier = list(branches)
        depth = 0
        while frontier and depth < case_split_limit:
            new = []
            for sol in frontier:
                if sol is None:
                    continue
                split_params = set()
                for a in sol.assumptions:
                    split_params.update(
                        str(s) for s in a.free_symbols if str(s) not in assume_nonzero
                    )
                for pname in sorted(split_params):
                    zp = sol.zero_params | {pname}
                    if zp in seen:
                        continue
                    seen.add(zp)
                    sub = _solve_branch(
                        _substitute_zero(eqs, zp),
                        tuple(unknowns),
                        frozenset(assume_nonzero),
                        zp,
                        cp,
                    )
                    new.extend(sub)
            branches.extend(b for b in new if b is not None)
            frontier = new
            depth += 1
    return [b for b in branches if b is not None]


def _rational_system(eqs):
    """Rows {unknown: Fraction} and constants if no parameters occur, else None."""
    rows = []
    for eq in eqs:
        row = {}
        for u, p in eq.coeffs.items():
            if p.is_zero:
                continue
            if list(p.terms) != [((), (), (), ())]:
                return None
            row[u] = p.terms[((), (), (), ())]
        cp = eq.const
        if cp.is_zero:
            const = Q(0)
        elif list(cp.terms) != [((), (), (), ())]:
            return None
        else:
            const = cp.terms[((), (), (), ())]
        rows.append((row, const))
    return rows


def _solve_branch_rational(rows, unknowns, zero_params):
    """Sparse exact Gauss-Jordan over the rationals (no parameters)."""
    n = len(unknowns)
    index = {u: i for i, u in enumerate(unknowns)}
    # rows: ({col: Fraction}, Fraction const); solve coeffs . x + const = 0
    work = [({index[u]: v for u, v in row.items()}, -const) for row, const in rows]
    col_rows: dict = {}
    for ri, (row, _c) in enumerate(work):
        for cc in row:
            col_rows.setdefault(cc, set()).add(ri)
    piv_cols = []
    piv_row_of = {}
    used = set()
    for c in range(n):
        pr = None
        for ri in col_rows.get(c, ()):
            if ri not in used and work[ri][0].get(c):
                pr = ri
                break
        if pr is None:
            continue
        used.add(pr)
        row, rhs = work[pr]
        pv = row[c]
        row = {cc: v / pv for cc, v in row.items()}
        rhs = rhs / pv
        work[pr] = (row, rhs)
        for ri in list(col_rows.get(c, ())):
            if ri == pr:
                continue
            orow, orhs = work[ri]
            fac = orow.get(c)
            if not fac:
                continue
            nrow = dict(orow)
            for cc, v in row.items():
                nv = nrow.get(cc, Q(0)) - fac * v
                if nv:
                    nrow[cc] = nv
                    col_rows.setdefault(cc, set()).add(ri)
                else:
                    nrow.pop(cc, None)
                    col_rows.get(cc, set()).discard(ri)
            work[ri] = (nrow, orhs - fac * rhs)
        piv_cols.append(c)
        piv_row_of[c] = pr
    for ri, (row, rhs) in enumerate(work):
        if ri not in used and not row and rhs:
            return [None]
        if ri not in used and row:
            # should be impossible after full elimination
            if any(row.values()):
                return [None]
    particular = {u: SuperPoly.zero() for u in unknowns}
    for c in piv_cols:
        v = work[piv_row_of[c]][1]
        if v:
            particular[unknowns[c]] = SuperPoly.scalar(v)
    free = [c for c in range(n) if c not in piv_row_of]
    basis = []
    for fc in free:
        vec = {u: SuperPoly.zero() for u in unknowns}
        vec[unknowns[fc]] = SuperPoly.one()
        for c in piv_cols:
            coef = work[piv_row_of[c]][0].get(fc)
            if coef:
                vec[unknowns[c]] = SuperPoly.scalar(-coef)
        basis.append(vec)
    return [
        LinearSolution(
            tuple(unknowns),
            particular,
            basis,
            assumptions=[],
            zero_params=zero_params,
            constraints=[],
        )
    ]


def _solve_branch(eqs, unknowns, assume_nonzero, zero_params, constraint_params=frozenset()):
    rational = _rational_system(eqs)
    if rational is not None:
        return _solve_branch_rational(rational, tuple(unknowns), zero_params)
    symtab: dict = {}
    rows = []
    for eq in eqs:
        row = [_pp_to_sympy(eq.coeffs.get(u, SuperPoly.zero()), symtab) for u in unknowns]
        # equations read coeffs . x + const = 0, so the augmented column is -const
        row.append(-_pp_to_sympy(eq.const, symtab))
        rows.append(row)
    n = len(unknowns)
    assumptions = []
    piv_cols = []
    r = 0
    for c in range(n):
        # choose a pivot: prefer provably nonzero entries
        pr = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0 and _is_sure_nonzero(rows[i][c], assume_nonzero):
                pr = i
                break
        if pr is None:
            for i in range(r, len(rows)):
                cand = sympy.cancel(rows[i][c])
                if cand != 0:
                    pr = i
                    assumptions.append(cand)
                    break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [sympy.cancel(x / pv) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                fac = rows[i][c]
                rows[i] = [sympy.cancel(x - fac * y) for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    constraints = []
    for i in range(r, len(rows)):
        rest = sympy.cancel(rows[i][n])
        if rest != 0:
            if constraint_params and {
                str(s) for s in rest.free_symbols
            } <= set(constraint_params):
                constraints.append(rest)
                continue
            # inconsistent: the condition cannot hold for arbitrary parameters
            return [None]
    free = [c for c in range(n) if c not in piv_cols]
    particular = {u: SuperPoly.zero() for u in unknowns}
    for i, c in enumerate(piv_cols):
        particular[unknowns[c]] = _sympy_to_pp(rows[i][n])
    basis = []
    for fc in free:
        vec = {u: SuperPoly.zero() for u in unknowns}
        vec[unknowns[fc]] = SuperPoly.one()
        for i, c in enumerate(piv_cols):
            vec[unknowns[c]] = _sympy_to_pp(-rows[i][fc])
        basis.append(vec)
    return [
        LinearSolution(
            tuple(unknowns),
            particular,
            basis,
            assumptions=assumptions,
            zero_params=zero_params,
            constraints=constraints,
        )
    ]


def clear_denominators(vec: Mapping[str, SuperPoly]) -> dict:
    """Scale a solution vector so all parameter exponents are nonnegative."""
    worst: dict = {}
    denom = 1
    for v in vec.values():
        for key, c in v.terms.items():
            for nm, e in key[3]:
                if e < 0:
                    worst[nm] = max(worst.get(nm, 0), -e)
            denom = _lcm(denom, c.denominator)
    scale = Q(denom) * _param_only(tuple(sorted(worst.items())))
    return {u: scale * v for u, v in vec.items()}


def _lcm(a, b):
    import math

    return a * b // math.gcd(a, b)


def normalize_vector(vec: Mapping[str, SuperPoly], order: Sequence[str]) -> dict:
    """Clear denominators and make the leading coefficient equal to one."""
    vec = clear_denominators(vec)
    for u in order:
        v = vec[u]
        if v.is_zero:
            continue
        lead_key = min(v.terms, key=term_order_key)
        lead = v.terms[lead_key]
        return {w: x / lead for w, x in vec.items()}
    return dict(vec)


# ---------------------------------------------------------------------------
# symmetry search


@dataclass
class SymmetrySearchResult:
    flows: list  # list of Flow, one per basis solution (generic branch)
    ansatz_size: int
    solution: Optional[LinearSolution]
    branches: list = dc_field(default_factory=list)


def build_flow_ansatz(
    sys: EvolutionSystem,
    ws: WeightSystem,
    s_weight: Fraction,
    parameter_parity: int,
    extra_fields: Sequence = (),
    zero_weight_cap: int = 2,
    prefix: str = "c",
):
    """Homogeneous flow ansatz with fresh unknown coefficient names.

    Returns (components dict with unknown-laden values, unknown names,
    monomials per field).
    """
    comps = {}
    names = []
    monos_by_field = {}
    idx = 0
    all_fields = tuple(sys.fields) + tuple(extra_fields)
    for u in sys.fields:
        target = ws.field_weight(u) - Q(s_weight)
        gens = jets_up_to_weight(ws, all_fields, target)
        items = items_from_gens(ws, gens, target, zero_weight_cap)
        monos = enumerate_monomials(items, target, (u.parity + parameter_parity) % 2)
        acc = SuperPoly.zero()
        for m in monos:
            nm = f"{prefix}{idx}"
            idx += 1
            names.append(nm)
            acc = acc + SuperPoly.param(nm) * m
        comps[u] = acc
        monos_by_field[u] = monos
    return comps, names, monos_by_field


def find_symmetries(
    sys: EvolutionSystem,
    ws: WeightSystem,
    s_weight: Fraction,
    parameter_parity: int,
    assume_nonzero: Iterable[str] = (),
    extra_fields: Sequence = (),
    zero_weight_cap: int = 2,
    case_split_limit: int = 0,
) -> SymmetrySearchResult:
    """All homogeneous symmetry flows of the given weight and parity."""
    comps, names, _ = build_flow_ansatz(
        sys, ws, s_weight, parameter_parity, extra_fields, zero_weight_cap
    )
    if not names:
        return SymmetrySearchResult([], 0, None)
    flow = Flow(comps, parameter_parity)
    residual = check_symmetry(sys, flow)
    eqs = extract_linear_system(
        [residual.components[u] for u in sys.fields], names
    )
    branches = solve_linear(eqs, names, assume_nonzero, case_split_limit)
    if not branches:
        return SymmetrySearchResult([], len(names), None)
    sol = branches[0]
    flows = []
    for vec in sol.basis:
        nv = normalize_vector(vec, names)
        comps_v = {
            u: _instantiate(comps[u], nv) for u in sys.fields
        }
        flows.append(Flow(comps_v, parameter_parity))
    return SymmetrySearchResult(flows, len(names), sol, branches)


def _instantiate(expr: SuperPoly, values: Mapping[str, SuperPoly]) -> SuperPoly:
    """Replace unknown-name parameters by their solved values."""
    out = SuperPoly.zero()
    for (evens, odds, funcs, params), c in expr.terms.items():
        val = c * SuperPoly.one()
        rest = []
        for n, e in params:
            if n in values:
                if e != 1:
                    raise NonlinearSystemError("unknowns must occur linearly")
                val = val * values[n]
            else:
                rest.append((n, e))
        out = out + val * SuperPoly({(evens, odds, funcs, tuple(rest)): Q(1)})
    return out


def instantiate(expr: SuperPoly, values: Mapping[str, SuperPoly]) -> SuperPoly:
    return _instantiate(expr, values)


def proportional(a: SuperPoly, b: SuperPoly):
    """Return the scalar c with a == c*b (rational, parameters aside), or None."""
    if a.is_zero and b.is_zero:
        return Q(1)
    if a.is_zero or b.is_zero:
        return None
    if set(a.terms) != set(b.terms):
        return None
    ratios = {a.terms[k] / b.terms[k] for k in a.terms}
    return ratios.pop() if len(ratios) == 1 else None


def flows_proportional(f1: Flow, f2: Flow):
    """A single common scalar ratio between two flows, or None."""
    keys = set(f1.components) | set(f2.components)
    ratio = None
    for u in keys:
        a = f1.components.get(u, SuperPoly.zero())
        b = f2.components.get(u, SuperPoly.zero())
        if a.is_zero and b.is_zero:
            continue
        r = proportional(a, b)
        if r is None:
            return None
        if ratio is None:
            ratio = r
        elif ratio != r:
            return None
    return ratio
