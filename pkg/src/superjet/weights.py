"""Scaling weights: checking homogeneity, inferring weight systems, and
enumerating homogeneous monomial bases.

Conventions: [x] = -1, [theta] = -1/2, so Dx raises weight by 1 and an
odd super derivative by 1/2; time weights are negative for evolution in
positive-weight right-hand sides.  A Clifford auxiliary weighs half of
its declared even square.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .algebra import (
    Clifford,
    FieldSymbol,
    JetVar,
    SuperPoly,
    Theta,
)

Q = Fraction


class InhomogeneousError(ValueError):
    pass


@dataclass
class WeightSystem:
    """Assignment of weights to fields, parameters and the time variable."""

    fields: Mapping[FieldSymbol, Fraction]
    params: Mapping[str, Fraction] = dc_field(default_factory=dict)
    t: Optional[Fraction] = None

    def field_weight(self, sym: FieldSymbol) -> Fraction:
        if sym in self.fields:
            return Q(self.fields[sym])
        w = getattr(sym, "weight", None)
        if w is not None:
            return Q(w)
        raise KeyError(f"no weight assigned to {sym.name}")

    def gen_weight(self, g) -> Fraction:
        if isinstance(g, Theta):
            return Q(-1, 2)
        if isinstance(g, Clifford):
            rat, params = g.square
            w = Q(0)
            for n, e in params:
                w += e * Q(self.params[n])
            return w / 2
        return self.field_weight(g.fieldsym) + g.m + Q(g.d1 + g.d2, 2)

    def key_weight(self, key) -> Fraction:
        evens, odds, funcs, params = key
        w = Q(0)
        for g, x in evens:
            w += x * self.gen_weight(g)
        for g in odds:
            w += self.gen_weight(g)
        for _n, k, arg in funcs:
            aw = self.gen_weight(arg)
            if aw != 0:
                raise InhomogeneousError(
                    "function factors are weighted only for weight-0 arguments"
                )
        for n, e in params:
            w += e * Q(self.params[n])
        return w


def weight_of(ws: WeightSystem, p: SuperPoly) -> Optional[Fraction]:
    """The common weight of all monomials; None for zero, error if mixed."""
    if p.is_zero:
        return None
    seen = {ws.key_weight(k) for k in p.terms}
    if len(seen) != 1:
        raise InhomogeneousError(f"mixed weights {sorted(seen)}")
    return seen.pop()


def is_homogeneous(ws: WeightSystem, p: SuperPoly) -> bool:
    try:
        weight_of(ws, p)
        return True
    except InhomogeneousError:
        return False


def split_by_weight(ws: WeightSystem, p: SuperPoly) -> dict:
    """Split into weight-homogeneous parts {weight: polynomial}."""
    parts: dict = {}
    for k, c in p.terms.items():
        parts.setdefault(ws.key_weight(k), {})[k] = c
    return {w: SuperPoly(t) for w, t in parts.items()}


# ---------------------------------------------------------------------------
# weight inference


@dataclass
class WeightSolution:
    """Affine solution set of a weight-balance system.

    ``particular`` maps unknown names to weights; ``basis`` spans the
    homogeneous solutions (empty basis means the system is unique).
    """

    particular: dict
    basis: list

    @property
    def unique(self) -> bool:
        return not self.basis

    def satisfies(self, relation: Mapping[str, Fraction], rhs: Fraction) -> bool:
        """Whether sum(coeff * weight) == rhs holds on every solution."""
        tot = sum(Q(c) * Q(self.particular[n]) for n, c in relation.items())
        if tot != Q(rhs):
            return False
        for vec in self.basis:
            if sum(Q(c) * Q(vec.get(n, 0)) for n, c in relation.items()) != 0:
                return False
        return True


def _solve_affine(rows, nunk):
    """Solve rows of (coeffs tuple, rhs) exactly; return (particular, basis)."""
    mat = [list(r) + [v] for r, v in rows]
    piv_cols = []
    r = 0
    for c in range(nunk):
        pr = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                fac = mat[i][c]
                mat[i] = [x - fac * y for x, y in zip(mat[i], mat[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(mat)):
        if mat[i][nunk]:
            return None
    free = [c for c in range(nunk) if c not in piv_cols]
    particular = [Q(0)] * nunk
    for i, c in enumerate(piv_cols):
        particular[c] = mat[i][nunk]
    basis = []
    for fc in free:
        vec = [Q(0)] * nunk
        vec[fc] = Q(1)
        for i, c in enumerate(piv_cols):
            vec[c] = -mat[i][fc]
        basis.append(vec)
    return particular, basis


def infer_weights(sys, fixed: Mapping = None, param_names: Sequence[str] = ()):
    """Infer a weight system from the balance [term] = [u] - [t].

    Unknowns are the field weights, [t], and the weights of the named
    parameters.  ``fixed`` may pin any of these (keys: field symbols,
    the string "t", or parameter names).  Returns a WeightSolution whose
    unknown names are field names, "t", and parameter names, or None if
    the balance is unsatisfiable.
    """
    fixed = dict(fixed or {})
    unknowns = [u.name for u in sys.fields] + ["t"] + list(param_names)
    index = {n: i for i, n in enumerate(unknowns)}
    field_by_name = {u.name: u for u in sys.fields}

    def accum(key, row):
        """Add the weight of a monomial key into a coefficient row; return const part."""
        const = Q(0)
        evens, odds, funcs, params = key
        items = [(g, x) for g, x in evens] + [(g, 1) for g in odds]
        for g, x in items:
            if isinstance(g, Theta):
                const += x * Q(-1, 2)
            elif isinstance(g, Clifford):
                _rat, sq = g.square
                for n, e in sq:
                    if n in index:
                        row[index[n]] += Q(x * e, 2)
                    else:
                        const += Q(x * e, 2) * Q(fixed[n])
            else:
                sym = g.fieldsym
                nm = sym.name
                if nm in index:
                    row[index[nm]] += Q(x)
                elif sym in fixed or nm in fixed:
                    const += Q(x) * Q(fixed.get(sym, fixed.get(nm)))
                else:
                    w = getattr(sym, "weight", None)
                    if w is None:
                        raise KeyError(f"no weight for {nm}")
                    const += Q(x) * Q(w)
                const += x * (g.m + Q(g.d1 + g.d2, 2))
        if funcs:
            raise InhomogeneousError("cannot infer weights through function factors")
        for n, e in params:
            if n in index:
                row[index[n]] += Q(e)
            else:
                const += Q(e) * Q(fixed[n])
        return const

    rows = []
    for u in sys.fields:
        for key in sys.rhs[u].terms:
            row = [Q(0)] * len(unknowns)
            const = accum(key, row)
            # [monomial] - [u] + [t] = 0
            row[index[u.name]] -= 1
            row[index["t"]] += 1
            rows.append((tuple(row), -const))
    for k, v in fixed.items():
        nm = k.name if isinstance(k, FieldSymbol) else k
        if nm in index:
            row = [Q(0)] * len(unknowns)
            row[index[nm]] = Q(1)
            rows.append((tuple(row), Q(v)))
    sol = _solve_affine(rows, len(unknowns))
    if sol is None:
        return None
    particular, basis = sol
    return WeightSolution(
        dict(zip(unknowns, particular)),
        [
            {n: v for n, v in zip(unknowns, vec) if v}
            for vec in basis
        ],
    )


def weight_system_from_solution(sys, sol: WeightSolution, param_names=()) -> WeightSystem:
    fields = {u: sol.particular[u.name] for u in sys.fields}
    params = {n: sol.particular[n] for n in param_names if n in sol.particular}
    return WeightSystem(fields, params, sol.particular["t"])


# ---------------------------------------------------------------------------
# homogeneous monomial enumeration


@dataclass(frozen=True)
class AnsatzItem:
    """One admissible factor for homogeneous enumeration."""

    factor: object  # generator, or ("param", name)
    weight: Fraction
    parity: int
    max_exp: int  # 1 for odd factors


def items_from_gens(ws: WeightSystem, gens, max_weight, zero_weight_cap=2):
    items = []
    for g in gens:
        w = ws.gen_weight(g)
        q = g.parity
        if q:
            cap = 1
        elif w > 0:
            cap = int(Q(max_weight) // w) if Q(max_weight) >= w else 0
        else:
            cap = zero_weight_cap
        if cap > 0:
            items.append(AnsatzItem(g, w, q, cap))
    return items


def jets_up_to_weight(ws: WeightSystem, fields, max_weight):
    """All jet variables of the given fields with weight <= max_weight."""
    out = []
    for u in fields:
        base = ws.field_weight(u)
        flags = [(0, 0)]
        if u.n_susy >= 1:
            flags.append((1, 0))
        if u.n_susy >= 2:
            flags += [(0, 1), (1, 1)]
        for d1, d2 in flags:
            m = 0
            while base + m + Q(d1 + d2, 2) <= Q(max_weight):
                out.append(JetVar(u, d1, d2, m))
                m += 1
    return out


def enumerate_monomials(items: Sequence[AnsatzItem], weight, parity, include_scalar=False):
    """All canonical monomials of the exact weight and parity.

    Negative-weight factors are allowed only via parameters of negative
    weight with ``max_exp`` caps supplied by the caller.
    """
    weight = Q(weight)
    items = sorted(items, key=lambda it: (it.weight <= 0, str(it.factor)))
    results = []

    def build(i, remaining, par, chosen):
        if i == len(items):
            if remaining == 0 and par == parity:
                if chosen or include_scalar:
                    results.append(tuple(chosen))
            return
        it = items[i]
        max_e = it.max_exp
        if it.weight > 0:
            max_e = min(max_e, int(remaining // it.weight) if remaining >= it.weight else 0)
        for e in range(0, max_e + 1):
            if e and it.weight > 0 and it.weight * e > remaining:
                break
            build(
                i + 1,
                remaining - it.weight * e,
                (par + it.parity * e) % 2,
                chosen + [(it.factor, e)] if e else chosen,
            )

    build(0, weight, 0, [])
    out = []
    for combo in results:
        m = SuperPoly.one()
        for factor, e in combo:
            if isinstance(factor, tuple) and factor[0] == "param":
                m = m * SuperPoly.param(factor[1], e)
            else:
                m = m * SuperPoly.from_gen(factor) ** e
        if not m.is_zero:
            out.append(m)
    # deterministic order
    out.sort(key=lambda m: _mono_key(m))
    return out


def _mono_key(m: SuperPoly):
    from .algebra import term_order_key

    (key,) = m.terms
    return term_order_key(key)
