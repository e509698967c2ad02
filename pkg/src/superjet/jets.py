"""Jet-space calculus: super-derivatives, total t-derivatives, flows.

Sign conventions, fixed once and verified by the test suite:

* a jet variable is D1^d1 D2^d2 Dx^m (field); derivative indices are
  normalized in that application order, collecting transposition signs
  (D1 D2 = -D2 D1, Di^2 = Dx);
* odd directions act by the graded Leibniz rule
  ``D(ab) = D(a) b + (-1)^|a| a D(b)``;
* an evolutionary derivation of parameter parity q obeys
  ``X D = (-1)^q D X`` on the odd directions.

Non-local (covering) variables carry their declared derivative values;
jets of a non-local variable reduce through those declarations whenever
possible, so only genuinely new coordinates survive normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Optional

from .algebra import (
    D1,
    D2,
    DT,
    DX,
    EVEN,
    ODD,
    Clifford,
    FieldSymbol,
    JetVar,
    ParityError,
    Phantom,
    SuperPoly,
    Theta,
)


class MissingDerivativeError(ValueError):
    """A derivative of a covering variable was demanded but never declared."""


@dataclass(frozen=True)
class Nonlocality(FieldSymbol):
    """A covering (potential) variable with declared derivative values."""

    weight: Optional[Fraction] = dc_field(default=None, compare=False)
    defs: Mapping[str, SuperPoly] = dc_field(default_factory=dict, compare=False)
    base: Optional[FieldSymbol] = dc_field(default=None, compare=False)

    def __post_init__(self):
        super().__post_init__()
        for direction, value in self.defs.items():
            if direction not in (D1, D2, DX, DT):
                raise ValueError(f"unknown direction {direction!r} for {self.name}")
            q = value.parity()
            if q is None and not value.is_zero:
                raise ParityError(f"{direction}({self.name}) has mixed parity")
            if q is not None:
                want = (self.parity + (1 if direction in (D1, D2) else 0)) % 2
                if q != want:
                    raise ParityError(
                        f"{direction}({self.name}) must have parity {want}, got {q}"
                    )

    def __repr__(self):
        return f"Nonlocality({self.name!r})"


@dataclass
class EvolutionSystem:
    """An evolutionary super-system {u_t = rhs_u} with declared parameters."""

    fields: tuple
    rhs: dict
    params: tuple = ()
    name: str = ""

    def __post_init__(self):
        self.fields = tuple(self.fields)
        self.params = tuple(self.params)
        for u in self.fields:
            p = self.rhs[u]
            q = p.parity()
            if q is not None and q != u.parity:
                raise ParityError(f"rhs of {u.name} has parity {q}, field is {u.parity}")

    def as_flow(self) -> "Flow":
        return Flow(dict(self.rhs), EVEN, name=f"{self.name}-t")


@dataclass
class Flow:
    """Components of a flow u_s = phi_u; the parameter s may be even or odd."""

    components: dict
    parameter_parity: int = EVEN
    name: str = ""

    def __post_init__(self):
        for u, p in self.components.items():
            q = p.parity()
            if q is not None and q != (u.parity + self.parameter_parity) % 2:
                raise ParityError(
                    f"component of {u.name} has parity {q}, expected "
                    f"{(u.parity + self.parameter_parity) % 2}"
                )

    @property
    def is_zero(self):
        return all(p.is_zero for p in self.components.values())

    def __add__(self, other):
        assert self.parameter_parity == other.parameter_parity
        keys = set(self.components) | set(other.components)
        return Flow(
            {
                u: self.components.get(u, SuperPoly.zero())
                + other.components.get(u, SuperPoly.zero())
                for u in keys
            },
            self.parameter_parity,
        )

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, c):
        return Flow(
            {u: c * p for u, p in self.components.items()},
            self.parameter_parity,
            name=self.name,
        )


# ---------------------------------------------------------------------------
# derivatives of single generators


def _flag_step(d1, d2, m, direction):
    """New indices and sign for one derivative applied to (d1, d2, m)."""
    if direction == DX:
        return d1, d2, m + 1, 1
    if direction == D1:
        if d1 == 0:
            return 1, d2, m, 1
        return 0, d2, m + 1, 1
    if direction == D2:
        sign = -1 if d1 else 1
        if d2 == 0:
            return d1, 1, m, sign
        return d1, 0, m + 1, sign
    raise ValueError(f"bad direction {direction!r}")


def nonlocal_jet(w: Nonlocality, d1=0, d2=0, m=0) -> SuperPoly:
    """D1^d1 D2^d2 Dx^m (w), reduced through the declared values of w."""
    defs = w.defs
    if d1 and D1 in defs:
        e = defs[D1]
        for _ in range(m):
            e = super_derive(e, DX)
        if d2:
            e = super_derive(e, D2)
        return (-1 if d2 else 1) * e
    if d2 and D2 in defs:
        e = defs[D2]
        for _ in range(m):
            e = super_derive(e, DX)
        if d1:
            e = super_derive(e, D1)
        return e
    if m:
        if DX in defs:
            e = defs[DX]
            m0 = m - 1
        elif D1 in defs:
            e = super_derive(defs[D1], D1)
            m0 = m - 1
        elif D2 in defs:
            e = super_derive(defs[D2], D2)
            m0 = m - 1
        else:
            return SuperPoly.from_gen(JetVar(w, d1, d2, m))
        for _ in range(m0):
            e = super_derive(e, DX)
        if d2:
            e = super_derive(e, D2)
        if d1:
            e = super_derive(e, D1)
        return e
    return SuperPoly.from_gen(JetVar(w, d1, d2, m))


def jet_poly(sym: FieldSymbol, d1=0, d2=0, m=0) -> SuperPoly:
    if isinstance(sym, Nonlocality):
        return nonlocal_jet(sym, d1, d2, m)
    return SuperPoly.from_gen(JetVar(sym, d1, d2, m))


def _derive_gen(g, direction) -> SuperPoly:
    if isinstance(g, Theta):
        if direction == DX:
            return SuperPoly.zero()
        want = 1 if direction == D1 else 2
        return SuperPoly.one() if g.index == want else SuperPoly.zero()
    if isinstance(g, Clifford):
        return SuperPoly.zero()
    sym = g.fieldsym
    idx = {D1: 1, D2: 2, DX: 0}[direction]
    if idx and sym.n_susy < idx:
        # D_i = D_theta^i + theta^i Dx on a theta^i-independent field
        return SuperPoly.from_gen(Theta(idx)) * _derive_gen(g, DX)
    d1, d2, m, sign = _flag_step(g.d1, g.d2, g.m, direction)
    if isinstance(sym, Nonlocality):
        return sign * nonlocal_jet(sym, d1, d2, m)
    return sign * SuperPoly.from_gen(JetVar(sym, d1, d2, m))


# ---------------------------------------------------------------------------
# graded derivations over whole polynomials


def _evens_poly(evens):
    out = SuperPoly.one()
    for g, x in evens:
        out = out * SuperPoly.from_gen(g) ** x
    return out


def _funcs_poly(funcs):
    out = SuperPoly.one()
    for n, k, arg in funcs:
        out = out * SuperPoly.func(n, k, arg)
    return out


def _odds_poly(odds):
    out = SuperPoly.one()
    for g in odds:
        out = out * SuperPoly.from_gen(g)
    return out


def _params_poly(params):
    out = SuperPoly.one()
    for n, x in params:
        out = out * SuperPoly.param(n, x)
    return out


def _derive(p: SuperPoly, gen_image, side: str) -> SuperPoly:
    """Extend a rule on generators to a graded derivation.

    ``side`` selects the Leibniz convention for an odd derivation:

    * ``"even"``  -- no signs (left and right coincide);
    * ``"left"``  -- ``X(ab) = X(a) b + (-1)^|a| a X(b)`` (the super
      derivatives themselves);
    * ``"right"`` -- ``X(ab) = a X(b) + (-1)^|b| X(a) b`` (odd
      evolutionary derivations, which then commute with D).

    The written order of a monomial is evens, function factors, odd word;
    ``gen_image(g)`` returns the image of generator g, placed at g's slot.
    """
    out = SuperPoly.zero()
    for (evens, odds, funcs, params), c in p.terms.items():
        pref = _params_poly(params) * SuperPoly.scalar(c)
        n_odds = len(odds)
        even_sign = -1 if (side == "right" and n_odds % 2) else 1
        for i, (g, x) in enumerate(evens):
            d = gen_image(g)
            if d.is_zero:
                continue
            rest = list(evens)
            rest[i] = (g, x - 1)
            rest = tuple(ge for ge in rest if ge[1])
            out = out + Fraction(x * even_sign) * pref * _evens_poly(
                rest
            ) * _funcs_poly(funcs) * d * _odds_poly(odds)
        for i, (n, k, arg) in enumerate(funcs):
            d = gen_image(arg)
            if d.is_zero:
                continue
            rest = list(funcs)
            rest[i] = (n, k + 1, arg)
            out = out + Fraction(even_sign) * pref * _evens_poly(evens) * _funcs_poly(
                tuple(rest)
            ) * d * _odds_poly(odds)
        for j, g in enumerate(odds):
            d = gen_image(g)
            if d.is_zero:
                continue
            if side == "left":
                sign = -1 if j % 2 else 1
            elif side == "right":
                sign = -1 if (n_odds - 1 - j) % 2 else 1
            else:
                sign = 1
            out = out + Fraction(sign) * pref * _evens_poly(evens) * _funcs_poly(
                funcs
            ) * _odds_poly(odds[:j]) * d * _odds_poly(odds[j + 1 :])
    return out


def super_derive(p: SuperPoly, direction: str) -> SuperPoly:
    """Apply D1, D2 or Dx as a (graded) derivation."""
    if direction == DT:
        raise ValueError("use dt_apply for total t-derivatives")
    side = "left" if direction in (D1, D2) else "even"
    return _derive(p, lambda g: _derive_gen(g, direction), side)


def apply_ops(p: SuperPoly, ops) -> SuperPoly:
    """Apply a sequence of directions, innermost first."""
    for direction in ops:
        p = super_derive(p, direction)
    return p


def _op_list(d1, d2, m):
    """Operator word for D1^d1 D2^d2 Dx^m, innermost (applied first) first."""
    return [DX] * m + [D2] * d2 + [D1] * d1


def dt_apply(sys: EvolutionSystem, p: SuperPoly) -> SuperPoly:
    """Total t-derivative along the system (an even derivation)."""

    def image(g):
        if isinstance(g, (Theta, Clifford)):
            return SuperPoly.zero()
        sym = g.fieldsym
        if isinstance(sym, Nonlocality):
            if DT not in sym.defs:
                raise MissingDerivativeError(
                    f"no t-derivative declared for non-local variable {sym.name}"
                )
            e = sym.defs[DT]
        else:
            if sym not in sys.rhs:
                raise MissingDerivativeError(f"no evolution declared for {sym.name}")
            e = sys.rhs[sym]
        return apply_ops(e, _op_list(g.d1, g.d2, g.m))

    return _derive(p, image, side="even")


def evolutionary_apply(flow: Flow, p: SuperPoly) -> SuperPoly:
    """The evolutionary derivation X_phi of the flow's parameter parity.

    Odd-parameter derivations follow the right Leibniz convention and
    commute with the super derivatives: X(D^kappa u) = D^kappa(phi_u).
    """
    q = flow.parameter_parity

    def image(g):
        if isinstance(g, (Theta, Clifford)):
            return SuperPoly.zero()
        sym = g.fieldsym
        if sym not in flow.components:
            raise MissingDerivativeError(
                f"flow {flow.name or '?'} has no component for {sym.name}"
            )
        return apply_ops(flow.components[sym], _op_list(g.d1, g.d2, g.m))

    return _derive(p, image, side="right" if q else "even")


def commutator(phi: Flow, psi: Flow) -> Flow:
    """Graded commutator of two flows on a common field set."""
    fields = set(phi.components) | set(psi.components)
    sign = -1 if (phi.parameter_parity and psi.parameter_parity) else 1
    comps = {}
    for u in fields:
        a = evolutionary_apply(phi, psi.components.get(u, SuperPoly.zero()))
        b = evolutionary_apply(psi, phi.components.get(u, SuperPoly.zero()))
        comps[u] = a - Fraction(sign) * b
    return Flow(comps, (phi.parameter_parity + psi.parameter_parity) % 2)


def check_symmetry(sys: EvolutionSystem, phi: Flow) -> Flow:
    """Residual of the symmetry condition; identically zero iff phi is a symmetry."""
    comps = {}
    for u in sys.fields:
        comps[u] = dt_apply(sys, phi.components[u]) - evolutionary_apply(
            phi, sys.rhs[u]
        )
    return Flow(comps, phi.parameter_parity, name=f"sym-residual({phi.name})")


# ---------------------------------------------------------------------------
# substitution


def substitute(p: SuperPoly, mapping: Mapping) -> SuperPoly:
    """Graded homomorphic substitution; keys are fields or single generators.

    Field images are prolonged to all jets.  Each image must have the
    parity of the symbol it replaces.
    """
    for sym, img in mapping.items():
        q = img.parity()
        if q is not None and q != sym.parity:
            raise ParityError(
                f"cannot substitute parity-{q} value for parity-{sym.parity} symbol"
            )

    def image_of(g):
        if g in mapping:
            return mapping[g]
        if isinstance(g, JetVar):
            if g.fieldsym in mapping:
                return apply_ops(mapping[g.fieldsym], _op_list(g.d1, g.d2, g.m))
            base = JetVar(g.fieldsym)
            if base in mapping:
                return apply_ops(mapping[base], _op_list(g.d1, g.d2, g.m))
        return SuperPoly.from_gen(g)

    out = SuperPoly.zero()
    for (evens, odds, funcs, params), c in p.terms.items():
        t = _params_poly(params) * SuperPoly.scalar(c)
        for g, x in evens:
            t = t * image_of(g) ** x
        for n, k, arg in funcs:
            if arg in mapping or arg.fieldsym in mapping:
                raise ValueError(
                    f"cannot substitute into the argument of function factor {n}"
                )
            t = t * SuperPoly.func(n, k, arg)
        for g in odds:
            t = t * image_of(g)
        out = out + t
    return out


def substitute_params(p: SuperPoly, values: Mapping[str, Fraction]) -> SuperPoly:
    """Specialize declared parameters to exact rational values."""
    out = {}
    for (evens, odds, funcs, params), c in p.terms.items():
        keep = []
        for n, x in params:
            if n in values:
                v = Fraction(values[n])
                if v == 0:
                    if x > 0:
                        c = Fraction(0)
                        break
                    raise ZeroDivisionError(f"parameter {n} set to 0 with exponent {x}")
                c *= v**x
            else:
                keep.append((n, x))
        if not c:
            continue
        key = (evens, odds, funcs, tuple(keep))
        c0 = out.get(key, Fraction(0)) + c
        if c0:
            out[key] = c0
        else:
            out.pop(key, None)
    return SuperPoly(out)


# ---------------------------------------------------------------------------
# component expansions


def collect_odd_prefix(p: SuperPoly, classes=(Theta,)) -> dict:
    """Group terms by their leading odd factors of the given classes.

    Returns {word: coefficient polynomial} with the word removed; the
    canonical order puts thetas and Clifford auxiliaries first, so the
    coefficient is the left coefficient of the word.
    """
    out: dict = {}
    for (evens, odds, funcs, params), c in p.terms.items():
        k = 0
        while k < len(odds) and isinstance(odds[k], classes):
            k += 1
        word, rest = odds[:k], odds[k:]
        key = (evens, rest, funcs, params)
        bucket = out.setdefault(word, {})
        c0 = bucket.get(key, Fraction(0)) + c
        if c0:
            bucket[key] = c0
        else:
            bucket.pop(key, None)
    return {w: SuperPoly(t) for w, t in out.items() if t}


def component_fields(u: FieldSymbol):
    """Component fields of an N=2 superfield u = u0 + th1 u1 + th2 u2 + th1 th2 u12."""
    mk = lambda suffix, flip: FieldSymbol(u.name + suffix, (u.parity + flip) % 2, 0)
    return mk("0", 0), mk("1", 1), mk("2", 1), mk("12", 0)


def component_expand(sys: EvolutionSystem) -> tuple:
    """Expand an N=2 system into its theta components.

    Returns (component system, expansion mapping).
    """
    th1, th2 = SuperPoly.from_gen(Theta(1)), SuperPoly.from_gen(Theta(2))
    mapping = {}
    comp_fields = []
    for u in sys.fields:
        if u.n_susy != 2:
            raise ValueError(f"field {u.name} is not an N=2 superfield")
        u0, u1, u2, u12 = component_fields(u)
        comp_fields += [u0, u1, u2, u12]
        mapping[u] = (
            SuperPoly.from_gen(JetVar(u0))
            + th1 * JetVar(u1)
            + th2 * JetVar(u2)
            + th1 * th2 * JetVar(u12)
        )
    rhs = {}
    for u in sys.fields:
        expanded = substitute(sys.rhs[u], mapping)
        buckets = collect_odd_prefix(expanded, (Theta,))
        u0, u1, u2, u12 = component_fields(u)
        slots = {(): u0, (Theta(1),): u1, (Theta(2),): u2, (Theta(1), Theta(2)): u12}
        for word, value in buckets.items():
            if word not in slots:
                raise ValueError(f"unexpected theta word {word!r} in expansion")
        for word, comp in slots.items():
            rhs[comp] = buckets.get(word, SuperPoly.zero())
    return (
        EvolutionSystem(tuple(comp_fields), rhs, sys.params, name=sys.name + "-components"),
        mapping,
    )


def clifford_expand(sys: EvolutionSystem, mapping: Mapping) -> EvolutionSystem:
    """Expand a system along a Clifford auxiliary, e.g. u = b + theta f.

    ``mapping`` sends each field of ``sys`` to its expansion; component
    fields are read off as left coefficients of the Clifford words.
    """
    rhs = {}
    fields = []
    for u in sys.fields:
        img = mapping[u]
        expanded = substitute(sys.rhs[u], mapping)
        lhs_buckets = collect_odd_prefix(img, (Clifford,))
        rhs_buckets = collect_odd_prefix(expanded, (Clifford,))
        for word in set(rhs_buckets) - set(lhs_buckets):
            raise ValueError(f"expansion produced unmatched word {word!r}")
        for word, comp_poly in lhs_buckets.items():
            gens = comp_poly.generators()
            if len(gens) != 1 or comp_poly.terms != {
                next(iter(comp_poly.terms)): Fraction(1)
            }:
                raise ValueError("expansion images must be linear with unit coefficients")
            (g,) = gens
            comp = g.fieldsym
            fields.append(comp)
            rhs[comp] = rhs_buckets.get(word, SuperPoly.zero())
    return EvolutionSystem(tuple(fields), rhs, sys.params, name=sys.name + "-expanded")
