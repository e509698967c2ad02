"""Variational calculus: graded partial derivatives, the Euler operator,
conserved-density tests and Hamiltonian structures."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import (
    D1,
    D2,
    DX,
    EVEN,
    ODD,
    Clifford,
    FieldSymbol,
    JetVar,
    SuperPoly,
    Theta,
)
from .jets import EvolutionSystem, Flow, apply_ops, dt_apply

Q = Fraction


def graded_partial(p: SuperPoly, v) -> SuperPoly:
    """Left partial derivative with respect to a single generator.

    For an odd generator the factor is anticommuted to the leftmost slot
    (collecting signs) and removed; for an even generator the exponent
    rule applies.  Function factors differentiate to their next
    derivative when v is their argument.
    """
    out: dict = {}

    def add(key, c):
        c0 = out.get(key, Q(0)) + c
        if c0:
            out[key] = c0
        else:
            out.pop(key, None)

    odd = isinstance(v, (Theta, Clifford)) or (isinstance(v, JetVar) and v.parity)
    for (evens, odds, funcs, params), c in p.terms.items():
        if odd:
            for j, g in enumerate(odds):
                if g == v:
                    sign = -1 if j % 2 else 1
                    add((evens, odds[:j] + odds[j + 1 :], funcs, params), c * sign)
                    break
        else:
            for i, (g, x) in enumerate(evens):
                if g == v:
                    rest = list(evens)
                    rest[i] = (g, x - 1)
                    rest = tuple(ge for ge in rest if ge[1])
                    add((rest, odds, funcs, params), c * x)
                    break
            for i, (n, k, arg) in enumerate(funcs):
                if arg == v:
                    rest = list(funcs)
                    rest[i] = (n, k + 1, arg)
                    add((evens, odds, tuple(sorted(rest)), params), c)
    return SuperPoly(out)


def euler(H: SuperPoly, fields: Sequence[FieldSymbol]) -> dict:
    """Variational derivatives of a density with respect to each field.

    Integration by parts follows the graded Leibniz rule; the operator
    annihilates every total Dx-, D1- or D2-divergence.
    """
    out = {}
    for u in fields:
        acc = SuperPoly.zero()
        jets = {
            g
            for g in H.generators()
            if isinstance(g, JetVar) and g.fieldsym == u
        }
        for g in jets:
            pd = graded_partial(H, g)
            if pd.is_zero:
                continue
            sign = (-1) ** g.m
            if g.d1:
                sign *= (-1) ** (1 + u.parity)
            if g.d2:
                sign *= (-1) ** (1 + u.parity)
            acc = acc + Q(sign) * apply_ops(
                pd, [D2] * g.d2 + [D1] * g.d1 + [DX] * g.m
            )
        out[u] = acc
    return out


def is_conserved(sys: EvolutionSystem, rho: SuperPoly) -> bool:
    """Whether the density is conserved along the system.

    A density is conserved iff its total t-derivative is a total
    divergence, i.e. iff all its variational derivatives vanish.
    """
    dtr = dt_apply(sys, rho)
    return all(v.is_zero for v in euler(dtr, sys.fields).values())


def conservation_residuals(sys: EvolutionSystem, rho: SuperPoly) -> dict:
    return euler(dt_apply(sys, rho), sys.fields)


# ---------------------------------------------------------------------------
# Hamiltonian structures


@dataclass
class HamiltonianOperator:
    """A matrix of total-derivative operators acting on variational gradients.

    ``entries[u][v]`` is a list of (coefficient, operator word) pairs;
    the flow component of u is the sum over v of coeff * word(grad_v),
    words applied innermost first.
    """

    fields: tuple
    entries: Mapping  # u -> {v -> [(SuperPoly, tuple of directions)]}
    name: str = ""

    def apply_gradient(self, grads: Mapping) -> dict:
        comps = {}
        for u in self.fields:
            acc = SuperPoly.zero()
            for v, terms in self.entries.get(u, {}).items():
                g = grads[v]
                for coeff, word in terms:
                    acc = acc + coeff * apply_ops(g, list(word))
            comps[u] = acc
        return comps


def hamiltonian_flow(op: HamiltonianOperator, H: SuperPoly) -> Flow:
    """The evolutionary flow generated by a Hamiltonian density."""
    grads = euler(H, op.fields)
    return Flow(op.apply_gradient(grads), EVEN)
