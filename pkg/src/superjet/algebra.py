"""Canonical arithmetic for Grassmann-graded differential polynomials.

Values are sparse sums of monomials with exact rational coefficients.  A
monomial collects four kinds of data:

* even factors with positive integer exponents,
* an ordered word of distinct odd factors (the canonical order is
  theta-variables, then Clifford-type auxiliaries, then jet variables,
  each sorted by name and derivative index),
* function factors ``Q^(k)(b)`` of a single even zeroth-order argument,
* a Laurent monomial in declared scalar parameters.

Reordering two odd factors flips the sign of the coefficient; a repeated
odd factor annihilates the monomial, except for Clifford auxiliaries
whose square reduces to a declared even parameter monomial.  All
operations return fully canonical values, and every value is immutable
after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

EVEN = 0
ODD = 1

#: derivative direction labels
D1, D2, DX, DT = "D1", "D2", "Dx", "Dt"

Rat = Union[int, Fraction]


class UndeclaredGeneratorError(ValueError):
    pass


class ParityError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSymbol:
    """A dependent variable: bosonic or fermionic, with 0..2 susy directions."""

    name: str
    parity: int
    n_susy: int = 1

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise ValueError(f"bad parity {self.parity!r} for field {self.name}")
        if self.n_susy not in (0, 1, 2):
            raise ValueError(f"bad susy count {self.n_susy!r} for field {self.name}")

    def __repr__(self):
        return f"FieldSymbol({self.name!r})"


@dataclass(frozen=True)
class Phantom(FieldSymbol):
    """Linearized counterpart of a field; same parity, capitalized by convention."""

    base: FieldSymbol = None

    def __repr__(self):
        return f"Phantom({self.name!r})"


@dataclass(frozen=True)
class Theta:
    """An anticommuting independent variable theta^i (odd, squares to zero)."""

    index: int

    @property
    def parity(self):
        return ODD

    def sort_key(self):
        return (0, self.index, "", 0, 0, 0)

    def __repr__(self):
        return f"Theta({self.index})"


@dataclass(frozen=True)
class Clifford:
    """Odd auxiliary whose square is a declared even parameter monomial.

    ``square`` is a pair (rational, params) where params is a sorted tuple
    of (name, exponent).
    """

    name: str
    square: tuple = (Fraction(1), ())

    @property
    def parity(self):
        return ODD

    def sort_key(self):
        return (1, 0, self.name, 0, 0, 0)

    def __repr__(self):
        return f"Clifford({self.name!r})"


@dataclass(frozen=True)
class JetVar:
    """A derivative coordinate D1^d1 D2^d2 Dx^m (field)."""

    fieldsym: FieldSymbol
    d1: int = 0
    d2: int = 0
    m: int = 0

    def __post_init__(self):
        if self.d1 not in (0, 1) or self.d2 not in (0, 1) or self.m < 0:
            raise ValueError(f"bad jet indices ({self.d1},{self.d2},{self.m})")
        n = self.fieldsym.n_susy
        if (self.d1 and n < 1) or (self.d2 and n < 2):
            raise ValueError(
                f"field {self.fieldsym.name} has no direction D{2 if self.d2 else 1}"
            )

    @property
    def parity(self):
        return (self.fieldsym.parity + self.d1 + self.d2) % 2

    def sort_key(self):
        return (2, 0, self.fieldsym.name, self.d1, self.d2, self.m)

    def __repr__(self):
        return f"JetVar({self.fieldsym.name},{self.d1},{self.d2},{self.m})"


Generator = Union[Theta, Clifford, JetVar]


def jet(fieldsym: FieldSymbol, d1: int = 0, d2: int = 0, m: int = 0) -> JetVar:
    return JetVar(fieldsym, d1, d2, m)


def _merge_params(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        e2 = d.get(k, 0) + e
        if e2:
            d[k] = e2
        else:
            del d[k]
    return tuple(sorted(d.items()))


def _merge_odds(a: tuple, b: tuple):
    """Merge two canonical odd words, counting transposition sign.

    Returns (coeff, params, word) where coeff/params absorb signs and
    Clifford square reductions, or (0, (), ()) when the product vanishes.
    """
    sign = 1
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if b[j].sort_key() < a[i].sort_key():
            out.append(b[j])
            j += 1
            if (len(a) - i) % 2:
                sign = -sign
        else:
            out.append(a[i])
            i += 1
    out.extend(a[i:])
    out.extend(b[j:])
    coeff = Fraction(sign)
    params = ()
    k = 0
    reduced = []
    while k < len(out):
        if k + 1 < len(out) and out[k] == out[k + 1]:
            g = out[k]
            if isinstance(g, Clifford):
                sq_rat, sq_params = g.square
                coeff *= sq_rat
                params = _merge_params(params, sq_params)
                k += 2
                continue
            return Fraction(0), (), ()
        reduced.append(out[k])
        k += 1
    return coeff, params, tuple(reduced)


def _merge_evens(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for g, e in b:
        d[g] = d.get(g, 0) + e
    return tuple(sorted(d.items(), key=lambda ge: ge[0].sort_key()))


def _merge_funcs(a, b):
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


#: monomial key layout: (evens, odds, funcs, params)
_ONE_KEY = ((), (), (), ())


def _key_parity(key):
    return len(key[1]) % 2


class SuperPoly:
    """A canonical graded differential polynomial (immutable)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping = ()):
        t = {k: c for k, c in dict(terms).items() if c}
        object.__setattr__(self, "terms", t)

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero() -> "SuperPoly":
        return SuperPoly({})

    @staticmethod
    def scalar(c: Rat) -> "SuperPoly":
        c = Fraction(c)
        return SuperPoly({_ONE_KEY: c} if c else {})

    @staticmethod
    def one() -> "SuperPoly":
        return SuperPoly.scalar(1)

    @staticmethod
    def from_gen(g: Generator) -> "SuperPoly":
        if isinstance(g, (Theta, Clifford)) or g.parity == ODD:
            key = ((), (g,), (), ())
        else:
            key = (((g, 1),), (), (), ())
        return SuperPoly({key: Fraction(1)})

    @staticmethod
    def param(name: str, exp: int = 1) -> "SuperPoly":
        if exp == 0:
            return SuperPoly.one()
        return SuperPoly({((), (), (), ((name, exp),)): Fraction(1)})

    @staticmethod
    def func(name: str, order: int, arg: JetVar) -> "SuperPoly":
        """A function factor ``name^(order)(arg)`` of one even zeroth-order jet."""
        if arg.parity != EVEN or arg.d1 or arg.d2 or arg.m:
            raise ValueError(
                f"function {name} needs an even zeroth-order jet argument, got {arg!r}"
            )
        return SuperPoly({((), (), ((name, order, arg),), ()): Fraction(1)})

    # -- predicates --------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def parity(self):
        """EVEN/ODD if homogeneous, None for zero or mixed."""
        if not self.terms:
            return None
        ps = {_key_parity(k) for k in self.terms}
        return ps.pop() if len(ps) == 1 else None

    def parity_report(self):
        """Split into (even part, odd part)."""
        even = {k: c for k, c in self.terms.items() if _key_parity(k) == EVEN}
        odd = {k: c for k, c in self.terms.items() if _key_parity(k) == ODD}
        return SuperPoly(even), SuperPoly(odd)

    # -- arithmetic --------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        t = dict(self.terms)
        for k, c in other.terms.items():
            c2 = t.get(k, Fraction(0)) + c
            if c2:
                t[k] = c2
            else:
                t.pop(k, None)
        return SuperPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return SuperPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict = {}
        for (e1, o1, f1, p1), c1 in self.terms.items():
            for (e2, o2, f2, p2), c2 in other.terms.items():
                coeff, sq_params, odds = _merge_odds(o1, o2)
                if not coeff:
                    continue
                key = (
                    _merge_evens(e1, e2),
                    odds,
                    _merge_funcs(f1, f2),
                    _merge_params(_merge_params(p1, p2), sq_params),
                )
                c = c1 * c2 * coeff
                c0 = out.get(key, Fraction(0)) + c
                if c0:
                    out[key] = c0
                else:
                    out.pop(key, None)
        return SuperPoly(out)

    def __rmul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return SuperPoly({k: c / Fraction(other) for k, c in self.terms.items()})
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of polynomials are not defined")
        out = SuperPoly.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "SuperPoly(0)"
        bits = []
        for key in sorted(self.terms, key=_term_sort_key):
            bits.append(f"{self.terms[key]}*{_key_repr(key)}")
        return "SuperPoly(" + " + ".join(bits) + ")"

    # -- structure ---------------------------------------------------

    def generators(self):
        """All distinct generators occurring in this value."""
        seen = set()
        for e, o, f, _p in self.terms:
            for g, _exp in e:
                seen.add(g)
            seen.update(o)
            for _n, _k, arg in f:
                seen.add(arg)
        return seen

    def param_names(self):
        names = set()
        for key in self.terms:
            names.update(n for n, _ in key[3])
        return names

    def coefficient_of_param_power(self, name: str, exp: int) -> "SuperPoly":
        """Collect terms with the given power of a parameter, dividing it out."""
        out = {}
        for (e, o, f, p), c in self.terms.items():
            d = dict(p)
            if d.get(name, 0) != exp:
                continue
            d.pop(name, None)
            out[(e, o, f, tuple(sorted(d.items())))] = c
        return SuperPoly(out)

    def max_param_power(self, name: str) -> int:
        best = 0
        for key in self.terms:
            for n, e in key[3]:
                if n == name:
                    best = max(best, e)
        return best


def _coerce(x):
    if isinstance(x, SuperPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return SuperPoly.scalar(x)
    if isinstance(x, (Theta, Clifford, JetVar)):
        return SuperPoly.from_gen(x)
    return NotImplemented


def _term_sort_key(key):
    e, o, f, p = key
    return (
        tuple(g.sort_key() for g in o),
        tuple((g.sort_key(), x) for g, x in e),
        f,
        p,
    )


def term_order_key(key):
    """Deterministic global ordering of monomial keys (used for normalization)."""
    return _term_sort_key(key)


def _key_repr(key):
    e, o, f, p = key
    bits = [f"{g!r}^{x}" if x != 1 else repr(g) for g, x in e]
    bits += [repr(g) for g in o]
    bits += [f"{n}^({k})({arg!r})" for n, k, arg in f]
    bits += [f"{n}^{x}" for n, x in p]
    return "*".join(bits) if bits else "1"


def normalize(raw_terms: Iterable[tuple]) -> SuperPoly:
    """Canonicalize a list of raw terms ``(coeff, factors)``.

    Factors are generators in written order; repeated odd factors
    annihilate, Clifford squares reduce, and reordering signs are
    absorbed into the coefficient.
    """
    out = SuperPoly.zero()
    for coeff, factors in raw_terms:
        t = SuperPoly.scalar(coeff)
        for g in factors:
            t = t * SuperPoly.from_gen(g)
        out = out + t
    return out


def prod(factors: Sequence, coeff: Rat = 1) -> SuperPoly:
    """Ordered product of generators/polynomials with a scalar prefactor."""
    out = SuperPoly.scalar(coeff)
    for g in factors:
        out = out * _coerce(g)
    return out


def parity_of(p: SuperPoly):
    """Common parity of all terms, or a (even part, odd part) mixed report."""
    q = p.parity()
    if q is not None or p.is_zero:
        return q if not p.is_zero else EVEN
    return p.parity_report()
