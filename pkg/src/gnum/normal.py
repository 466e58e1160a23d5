"""Canonical normal forms for the oscillator-free fragment.

A :class:`NormalForm` is stored piecewise: the primitives occurring in the
germ cut the index universe into minterms, and on each nonempty minterm the
germ is a generalized polynomial ``sum c_k * (iota*eps)**r_k`` in the
diameter.  This makes equality, the valuation and all atomwise reasoning
exact.  The user-facing term list ``sum c_i alpha_{r_i} X_{A_i}`` is derived
by grouping minterms that carry the same polynomial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy

from . import scalars as S
from .errors import NotNormalizable, PrecisionError
from .germ import (AbsVal, Add, Alpha, Chi, Conj, Const, Germ, ImPart, Mul, Neg, Osc,
                   MAX_BITS, PrimeScale, RePart, default_precision, descriptors, ONE, ZERO)
from .sets import (FULL, SetDescriptor, TailClass, analyze, describe, high_level,
                   sample_points, sorted_prims)
from .testpoint import TestPoint

INF = math.inf

# -- generalized polynomials in the diameter ---------------------------------
# A Poly is a tuple of (exponent, coefficient) pairs, exponents increasing,
# coefficients nonzero exact scalars.


def _poly(d) -> tuple:
    return tuple(sorted((r, c) for r, c in d.items() if c != 0))


def padd(p, q):
    d = dict(p)
    for r, c in q:
        d[r] = S.add(d.get(r, Fraction(0)), c)
    return _poly(d)


def pmul(p, q):
    d = {}
    for r1, c1 in p:
        for r2, c2 in q:
            r = r1 + r2
            d[r] = S.add(d.get(r, Fraction(0)), S.mul(c1, c2))
    return _poly(d)


def pmap(p, fn):
    return _poly({r: fn(c) for r, c in p})


def peval(p, u: Fraction, bits=96):
    acc = Fraction(0)
    for r, c in p:
        acc = S.add(acc, S.mul(c, S.power(u, r, bits)))
    return acc


def sign_on_unit_interval(p):
    """+1 or -1 when the real Poly keeps one sign on ``0 < u < 1``, else None.

    Substituting ``u = v**L`` clears exponent denominators, so the question
    becomes whether an ordinary rational polynomial has a root of odd
    multiplicity in (0, 1); that is settled exactly by root isolation.
    """
    lead = p[0][1]
    if len(p) == 1:
        return 1 if lead > 0 else -1
    big_l = math.lcm(*(r.denominator for r, _ in p))
    low = p[0][0]
    coeffs = {int((r - low) * big_l): c for r, c in p}
    v = sympy.Symbol("v")
    poly = sympy.Poly({(k,): sympy.Rational(c.numerator, c.denominator)
                       for k, c in coeffs.items()}, v, domain="QQ")
    for factor, mult in poly.sqf_list()[1]:
        if mult % 2 == 0:
            continue
        n = factor.count_roots(0, 1)
        if factor.eval(1) == 0:
            n -= 1
        if n:
            return None
    return 1 if lead > 0 else -1


def pabs(p):
    """``|p|`` as a Poly when its sign (or phase) is constant on the unit interval."""
    if not p:
        return p
    c0 = p[0][1]
    m0 = S.exact_abs(c0)
    if m0 is None:
        raise NotNormalizable("modulus of a complex coefficient is irrational")
    re0, im0 = S.to_complex_parts(c0)
    real = {}
    for r, c in p:
        re, im = S.to_complex_parts(c)
        # c * conj(c0) must be real, so that p = (c0/|c0|) * (real poly)
        if im * re0 - re * im0 != 0:
            raise NotNormalizable("abs over terms with different phases")
        real[r] = (re * re0 + im * im0) / m0
    q = _poly(real)
    sign = sign_on_unit_interval(q)
    if sign is None:
        raise NotNormalizable("abs over a term that changes sign")
    return q if sign > 0 else pmap(q, S.neg)


# -- normal forms --------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    c: object
    r: Fraction
    atom: SetDescriptor


class NormalForm:
    """Piecewise generalized polynomial over the minterms of ``prims``."""

    __slots__ = ("prims", "pieces")

    def __init__(self, prims, pieces):
        prims = sorted_prims(prims)
        live = analyze(prims).nonempty
        object.__setattr__(self, "prims", prims)
        pieces = {b: _poly(dict(p)) for b, p in pieces.items() if b in live}
        object.__setattr__(self, "pieces", {b: p for b, p in pieces.items() if p})

    def __setattr__(self, name, value):
        raise AttributeError("NormalForm is immutable")

    # constructors
    @classmethod
    def const(cls, c):
        return cls.build((), lambda env: ((Fraction(0), S.as_exact(c)),))

    @classmethod
    def alpha(cls, r):
        return cls.build((), lambda env: ((Fraction(r), Fraction(1)),))

    @classmethod
    def chi(cls, A: SetDescriptor):
        prims = sorted_prims(A.prims())
        return cls.build(prims, lambda env: ((Fraction(0), Fraction(1)),) if A.holds(env) else ())

    @classmethod
    def build(cls, prims, fn):
        """Normal form whose polynomial on each minterm is ``fn(env)``."""
        prims = sorted_prims(prims)
        pieces = {}
        for bits in analyze(prims).nonempty:
            pieces[bits] = fn(dict(zip(prims, bits)))
        return cls(prims, pieces)

    # structure
    @property
    def analysis(self):
        return analyze(self.prims)

    def poly(self, bits) -> tuple:
        return self.pieces.get(bits, ())

    def refine(self, prims) -> dict:
        """Pieces re-indexed by the minterms of a superset of primitives."""
        prims = sorted_prims(prims)
        pos = [prims.index(p) for p in self.prims]
        out = {}
        for bits in analyze(prims).nonempty:
            p = self.pieces.get(tuple(bits[i] for i in pos))
            if p:
                out[bits] = p
        return out

    def _align(self, other):
        prims = sorted_prims(set(self.prims) | set(other.prims))
        if prims == self.prims and prims == other.prims:
            return prims, self.pieces, other.pieces
        return prims, self.refine(prims), other.refine(prims)

    def minterm_of(self, t: TestPoint) -> tuple:
        return tuple(p.contains(t.eps, t.level) for p in self.prims)

    def near_pieces(self):
        """``(bits, poly)`` for minterms recurring near 0 on high levels."""
        an = self.analysis
        return [(b, p) for b, p in sorted(self.pieces.items()) if b in an.near]

    def tail_of(self, bits) -> TailClass:
        return self.analysis.tail_of(bits)

    def describe(self, members) -> SetDescriptor:
        return describe(self.prims, members, self.analysis.nonempty)

    # arithmetic
    def __add__(self, other):
        other = _as_nf(other)
        prims, a, b = self._align(other)
        keys = set(a) | set(b)
        return NormalForm(prims, {k: padd(a.get(k, ()), b.get(k, ())) for k in keys})

    __radd__ = __add__

    def __neg__(self):
        return self.map(S.neg)

    def __sub__(self, other):
        return self + (-_as_nf(other))

    def __rsub__(self, other):
        return _as_nf(other) + (-self)

    def __mul__(self, other):
        other = _as_nf(other)
        prims, a, b = self._align(other)
        keys = set(a) & set(b)
        return NormalForm(prims, {k: pmul(a[k], b[k]) for k in keys})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = NormalForm.const(1)
        for _ in range(n):
            out = out * self
        return out

    def map(self, fn):
        return NormalForm(self.prims, {k: pmap(p, fn) for k, p in self.pieces.items()})

    def shift(self, r):
        """Multiply by ``alpha_r``."""
        r = Fraction(r)
        return NormalForm(self.prims, {k: tuple((e + r, c) for e, c in p)
                                       for k, p in self.pieces.items()})

    def conj(self):
        return self.map(S.conj)

    def real(self):
        return self.map(S.re_part)

    def imag(self):
        return self.map(S.im_part)

    def abs(self):
        return NormalForm(self.prims, {k: pabs(p) for k, p in self.pieces.items()})

    def on(self, members):
        """Restriction to a set of minterms (``x * X_M``)."""
        return NormalForm(self.prims, {k: p for k, p in self.pieces.items() if k in members})

    def restrict(self, A: SetDescriptor):
        return self * NormalForm.chi(A)

    def is_real(self) -> bool:
        return all(S.is_real(c) for p in self.pieces.values() for _, c in p)

    def is_zero(self) -> bool:
        return not self.pieces

    # evaluation
    def evaluate(self, t: TestPoint, prec=None):
        prec = default_precision() if prec is None else Fraction(prec)
        p = self.poly(self.minterm_of(t))
        bits = 96
        while True:
            value = peval(p, t.diameter, bits)
            if S.within(value, prec):
                return value
            bits *= 2
            if bits > MAX_BITS:
                raise PrecisionError(f"cannot reach width {float(prec):.3g} at {t}")

    # canonical presentation
    def groups(self):
        """``[(atom, poly)]``: maximal unions of minterms sharing a nonzero poly."""
        by_poly = {}
        for bits, p in self.pieces.items():
            by_poly.setdefault(p, set()).add(bits)
        out = [(self.describe(members), p) for p, members in by_poly.items()]
        return sorted(out, key=lambda g: g[0].key())

    def terms(self) -> list:
        """One term per monomial ``c * u**r``, on the union of minterms carrying it."""
        by_mono = {}
        for bits, p in self.pieces.items():
            for r, c in p:
                by_mono.setdefault((r, c), set()).add(bits)
        out = [Term(c, r, self.describe(members)) for (r, c), members in by_mono.items()]
        return sorted(out, key=lambda t: (t.r, t.atom.key(), S.format_scalar(t.c)))

    def to_germ(self) -> Germ:
        parts = []
        for t in self.terms():
            factors = []
            if t.c != 1:
                factors.append(Const(t.c))
            if t.r != 0:
                factors.append(Alpha(t.r))
            if t.atom != FULL:
                factors.append(Chi(t.atom))
            if not factors:
                factors.append(ONE)
            parts.append(factors[0] if len(factors) == 1 else Mul(tuple(factors)))
        if not parts:
            return ZERO
        return parts[0] if len(parts) == 1 else Add(tuple(parts))

    def to_json(self) -> dict:
        terms = self.terms()
        keys = sorted({t.atom.key() for t in terms})
        ids = {k: f"A{i + 1}" for i, k in enumerate(keys)}
        return {
            "terms": [{"c": S.format_scalar(t.c), "r": str(t.r), "atom": ids[t.atom.key()]}
                      for t in terms],
            "atoms": {ids[k]: k for k in keys},
        }

    def __eq__(self, other):
        if not isinstance(other, NormalForm):
            return NotImplemented
        _, a, b = self._align(other)
        return a == b

    def __hash__(self):
        return hash(frozenset(c for p in self.pieces.values() for c in p))

    def __str__(self):
        from .dsl import format_normal
        return format_normal(self)

    def __repr__(self):
        return f"NormalForm({self})"


def _as_nf(x) -> NormalForm:
    if isinstance(x, NormalForm):
        return x
    if isinstance(x, Germ):
        return normalize(x)
    return NormalForm.const(x)


def normalize(x: Germ) -> NormalForm:
    """Exact normal form of an oscillator-free germ.

    Raises :class:`NotNormalizable` for oscillators, the prime-scale germ,
    or an absolute value whose argument changes sign on some minterm.
    """
    if isinstance(x, NormalForm):
        return x
    prims = set()
    for d in descriptors(x):
        prims |= d.prims()
    prims = sorted_prims(prims)
    an = analyze(prims)
    envs = {bits: dict(zip(prims, bits)) for bits in an.nonempty}
    return NormalForm(prims, {bits: _compile(x, env) for bits, env in envs.items()})


def _compile(x: Germ, env) -> tuple:
    if isinstance(x, Const):
        return _poly({Fraction(0): x.c})
    if isinstance(x, Alpha):
        return ((x.r, Fraction(1)),)
    if isinstance(x, Chi):
        return ((Fraction(0), Fraction(1)),) if x.A.holds(env) else ()
    if isinstance(x, Add):
        acc = ()
        for a in x.args:
            acc = padd(acc, _compile(a, env))
        return acc
    if isinstance(x, Mul):
        acc = ((Fraction(0), Fraction(1)),)
        for a in x.args:
            acc = pmul(acc, _compile(a, env))
            if not acc:
                break
        return acc
    if isinstance(x, (Osc, PrimeScale)):
        raise NotNormalizable("oscillating germs have no exact normal form")
    inner = _compile(x.arg, env)
    if isinstance(x, Neg):
        return pmap(inner, S.neg)
    if isinstance(x, AbsVal):
        return pabs(inner)
    if isinstance(x, Conj):
        return pmap(inner, S.conj)
    if isinstance(x, RePart):
        return pmap(inner, S.re_part)
    if isinstance(x, ImPart):
        return pmap(inner, S.im_part)
    raise TypeError(f"not a germ: {x!r}")


# -- exact valuation and nullity -----------------------------------------------


def exact_valuation(x: NormalForm):
    """Least leading exponent over minterms recurring near 0 (``inf`` if none)."""
    leads = [p[0][0] for _, p in x.near_pieces()]
    return min(leads) if leads else INF


@dataclass(frozen=True)
class NullVerdict:
    null: bool
    mode: str                      # "exact" or "sampled"
    witness: tuple = ()            # TestPoints with |x| >= (iota*eps)**a
    a: Fraction | None = None

    def __bool__(self):
        return self.null


def nonnull_witness(x: NormalForm, count=6):
    """Points ``t`` where ``|x(t)| >= (iota*eps)**a`` along ``eps -> 0``."""
    bits, p = min(x.near_pieces(), key=lambda bp: bp[1][0][0])
    a = p[0][0] + 1
    atom = x.describe({bits})
    level = high_level(x.prims)
    pts = []
    for eps in sample_points(atom, level, True, 4 * count, start=Fraction(1, 4)):
        t = TestPoint(level, Fraction(1), eps)
        if S.magnitude(x.evaluate(t)) >= float(t.diameter) ** float(a):
            pts.append(t)
        if len(pts) == count:
            break
    return a, tuple(pts)


def is_null(x) -> NullVerdict:
    """Whether ``x`` is a null germ (valuation ``+inf``).

    Oscillator-free germs are decided exactly; otherwise the verdict comes
    from sampling and is marked as such.
    """
    try:
        nf = normalize(x) if isinstance(x, Germ) else _as_nf(x)
    except NotNormalizable:
        from .oracle import SampleGrid, sampled_valuation
        est, band = sampled_valuation(x, SampleGrid.default())
        return NullVerdict(est == INF or est - band > SAMPLED_NULL_SLOPE, "sampled")
    if exact_valuation(nf) == INF:
        return NullVerdict(True, "exact")
    a, pts = nonnull_witness(nf)
    return NullVerdict(False, "exact", pts, a)


# slopes steeper than this on the default grid are read as "probably null"
SAMPLED_NULL_SLOPE = 12
