"""Units, zero sets, the sets N_a(x), approximation by units, idempotents and ideals.

All constructions work on the minterm structure of a :class:`NormalForm`:
a set built here is a union of minterms, decided by the behaviour of the
minterm's polynomial as ``eps -> 0``.  Such a set agrees with the
pointwise set it models on every minterm that recurs near 0, which is all
that matters up to null germs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import combinations

from sympy import prime

from . import scalars as S
from .errors import NotIdempotent, PrecisionError, PreconditionError, ScaleNotFound, TooLarge
from .germ import PrimeScale, evaluate, smallest_prime_exponent
from .normal import INF, NormalForm, exact_valuation, padd, pmap, pmul
from .sets import (SetDescriptor, TailClass, _cutoff_block, complement, high_level,
                   intersect, is_empty, tail_class, union)
from .testpoint import TestPoint
from .valuation import SharpNorm, as_normal, e_pow, norm

A_MAX = 64


# -- minterm helpers -------------------------------------------------------------


def _tail(nf: NormalForm, members) -> TailClass:
    near = nf.analysis.near
    hit = near & frozenset(members)
    if not hit:
        return TailClass.NULL
    return TailClass.FULL if hit == near else TailClass.PROPER


def _abs_minus_power(p, a):
    """The real Poly ``|p|**2 - u**(2a)``."""
    sq = pmul(p, pmap(p, S.conj))
    return padd(sq, ((Fraction(2 * a), Fraction(-1)),))


def below_scale(p, a) -> bool:
    """Whether ``|p(u)| < u**a`` for all small enough ``u > 0``."""
    q = _abs_minus_power(p, a)
    return bool(q) and q[0][1] < 0


def _lead(p):
    return p[0][0] if p else INF


# -- zero sets and N_a -------------------------------------------------------------


def zero_set(x) -> SetDescriptor:
    """Union of the minterms on which ``x`` vanishes identically.

    Isolated roots of a nonzero polynomial sit at fixed diameters and
    never accumulate at 0, so they are left out.
    """
    nf = as_normal(x)
    return nf.describe({b for b in nf.analysis.nonempty if not nf.poly(b)})


@dataclass(frozen=True)
class NaSet:
    """``N_a(x) = {phi : |x(phi)| < alpha_a(phi)}``.

    ``members``/``descriptor`` give the minterm union that coincides with
    it near 0; :meth:`contains` is the exact pointwise predicate.
    """

    x: NormalForm
    a: int
    members: frozenset
    descriptor: SetDescriptor

    def contains(self, t: TestPoint) -> bool:
        u = t.diameter
        bound = u ** (2 * self.a)
        value = self.x.evaluate(t, prec=Fraction(1, 2**200))
        if S.is_exact(value):
            return S.to_complex_parts(value)[0] ** 2 + S.to_complex_parts(value)[1] ** 2 < bound
        lo_hi = S.absval(value)
        lo, hi = float(lo_hi.re.a), float(lo_hi.re.b)
        if hi * hi < bound:
            return True
        if lo * lo >= bound:
            return False
        raise PrecisionError(f"|x| too close to alpha_{self.a} at {t}")

    @property
    def tail_class(self) -> TailClass:
        return _tail(self.x, self.members)

    def in_Sf(self) -> bool:
        return self.tail_class is TailClass.PROPER


def n_a_set(x, a: int) -> NaSet:
    nf = as_normal(x)
    members = frozenset(b for b in nf.analysis.nonempty
                        if not nf.poly(b) or below_scale(nf.poly(b), a))
    return NaSet(nf, a, members, nf.describe(members))


def least_scale(x, start=1, a_max=A_MAX) -> NaSet:
    """``N_a(x)`` for the least ``a >= start`` with ``N_a(x)`` in S_f."""
    for a in range(start, a_max + 1):
        n = n_a_set(x, a)
        if n.in_Sf():
            return n
    raise ScaleNotFound(f"no a in [{start}, {a_max}] with N_a(x) in S_f")


# -- units -------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitWitness:
    """``|x(phi_eps)| >= (iota*eps)**r`` for ``eps < eta`` on every level ``>= level``."""

    r: Fraction
    eta: Fraction
    level: int

    def check(self, x, t: TestPoint) -> bool:
        nf = as_normal(x)
        value = nf.evaluate(t, prec=Fraction(1, 2**200))
        return S.magnitude(value) >= float(t.diameter) ** float(self.r)


@dataclass(frozen=True)
class UnitVerdict:
    unit: bool
    witness: UnitWitness | None = None
    obstruction: SetDescriptor | None = None   # S in S_f with x * X_S = 0

    def __bool__(self):
        return self.unit


def _eta_for(p, r):
    """Rational eta with ``|p(u)| >= u**r`` for ``0 < u < eta`` (``r >= lead + 1``)."""
    (l, c), rest = p[0], p[1:]
    re, im = S.to_complex_parts(c)
    c_lo = max(abs(re), abs(im))               # |c| >= c_lo
    need = [(r - l, c_lo / 2)]                  # u**(r-l) <= |c|/2
    if rest:
        tail = sum(abs(S.to_complex_parts(ck)[0]) + abs(S.to_complex_parts(ck)[1])
                   for _, ck in rest)
        need.append((rest[0][0] - l, c_lo / (2 * tail)))   # tail * u**d <= |c|/2 * u**0
    n = 0
    for delta, w in need:
        # smallest n with 2**(-n*delta) <= w, with a safety margin of one
        if w < 1:
            n = max(n, math.ceil(-math.log2(w) / delta) + 1)
    return Fraction(1, 2**n)


def is_unit(x) -> UnitVerdict:
    nf = as_normal(x)
    near = nf.near_pieces()
    if not near:
        raise PreconditionError("x is null")
    an = nf.analysis
    zeros = [b for b in an.near if not nf.poly(b)]
    if zeros:
        return UnitVerdict(False, obstruction=nf.describe(set(zeros)))
    r = max(Fraction(1), max(p[0][0] for _, p in near) + 1)
    eta = Fraction(1, 2 ** _cutoff_block(nf.prims))
    for _, p in near:
        eta = min(eta, _eta_for(p, r))
    return UnitVerdict(True, UnitWitness(r, eta, high_level(nf.prims)))


# -- the approximation theorem -------------------------------------------------------


@dataclass(frozen=True)
class CaseA:
    """``x * X_S = 0`` and ``|x * X_{S^c}| >= alpha_a * X_{S^c}``."""

    S: SetDescriptor
    a: int
    members: frozenset = field(default=frozenset(), compare=False)
    kind = "A"


@dataclass(frozen=True)
class CaseB:
    """Nested ``S_n`` with increasing ``a_n`` and ``|x * X_{S_n}| < alpha_{a_n}``.

    ``truncated`` is set when the construction stopped at ``max_n`` before
    deciding between the two cases.
    """

    pairs: tuple                    # ((a_n, S_n), ...)
    truncated: bool = True
    members: tuple = field(default=(), compare=False)
    kind = "B"

    @property
    def length(self):
        return len(self.pairs)


def _check_nonunit(nf):
    if exact_valuation(nf) == INF:
        raise PreconditionError("x is null")
    if is_unit(nf):
        raise PreconditionError("x is a unit")


def approx_decompose(x, max_n: int = A_MAX):
    """Run the nested construction ``S_{n+1} = S_n & N_{a_{n+1}}(x * X_{S_n})``."""
    nf = as_normal(x)
    _check_nonunit(nf)
    n = least_scale(nf)
    a, members = n.a, n.members
    pairs = [(a, n.descriptor)]
    chain = [members]
    while True:
        x_next = nf.on(members)
        if exact_valuation(x_next) == INF:
            return CaseA(nf.describe(members), a, members)
        if len(pairs) >= max_n:
            return CaseB(tuple(pairs), True, tuple(chain))
        step = least_scale(x_next)
        members = members & step.members
        a = step.a
        pairs.append((a, nf.describe(members)))
        chain.append(members)


def unit_approx_seq(x, n: int):
    """The ``n``-th unit approximant of ``x``."""
    nf = as_normal(x)
    if exact_valuation(nf) == INF:
        return NormalForm.alpha(n)
    if is_unit(nf):
        return nf
    case = approx_decompose(nf, max_n=max(n, 1))
    if isinstance(case, CaseA):
        chi_s = NormalForm.chi(case.S)
        return nf * (1 - chi_s) + NormalForm.alpha(n) * chi_s
    a_n, s_n = case.pairs[min(n, case.length) - 1]
    chi_s = NormalForm.chi(s_n)
    return nf * (1 - chi_s) + NormalForm.alpha(a_n) * chi_s


def approx_distance_bound(x, case, n: int) -> SharpNorm:
    """``max(exp(-a_n), ||x * X_{S_n}||)`` for CaseB, ``exp(-n)`` for CaseA."""
    if isinstance(case, CaseA):
        return e_pow(n)
    a_n, s_n = case.pairs[min(n, case.length) - 1]
    return max(e_pow(a_n), norm(as_normal(x) * NormalForm.chi(s_n)))


@dataclass(frozen=True)
class Unitization:
    a: int
    y: NormalForm
    e: NormalForm
    S: SetDescriptor


def unitize(x, a_max=A_MAX) -> Unitization:
    """``y = x(1 - e) + e`` with ``e = X_{N_a(x)}`` for the least workable ``a``."""
    nf = as_normal(x)
    _check_nonunit(nf)
    n = least_scale(nf, a_max=a_max)
    e = NormalForm.chi(n.descriptor)
    y = nf * (1 - e) + e
    return Unitization(n.a, y, e, n.descriptor)


def idempotent_to_chi(e) -> SetDescriptor:
    """The S in S_f with ``e - X_S`` null."""
    nf = as_normal(e)
    if exact_valuation(nf * nf - nf) != INF:
        raise NotIdempotent("e*e - e is not null")
    if exact_valuation(nf) == INF or exact_valuation(nf - 1) == INF:
        raise PreconditionError("e must be a nontrivial idempotent")
    s = complement(n_a_set(nf, 1).descriptor)
    assert exact_valuation(nf - NormalForm.chi(s)) == INF
    return s


# -- families and the ideals g_f(F) ---------------------------------------------------


@dataclass(frozen=True)
class Family:
    """A family F over a finite partition ``atoms``: the S_f-members avoiding ``pivot``.

    Over a finite algebra every valid family has this form: the pivot is
    the one relevant atom (not NullTail) that no member of F contains.
    """

    atoms: tuple
    pivot: int

    @cached_property
    def relevant(self) -> tuple:
        return tuple(i for i, a in enumerate(self.atoms)
                     if tail_class(a) is not TailClass.NULL)

    def in_Sf(self, idx) -> bool:
        hit = set(idx) & set(self.relevant)
        return bool(hit) and hit != set(self.relevant)

    def contains(self, idx) -> bool:
        return self.in_Sf(idx) and self.pivot not in idx

    def members(self) -> list:
        return list(self._members)

    @cached_property
    def _members(self) -> tuple:
        n = len(self.atoms)
        out = []
        for size in range(1, n + 1):
            for idx in combinations(range(n), size):
                if self.contains(idx):
                    out.append(frozenset(idx))
        return tuple(out)

    def union_of(self, idx) -> SetDescriptor:
        return union(*[self.atoms[i] for i in sorted(idx)])

    def to_json(self) -> dict:
        return {"atoms": [a.key() for a in self.atoms], "pivot": self.pivot}


def validate_family(atoms, selected) -> bool:
    """Check the family axioms for ``selected`` (a set of atom-index frozensets)."""
    fam = Family(tuple(atoms), 0)
    n = len(atoms)
    universe = [frozenset(idx) for size in range(n + 1) for idx in combinations(range(n), size)]
    sf = [u for u in universe if fam.in_Sf(u)]
    full = frozenset(range(n))
    if any(u not in sf for u in selected):
        return False
    for u in sf:
        if (u in selected) == ((full - u) in selected):
            return False
    return all((u | v) in selected for u in selected for v in selected)


def _check_partition(atoms):
    for a, b in combinations(atoms, 2):
        if not is_empty(intersect(a, b)):
            raise PreconditionError(f"atoms {a} and {b} overlap")
    if not is_empty(complement(union(*atoms))):
        raise PreconditionError("atoms do not cover the index universe")


def enumerate_families(atoms) -> list:
    atoms = tuple(atoms)
    if len(atoms) > 12:
        raise TooLarge("at most 12 atoms")
    _check_partition(atoms)
    probe = Family(atoms, 0)
    fams = [Family(atoms, i) for i in probe.relevant] if len(probe.relevant) >= 2 else []
    for f in fams:
        assert validate_family(atoms, set(f.members()))
    return fams


def brute_force_families(atoms) -> list:
    """All valid families by exhaustive search (small algebras only)."""
    atoms = tuple(atoms)
    n = len(atoms)
    if n > 5:
        raise TooLarge("brute force is limited to 5 atoms")
    probe = Family(atoms, 0)
    full = frozenset(range(n))
    universe = [frozenset(idx) for size in range(n + 1) for idx in combinations(range(n), size)]
    pairs, seen = [], set()
    for u in universe:
        if probe.in_Sf(u) and u not in seen:
            pairs.append((u, full - u))
            seen |= {u, full - u}
    out = []
    for choice in range(2 ** len(pairs)):
        sel = {p[(choice >> i) & 1] for i, p in enumerate(pairs)}
        if validate_family(atoms, sel):
            out.append(frozenset(sel))
    return out


@dataclass(frozen=True)
class IdealVerdict:
    member: bool
    witness: frozenset | None = None     # atom indices of A in F with x*X_A = x
    descriptor: SetDescriptor | None = None

    def __bool__(self):
        return self.member


def null_on(x, A: SetDescriptor) -> bool:
    return exact_valuation(as_normal(x) * NormalForm.chi(A)) == INF


def ideal_member(x, F: Family) -> IdealVerdict:
    """Whether ``x`` lies in g_f(F): some A in F with ``x * X_A - x`` null."""
    nf = as_normal(x)
    support = frozenset(i for i in F.relevant if not null_on(nf, F.atoms[i]))
    if F.pivot in support:
        return IdealVerdict(False)
    witness = support or frozenset(min((m for m in F.members()), key=lambda m: (len(m), sorted(m))))
    assert F.contains(witness)
    return IdealVerdict(True, witness, F.union_of(witness))


# -- the prime-scale germ -------------------------------------------------------------


@dataclass(frozen=True)
class PrimeScaleWitness:
    germ: PrimeScale
    constant_tracks: dict          # p -> [local exponent along eps = p**-n]
    divergent_track: list          # [(eps, local exponent)] along eps = 1/p_n


def _local_exponent(t: TestPoint):
    value = evaluate(PrimeScale(), t)
    if value == 0:
        return INF
    return Fraction(smallest_prime_exponent(t.diameter))


def prime_scale_witness(n_points=8) -> PrimeScaleWitness:
    tracks = {}
    for p in (2, 3, 5):
        tracks[p] = [_local_exponent(TestPoint(0, 1, Fraction(1, p**n)))
                     for n in range(1, n_points + 1)]
    divergent = []
    for n in range(1, n_points + 1):
        eps = Fraction(1, prime(n))
        divergent.append((eps, _local_exponent(TestPoint(0, 1, eps))))
    return PrimeScaleWitness(PrimeScale(), tracks, divergent)
