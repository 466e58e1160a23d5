"""Computable index sets ``A`` of the mollifier domain.

A descriptor is a Boolean formula over four primitive kinds, each a
per-level subset of ``(0, 1]`` in the scale ``eps``:

``GeomSeq(rho)``      the points ``rho**n`` (n >= 0),
``DyadicClass(m, k)`` the dyadic blocks ``(2**-(n+1), 2**-n]`` with n = k mod m,
``TailInterval(eta)`` the interval ``(0, eta)``,
``Levels(lo, hi)``    everything, but only on levels ``lo <= q <= hi``.

Classification near ``eps = 0`` is exact.  Points of ``(0, 1]`` fall into
two kinds: *generic* points, whose membership only depends on their dyadic
block, and the countably many *thin* points ``rho**j`` of the geometric
sequences.  For ``rho`` an integral power of two the block of ``rho**j`` is
periodic in ``j``; otherwise ``log2 rho`` is irrational and the block index
of ``rho**j`` is equidistributed modulo any ``L`` along every arithmetic
progression of ``j``, so every residue combination recurs infinitely often.
Multiplicative dependence between two ratios is decided from their prime
factorizations.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import product

import sympy
from sympy import factorint

BIG_LEVEL = 10**9

__all__ = [
    "TailClass", "SetDescriptor", "GeomSeq", "DyadicClass", "TailInterval", "Levels",
    "FULL", "EMPTY", "Not", "And", "Or", "complement", "intersect", "union",
    "member", "tail_class", "in_Sf", "is_empty", "atoms", "boolean", "witness",
    "sample_points", "equivalent", "tail_equivalent", "subset", "canonical", "describe",
    "analyze", "dyadic_block", "high_level", "sorted_prims", "BIG_LEVEL",
]


class TailClass(enum.Enum):
    FULL = "FullTail"
    NULL = "NullTail"
    PROPER = "Proper"

    def swap(self):
        return {TailClass.FULL: TailClass.NULL, TailClass.NULL: TailClass.FULL}.get(self, self)


class SetDescriptor:
    """Base class; subclasses are immutable and hashable."""

    __slots__ = ()

    def __invert__(self):
        return complement(self)

    def __and__(self, other):
        return intersect(self, other)

    def __or__(self, other):
        return union(self, other)

    def __str__(self):
        return self.key()

    def __lt__(self, other):
        return self.key() < other.key()

    def prims(self) -> frozenset:
        raise NotImplementedError

    def holds(self, env) -> bool:
        raise NotImplementedError

    def contains(self, eps: Fraction, level: int) -> bool:
        raise NotImplementedError

    def key(self) -> str:
        raise NotImplementedError


class Prim(SetDescriptor):
    __slots__ = ()

    def prims(self):
        return frozenset((self,))

    def holds(self, env):
        return env[self]


@dataclass(frozen=True, eq=True)
class GeomSeq(Prim):
    rho: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rho", Fraction(self.rho))
        if not 0 < self.rho < 1:
            raise ValueError("GeomSeq ratio must lie in (0, 1)")

    def contains(self, eps, level):
        p = Fraction(1)
        while p > eps:
            p *= self.rho
        return p == eps

    def key(self):
        return f"geom({self.rho})"


@dataclass(frozen=True, eq=True)
class DyadicClass(Prim):
    m: int
    k: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("DyadicClass modulus must be >= 2")
        object.__setattr__(self, "k", self.k % self.m)

    def contains(self, eps, level):
        return dyadic_block(eps) % self.m == self.k

    def key(self):
        return f"dyad({self.m},{self.k})"


@dataclass(frozen=True, eq=True)
class TailInterval(Prim):
    eta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eta", Fraction(self.eta))
        if not 0 < self.eta <= 1:
            raise ValueError("TailInterval eta must lie in (0, 1]")

    def contains(self, eps, level):
        return eps < self.eta

    def key(self):
        return f"tail({self.eta})"


@dataclass(frozen=True, eq=True)
class Levels(Prim):
    lo: int
    hi: int | None = None

    def contains(self, eps, level):
        return self.lo <= level and (self.hi is None or level <= self.hi)

    def key(self):
        return f"levels({self.lo},{'inf' if self.hi is None else self.hi})"


@dataclass(frozen=True, eq=True)
class _Const(SetDescriptor):
    value: bool

    def prims(self):
        return frozenset()

    def holds(self, env):
        return self.value

    def contains(self, eps, level):
        return self.value

    def key(self):
        return "full" if self.value else "empty"


FULL = _Const(True)
EMPTY = _Const(False)


@dataclass(frozen=True, eq=True)
class Not(SetDescriptor):
    arg: SetDescriptor

    def prims(self):
        return self.arg.prims()

    def holds(self, env):
        return not self.arg.holds(env)

    def contains(self, eps, level):
        return not self.arg.contains(eps, level)

    def key(self):
        return "~" + _wrap(self.arg)


@dataclass(frozen=True, eq=True)
class And(SetDescriptor):
    args: tuple

    def prims(self):
        return frozenset().union(*(a.prims() for a in self.args))

    def holds(self, env):
        return all(a.holds(env) for a in self.args)

    def contains(self, eps, level):
        return all(a.contains(eps, level) for a in self.args)

    def key(self):
        return " & ".join(_wrap(a) for a in self.args)


@dataclass(frozen=True, eq=True)
class Or(SetDescriptor):
    args: tuple

    def prims(self):
        return frozenset().union(*(a.prims() for a in self.args))

    def holds(self, env):
        return any(a.holds(env) for a in self.args)

    def contains(self, eps, level):
        return any(a.contains(eps, level) for a in self.args)

    def key(self):
        return " | ".join(_wrap(a) for a in self.args)


def _wrap(d):
    return f"({d.key()})" if isinstance(d, (And, Or)) else d.key()


# -- Boolean algebra with syntactic canonicalization ---------------------------

def complement(a: SetDescriptor) -> SetDescriptor:
    if isinstance(a, _Const):
        return EMPTY if a.value else FULL
    if isinstance(a, Not):
        return a.arg
    return Not(a)


def _nary(kind, absorbing, neutral, args):
    flat = []
    for a in args:
        if isinstance(a, kind):
            flat.extend(a.args)
        else:
            flat.append(a)
    seen = {}
    for a in flat:
        if a == absorbing:
            return absorbing
        if a == neutral:
            continue
        seen.setdefault(a.key(), a)
    items = list(seen.values())
    keys = set(seen)
    for a in items:
        if complement(a).key() in keys:
            return absorbing
    if not items:
        return neutral
    if len(items) == 1:
        return items[0]
    return kind(tuple(sorted(items, key=lambda d: d.key())))


def intersect(*args) -> SetDescriptor:
    return _nary(And, EMPTY, FULL, args)


def union(*args) -> SetDescriptor:
    return _nary(Or, FULL, EMPTY, args)


def boolean(op: str, a: SetDescriptor, b: SetDescriptor | None = None) -> SetDescriptor:
    if op == "complement":
        return complement(a)
    if op == "union":
        return union(a, b)
    if op in ("intersect", "intersection"):
        return intersect(a, b)
    raise ValueError(f"unknown Boolean operation {op!r}")


# -- exact membership ----------------------------------------------------------

def dyadic_block(eps: Fraction) -> int:
    """The n with ``2**-(n+1) < eps <= 2**-n``."""
    eps = Fraction(eps)
    inv = eps.denominator // eps.numerator  # floor(1/eps) >= 1
    return inv.bit_length() - 1


def member(t, a: SetDescriptor) -> bool:
    """Exact membership of the test point ``t`` in ``a``."""
    return a.contains(Fraction(t.eps), t.level)


# -- number theory helpers -----------------------------------------------------

@lru_cache(maxsize=None)
def _expvec(rho: Fraction):
    vec = dict(factorint(rho.numerator))
    for p, e in factorint(rho.denominator).items():
        vec[p] = vec.get(p, 0) - e
    return tuple(sorted(vec.items()))


@lru_cache(maxsize=None)
def _period(rho: Fraction, other: Fraction):
    """a such that ``rho**j`` lies in ``GeomSeq(other)`` iff a | j, or None."""
    v, w = dict(_expvec(rho)), dict(_expvec(other))
    if set(v) != set(w):
        return None
    ratios = {Fraction(v[p], w[p]) for p in v}
    if len(ratios) != 1:
        return None
    return ratios.pop().denominator


def _pow2_exponent(rho: Fraction):
    vec = _expvec(rho)
    if len(vec) == 1 and vec[0][0] == 2:
        return -vec[0][1]
    return None


def _lcm(values):
    return reduce(math.lcm, values, 1)


# -- configurations ------------------------------------------------------------

def _level_env(prims, level):
    return {p: p.contains(Fraction(1), level) for p in prims if isinstance(p, Levels)}


def _generic_env(prims, block, level):
    env = _level_env(prims, level)
    for p in prims:
        if isinstance(p, GeomSeq):
            env[p] = False
        elif isinstance(p, DyadicClass):
            env[p] = block % p.m == p.k
        elif isinstance(p, TailInterval):
            env[p] = True
    return env


def _thin_env(prims, rho, jres, block, level):
    env = _generic_env(prims, block, level)
    for p in prims:
        if isinstance(p, GeomSeq):
            a = _period(rho, p.rho)
            env[p] = a is not None and jres % a == 0
    return env


def _near_configs(prims, level):
    """Abstract configurations recurring arbitrarily close to 0.

    Yields ``(env, source)`` where ``source`` lets :func:`_realize` build a
    concrete point of that configuration below any bound.
    """
    prims = tuple(prims)
    moduli = [p.m for p in prims if isinstance(p, DyadicClass)]
    big_l = _lcm(moduli)
    for b in range(big_l):
        yield _generic_env(prims, b, level), ("generic", b, big_l)
    rhos = sorted({p.rho for p in prims if isinstance(p, GeomSeq)})
    for rho in rhos:
        periods = [a for a in (_period(rho, r) for r in rhos) if a is not None]
        per = _lcm(periods)
        s = _pow2_exponent(rho)
        if s is not None:
            big_p = math.lcm(per, big_l)
            for c in range(big_p):
                b = (c * s) % big_l
                yield _thin_env(prims, rho, c, b, level), ("thin", rho, c, big_p, b, big_l)
        else:
            for c in range(per):
                for b in range(big_l):
                    yield _thin_env(prims, rho, c, b, level), ("thin", rho, c, per, b, big_l)


def _cutoff_block(prims) -> int:
    """Below ``2**-N0`` every tail interval holds."""
    n0 = 0
    for p in prims:
        if isinstance(p, TailInterval):
            n0 = max(n0, math.ceil(math.log2(1 / p.eta)) + 1)
    return n0


def _generic_point(lo: Fraction, hi: Fraction, prims):
    """A point of the open interval (lo, hi) lying on no geometric sequence."""
    geos = [p for p in prims if isinstance(p, GeomSeq)]
    for f in (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(3, 7), Fraction(5, 11)):
        x = lo + (hi - lo) * f
        if not any(g.contains(x, 0) for g in geos):
            return x
    raise AssertionError("no generic point found")  # pragma: no cover


def _far_points(prims):
    """Concrete probes covering every configuration above the cutoff."""
    n0 = _cutoff_block(prims)
    floor = Fraction(1, 2 ** (n0 + 1))
    pts = {Fraction(1)}
    etas = sorted(p.eta for p in prims if isinstance(p, TailInterval))
    for n in range(n0 + 1):
        hi, lo = Fraction(1, 2**n), Fraction(1, 2 ** (n + 1))
        cuts = sorted({lo, hi, *[e for e in etas if lo < e < hi]})
        for a, b in zip(cuts, cuts[1:]):
            pts.add(b)
            pts.add(_generic_point(a, b, prims))
    for p in prims:
        if isinstance(p, GeomSeq):
            x = Fraction(1)
            while x >= floor:
                pts.add(x)
                x *= p.rho
    return sorted(pts)


def _levels_to_check(prims):
    levels = {0, BIG_LEVEL}
    for p in prims:
        if isinstance(p, Levels):
            levels.update({p.lo, max(p.lo - 1, 0)})
            if p.hi is not None:
                levels.update({p.hi, p.hi + 1})
    return sorted(levels)


@dataclass(frozen=True)
class Analysis:
    """Which minterms over ``prims`` are nonempty, and their eventual tail class."""

    prims: tuple
    nonempty: frozenset      # bit-tuples realized somewhere
    near: frozenset          # bit-tuples recurring near 0 on high levels

    def tail_of(self, bits) -> TailClass:
        if bits not in self.near:
            return TailClass.NULL
        if self.near == {bits}:
            return TailClass.FULL
        return TailClass.PROPER


@lru_cache(maxsize=4096)
def analyze(prims: tuple) -> Analysis:
    nonempty, near = set(), set()
    far = _far_points(prims)
    for level in _levels_to_check(prims):
        level_near = {tuple(env[p] for p in prims) for env, _ in _near_configs(prims, level)}
        nonempty |= level_near
        for x in far:
            nonempty.add(tuple(p.contains(x, level) for p in prims))
        if level == BIG_LEVEL:
            near = level_near
    return Analysis(prims, frozenset(nonempty), frozenset(near))


def high_level(prims) -> int:
    """Smallest level whose membership pattern matches all sufficiently high levels."""
    q = 0
    for p in prims:
        if isinstance(p, Levels):
            q = max(q, p.lo if p.hi is None else p.hi + 1)
    return q


def sorted_prims(prims) -> tuple:
    return tuple(sorted(prims, key=lambda p: p.key()))


# -- classification ------------------------------------------------------------

def _outcomes_near(a: SetDescriptor, level):
    prims = sorted_prims(a.prims())
    return {a.holds(env) for env, _ in _near_configs(prims, level)}


def tail_class(a: SetDescriptor, level: int | None = None) -> TailClass:
    """Tail class of ``a`` at ``level`` (default: on all sufficiently high levels)."""
    outcomes = _outcomes_near(a, BIG_LEVEL if level is None else level)
    if True not in outcomes:
        return TailClass.NULL
    if False not in outcomes:
        return TailClass.FULL
    return TailClass.PROPER


def in_Sf(a: SetDescriptor) -> bool:
    """Whether ``a`` belongs to S_f: its eps-set is in S on arbitrarily high levels.

    Level masks are intervals, so "for every p some level q >= p" reduces to
    the class on all sufficiently high levels.
    """
    return tail_class(a) is TailClass.PROPER


def is_empty(a: SetDescriptor) -> bool:
    prims = sorted_prims(a.prims())
    an = analyze(prims)
    return not any(a.holds(dict(zip(prims, bits))) for bits in an.nonempty)


def subset(a: SetDescriptor, b: SetDescriptor) -> bool:
    return is_empty(intersect(a, complement(b)))


def equivalent(a: SetDescriptor, b: SetDescriptor) -> bool:
    return subset(a, b) and subset(b, a)


def tail_equivalent(a: SetDescriptor, b: SetDescriptor) -> bool:
    """Equal near 0 on high levels (their characteristic germs differ by a null germ)."""
    diff = union(intersect(a, complement(b)), intersect(b, complement(a)))
    return tail_class(diff) is TailClass.NULL


# -- concrete points ------------------------------------------------------------

def _realize(source, below: Fraction, prims):
    kind = source[0]
    if kind == "generic":
        _, b, big_l = source
        n = max(dyadic_block(below) + 1, _cutoff_block(prims))
        n += (b - n) % big_l
        hi, lo = Fraction(1, 2**n), Fraction(1, 2 ** (n + 1))
        return _generic_point(lo, hi, prims)
    _, rho, c, per, b, big_l = source
    bound = min(below, Fraction(1, 2 ** _cutoff_block(prims)))
    j = 1
    while rho**j >= bound:
        j += 1
    j += (c - j) % per
    for _ in range(100000):
        x = rho**j
        if dyadic_block(x) % big_l == b:
            return x
        j += per
    raise AssertionError("equidistribution search exhausted")  # pragma: no cover


def witness(a: SetDescriptor, level: int = BIG_LEVEL, inside: bool = True,
            below: Fraction | None = None):
    """A concrete ``eps`` (strictly below ``below`` if given) with membership ``inside``.

    Returns None when no such point exists.
    """
    prims = sorted_prims(a.prims())
    if below is None:
        for x in _far_points(prims):
            if a.contains(x, level) == inside:
                return x
        below = Fraction(1, 2 ** (_cutoff_block(prims) + 1))
    for env, source in _near_configs(prims, level):
        if a.holds(env) == inside:
            x = _realize(source, Fraction(below), prims)
            assert a.contains(x, level) == inside
            return x
    return None


def sample_points(a: SetDescriptor, level: int, inside: bool, count: int,
                  start: Fraction = Fraction(1, 4)):
    """``count`` decreasing points of ``a`` (or of its complement) below ``start``."""
    pts, bound = [], Fraction(start)
    for _ in range(count):
        x = witness(a, level, inside, below=bound)
        if x is None:
            break
        pts.append(x)
        bound = x
    return pts


# -- atoms ---------------------------------------------------------------------

def atoms(family) -> list:
    """Atoms of the finite Boolean algebra generated by ``family``."""
    gens = []
    for d in family:
        if all(d.key() != g.key() for g in gens):
            gens.append(d)
    out = []
    for signs in product((True, False), repeat=len(gens)):
        lits = [g if s else complement(g) for g, s in zip(gens, signs)]
        atom = intersect(*lits) if lits else FULL
        if not is_empty(atom):
            out.append(atom)
    return sorted(out, key=lambda d: d.key())


def describe(prims: tuple, members, nonempty=None) -> SetDescriptor:
    """Compact canonical descriptor of a union of minterms over ``prims``.

    Minterms that are never realized are don't-cares for a two-level
    minimization; the shorter of the cover and the complement of the
    complement's cover is returned.
    """
    if nonempty is None:
        nonempty = analyze(prims).nonempty
    members = {m for m in members if m in nonempty}
    if not members:
        return EMPTY
    if members == set(nonempty):
        return FULL
    rest = set(nonempty) - members
    direct = _cover(prims, members, nonempty)
    dual = complement(_cover(prims, rest, nonempty))
    return min((direct, dual), key=lambda d: (len(d.key()), d.key()))


EXACT_COVER_PRIMS = 5


@lru_cache(maxsize=8192)
def _cover_cached(prims, members, nonempty):
    if len(prims) > EXACT_COVER_PRIMS:
        return _greedy_cover(prims, members, nonempty)
    syms = sympy.symbols(f"x0:{len(prims)}")
    universe = product((0, 1), repeat=len(prims))
    dont = [list(map(int, m)) for m in universe
            if tuple(map(bool, m)) not in nonempty]
    expr = sympy.SOPform(syms, [list(map(int, m)) for m in sorted(members)], dont)
    return _from_sympy(expr, dict(zip(syms, prims)))


def _greedy_cover(prims, members, nonempty):
    """Prime implicants by greedy literal dropping; used when exact minimization is too slow."""
    off = [m for m in nonempty if m not in members]
    cubes = set()
    for m in sorted(members):
        cube = dict(enumerate(m))
        for i in range(len(prims)):
            trial = {j: v for j, v in cube.items() if j != i}
            if not any(all(o[j] == v for j, v in trial.items()) for o in off):
                cube = trial
        cubes.add(tuple(sorted(cube.items())))
    # drop cubes whose members are all covered by the others
    chosen = sorted(cubes, key=len)
    for c in list(chosen):
        others = [d for d in chosen if d != c]
        covered = [m for m in members if all(m[j] == v for j, v in c)]
        if others and all(any(all(m[j] == v for j, v in d) for d in others) for m in covered):
            chosen.remove(c)
    terms = [intersect(*[prims[j] if v else complement(prims[j]) for j, v in c]) for c in chosen]
    return union(*terms)


def _cover(prims, members, nonempty):
    return _cover_cached(tuple(prims), frozenset(members), frozenset(nonempty))


def _from_sympy(expr, names):
    if expr is sympy.true:
        return FULL
    if expr is sympy.false:
        return EMPTY
    if isinstance(expr, sympy.Symbol):
        return names[expr]
    if isinstance(expr, sympy.Not):
        return complement(_from_sympy(expr.args[0], names))
    parts = [_from_sympy(a, names) for a in expr.args]
    return intersect(*parts) if isinstance(expr, sympy.And) else union(*parts)


def canonical(a: SetDescriptor) -> SetDescriptor:
    """Semantic canonical form of ``a``."""
    prims = sorted_prims(a.prims())
    an = analyze(prims)
    members = {bits for bits in an.nonempty if a.holds(dict(zip(prims, bits)))}
    return describe(prims, members, an.nonempty)
