"""Symbolic representatives ("germs") of generalized numbers.

A germ is an immutable expression tree; evaluating it at a
:class:`~gnum.testpoint.TestPoint` gives the value ``v(phi_eps)`` of the
representative.  Everything except oscillators (and irrational powers of
the diameter) evaluates exactly.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint

from . import scalars as S
from .errors import PrecisionError
from .sets import SetDescriptor
from .testpoint import TestPoint

DEFAULT_PREC = Fraction(1, 10**30)
MAX_BITS = 1 << 14


def default_precision() -> Fraction:
    env = os.environ.get("GNUM_PRECISION")
    return Fraction(env) if env else DEFAULT_PREC


class Germ:
    __slots__ = ()

    def __add__(self, other):
        return Add((self, lift(other)))

    def __radd__(self, other):
        return Add((lift(other), self))

    def __sub__(self, other):
        return Add((self, Neg(lift(other))))

    def __rsub__(self, other):
        return Add((lift(other), Neg(self)))

    def __mul__(self, other):
        return Mul((self, lift(other)))

    def __rmul__(self, other):
        return Mul((lift(other), self))

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("germ powers must be natural numbers")
        if n == 0:
            return Const(Fraction(1))
        if n == 1:
            return self
        return Mul((self,) * n)

    def __str__(self):
        from .dsl import format_germ
        return format_germ(self)

    def children(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Const(Germ):
    c: object

    def __post_init__(self):
        object.__setattr__(self, "c", S.as_exact(self.c))


@dataclass(frozen=True)
class Alpha(Germ):
    """The scale ``alpha_r``: value ``(iota*eps)**r``."""

    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))


@dataclass(frozen=True)
class Chi(Germ):
    A: SetDescriptor


@dataclass(frozen=True)
class Add(Germ):
    args: tuple

    def children(self):
        return self.args


@dataclass(frozen=True)
class Mul(Germ):
    args: tuple

    def children(self):
        return self.args


@dataclass(frozen=True)
class _Unary(Germ):
    arg: Germ

    def children(self):
        return (self.arg,)


class Neg(_Unary):
    pass


class AbsVal(_Unary):
    pass


class Conj(_Unary):
    pass


class RePart(_Unary):
    pass


class ImPart(_Unary):
    pass


@dataclass(frozen=True)
class Osc(Germ):
    """``sin`` or ``cos`` of ``(iota*eps)**-s``."""

    kind: str
    s: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        if self.kind not in ("sin", "cos"):
            raise ValueError("oscillator kind must be 'sin' or 'cos'")
        if self.s < 0:
            raise ValueError("oscillator exponent must be >= 0")


@dataclass(frozen=True)
class PrimeScale(Germ):
    """``(iota*eps)**g`` where g is the least prime dividing ``1/(iota*eps)``.

    When ``1/(iota*eps)`` is not an integer with a prime divisor the
    exponent is +infinity and the value is taken to be 0.
    """


def lift(value) -> Germ:
    if isinstance(value, Germ):
        return value
    return Const(value)


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def alpha(r) -> Alpha:
    return Alpha(Fraction(r))


def chi(A: SetDescriptor) -> Chi:
    return Chi(A)


_UNARY = {"neg": Neg, "abs": AbsVal, "conj": Conj, "re": RePart, "im": ImPart}


def arith(op: str, *args) -> Germ:
    """Build the grammar node for ``op`` applied to ``args``."""
    args = tuple(lift(a) for a in args)
    if op in _UNARY:
        if len(args) != 1:
            raise ValueError(f"{op} is unary")
        return _UNARY[op](args[0])
    if op == "add":
        return Add(args)
    if op == "mul":
        return Mul(args)
    raise ValueError(f"unknown operation {op!r}")


# -- traversal -----------------------------------------------------------------

def walk(x: Germ):
    stack = [x]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children())


def descriptors(x: Germ) -> list:
    seen = {}
    for node in walk(x):
        if isinstance(node, Chi):
            seen.setdefault(node.A.key(), node.A)
    return [seen[k] for k in sorted(seen)]


def is_oscillator_free(x: Germ) -> bool:
    return not any(isinstance(n, (Osc, PrimeScale)) for n in walk(x))


# -- evaluation ----------------------------------------------------------------

def smallest_prime_exponent(u: Fraction):
    """Least prime dividing ``1/u`` when that is a natural number, else None."""
    if u.numerator != 1 or u.denominator == 1:
        return None
    return min(factorint(u.denominator))


def _ev(x: Germ, t: TestPoint, bits: int):
    u = t.diameter
    if isinstance(x, Const):
        return x.c
    if isinstance(x, Alpha):
        return S.power(u, x.r, bits)
    if isinstance(x, Chi):
        return Fraction(1) if x.A.contains(t.eps, t.level) else Fraction(0)
    if isinstance(x, Add):
        acc = Fraction(0)
        for a in x.args:
            acc = S.add(acc, _ev(a, t, bits))
        return acc
    if isinstance(x, Mul):
        acc = Fraction(1)
        for a in x.args:
            acc = S.mul(acc, _ev(a, t, bits))
        return acc
    if isinstance(x, Neg):
        return S.neg(_ev(x.arg, t, bits))
    if isinstance(x, AbsVal):
        return S.absval(_ev(x.arg, t, bits), bits)
    if isinstance(x, Conj):
        return S.conj(_ev(x.arg, t, bits))
    if isinstance(x, RePart):
        return S.re_part(_ev(x.arg, t, bits))
    if isinstance(x, ImPart):
        return S.im_part(_ev(x.arg, t, bits))
    if isinstance(x, Osc):
        return S.oscillator(x.kind, u, x.s, bits)
    if isinstance(x, PrimeScale):
        p = smallest_prime_exponent(u)
        return Fraction(0) if p is None else u**p
    raise TypeError(f"not a germ: {x!r}")


def evaluate(x: Germ, t: TestPoint, prec=None):
    """Value of the representative at ``t``.

    Exact values come back as ``Fraction``/``GaussRational``; inexact ones as
    an :class:`~gnum.scalars.Enclosure` no wider than ``prec``.
    """
    prec = default_precision() if prec is None else Fraction(prec)
    if prec <= 0:
        raise ValueError("prec must be positive")
    bits = 96
    while True:
        value = _ev(x, t, bits)
        if S.within(value, prec):
            return value
        bits *= 2
        if bits > MAX_BITS:
            raise PrecisionError(f"cannot reach width {float(prec):.3g} at {t}")


eval_germ = evaluate


def moderate_bound(x: Germ):
    """``(C, p)`` with ``|x(t)| <= C * (iota*eps)**-p`` at every test point."""
    if isinstance(x, Const):
        re, im = S.to_complex_parts(x.c)
        return abs(re) + abs(im), Fraction(0)
    if isinstance(x, Alpha):
        return Fraction(1), max(Fraction(0), -x.r)
    if isinstance(x, (Chi, Osc, PrimeScale)):
        return Fraction(1), Fraction(0)
    if isinstance(x, Add):
        bounds = [moderate_bound(a) for a in x.args]
        return sum(c for c, _ in bounds), max((p for _, p in bounds), default=Fraction(0))
    if isinstance(x, Mul):
        c_tot, p_tot = Fraction(1), Fraction(0)
        for a in x.args:
            c, p = moderate_bound(a)
            c_tot *= c
            p_tot += p
        return c_tot, p_tot
    return moderate_bound(x.arg)
