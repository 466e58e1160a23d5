"""Exact scalars (rationals, Gaussian rationals) and certified enclosures.

Values produced by germ evaluation are one of

* ``Fraction``        -- exact real rational,
* ``GaussRational``   -- exact complex rational with nonzero imaginary part,
* ``Enclosure``       -- a rectangle of real intervals that certainly contains
                         the value (only produced by oscillators and by
                         irrational powers).
"""
from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import iv
from sympy import integer_nthroot

_IV_LOCK = threading.RLock()


@contextmanager
def ivprec(bits):
    """Run a block with mpmath's interval context at ``bits`` of precision.

    The interval context keeps its precision globally, so callers are
    serialized.
    """
    with _IV_LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            yield iv
        finally:
            iv.prec = saved


@dataclass(frozen=True)
class GaussRational:
    re: Fraction
    im: Fraction

    def __str__(self):
        return format_scalar(self)

    def conjugate(self):
        return GaussRational(self.re, -self.im)

    def norm2(self):
        return self.re * self.re + self.im * self.im


Exact = Union[Fraction, GaussRational]


@dataclass(frozen=True, eq=False)
class Enclosure:
    """Certified rectangle ``re x im`` of mpmath intervals."""

    re: object
    im: object
    bits: int

    @property
    def width(self):
        return max(_delta(self.re), _delta(self.im))

    def midpoint(self):
        return complex(float(self.re.mid), float(self.im.mid))

    def contains(self, value):
        value = to_complex_parts(value)
        return (self.re.a <= value[0] <= self.re.b) and (self.im.a <= value[1] <= self.im.b)

    def __repr__(self):
        return f"Enclosure(re={self.re}, im={self.im})"


ScalarValue = Union[Fraction, GaussRational, Enclosure]


def _upper_width(x, bits):
    """Upper bound on the width of interval ``x`` (as an mpf, no underflow)."""
    with ivprec(bits):
        return mpmath.mpf(x.delta.b)


def _delta(x):
    return float(_upper_width(x, max(iv.prec, 53)))


def as_exact(value) -> Exact:
    """Coerce ints, Fractions, strings and complex-rational pairs to an exact scalar."""
    if isinstance(value, (Fraction, GaussRational)):
        return make_complex(value, 0) if isinstance(value, GaussRational) else value
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, tuple) and len(value) == 2:
        return make_complex(Fraction(value[0]), Fraction(value[1]))
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot make an exact scalar from {value!r}")


def make_complex(re, im=0) -> Exact:
    if isinstance(re, GaussRational):
        re, im = re.re, re.im + Fraction(im)
    re, im = Fraction(re), Fraction(im)
    if im == 0:
        return re
    return GaussRational(re, im)


def to_complex_parts(value):
    if isinstance(value, GaussRational):
        return value.re, value.im
    return Fraction(value), Fraction(0)


def is_exact(value) -> bool:
    return not isinstance(value, Enclosure)


def is_real(value) -> bool:
    if isinstance(value, Enclosure):
        return value.im.a == 0 and value.im.b == 0
    return not isinstance(value, GaussRational)


def parse_scalar(text: str) -> Exact:
    """Parse ``3/4``, ``-2``, ``5i``, ``2+5i``, ``1/2-3/4i`` or ``i``."""
    s = text.replace(" ", "")
    if not s.endswith("i"):
        return Fraction(s)
    body = s[:-1]
    # split at the last sign that is not the leading one
    cut = max(body.rfind("+", 1), body.rfind("-", 1))
    if cut > 0 and body[cut - 1] != "/":
        re_txt, im_txt = body[:cut], body[cut:]
    else:
        re_txt, im_txt = "0", body
    if im_txt in ("", "+"):
        im_txt = "1"
    elif im_txt == "-":
        im_txt = "-1"
    return make_complex(Fraction(re_txt), Fraction(im_txt))


def format_scalar(value) -> str:
    if isinstance(value, Enclosure):
        return repr(value)
    re, im = to_complex_parts(value)
    if im == 0:
        return str(re)
    im_txt = "" if abs(im) == 1 else str(abs(im))
    if re == 0:
        return ("-" if im < 0 else "") + im_txt + "i"
    return f"{re}{'-' if im < 0 else '+'}{im_txt}i"


# -- arithmetic ---------------------------------------------------------------

def _enc_bits(*values):
    return max((v.bits for v in values if isinstance(v, Enclosure)), default=64)


def to_enclosure(value, bits) -> Enclosure:
    if isinstance(value, Enclosure):
        return value
    re, im = to_complex_parts(value)
    with ivprec(bits):
        return Enclosure(iv.mpf(re.numerator) / re.denominator,
                         iv.mpf(im.numerator) / im.denominator, bits)


def add(a, b):
    if is_exact(a) and is_exact(b):
        ar, ai = to_complex_parts(a)
        br, bi = to_complex_parts(b)
        return make_complex(ar + br, ai + bi)
    bits = _enc_bits(a, b)
    a, b = to_enclosure(a, bits), to_enclosure(b, bits)
    with ivprec(bits):
        return Enclosure(a.re + b.re, a.im + b.im, bits)


def neg(a):
    if is_exact(a):
        ar, ai = to_complex_parts(a)
        return make_complex(-ar, -ai)
    with ivprec(a.bits):
        return Enclosure(-a.re, -a.im, a.bits)


def mul(a, b):
    if is_exact(a) and is_exact(b):
        ar, ai = to_complex_parts(a)
        br, bi = to_complex_parts(b)
        return make_complex(ar * br - ai * bi, ar * bi + ai * br)
    bits = _enc_bits(a, b)
    a, b = to_enclosure(a, bits), to_enclosure(b, bits)
    with ivprec(bits):
        return Enclosure(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re, bits)


def conj(a):
    if is_exact(a):
        ar, ai = to_complex_parts(a)
        return make_complex(ar, -ai)
    with ivprec(a.bits):
        return Enclosure(a.re, -a.im, a.bits)


def re_part(a):
    if is_exact(a):
        return to_complex_parts(a)[0]
    with ivprec(a.bits):
        return Enclosure(a.re, iv.mpf(0), a.bits)


def im_part(a):
    if is_exact(a):
        return to_complex_parts(a)[1]
    with ivprec(a.bits):
        return Enclosure(a.im, iv.mpf(0), a.bits)


def rational_sqrt(q: Fraction):
    """Exact square root of a nonnegative rational, or None."""
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def exact_abs(a):
    """|a| as an exact rational when representable, else None."""
    if isinstance(a, Fraction):
        return abs(a)
    if isinstance(a, GaussRational):
        if a.re == 0:
            return abs(a.im)
        return rational_sqrt(a.norm2())
    return None


def absval(a, bits=64):
    exact = exact_abs(a) if is_exact(a) else None
    if exact is not None:
        return exact
    e = to_enclosure(a, bits)
    with ivprec(e.bits):
        if e.im.a == 0 and e.im.b == 0:
            r = abs(e.re)
        else:
            r = iv.sqrt(e.re * e.re + e.im * e.im)
        return Enclosure(r, iv.mpf(0), e.bits)


def rational_power(u: Fraction, r: Fraction):
    """``u**r`` for rational ``u > 0`` when it is rational, else None."""
    num, den = u.numerator, u.denominator
    d = r.denominator
    if d != 1:
        rn, ok1 = integer_nthroot(num, d)
        rd, ok2 = integer_nthroot(den, d)
        if not (ok1 and ok2):
            return None
        num, den = int(rn), int(rd)
    return Fraction(num, den) ** r.numerator


def power(u: Fraction, r: Fraction, bits=64):
    exact = rational_power(u, r)
    if exact is not None:
        return exact
    with ivprec(bits):
        base = iv.mpf(u.numerator) / u.denominator
        val = iv.exp(iv.log(base) * (iv.mpf(r.numerator) / r.denominator))
        return Enclosure(val, iv.mpf(0), bits)


def oscillator(kind: str, u: Fraction, s: Fraction, bits=64):
    """Enclosure of ``sin(u**-s)`` or ``cos(u**-s)``."""
    with ivprec(bits):
        base = iv.mpf(u.numerator) / u.denominator
        arg = iv.exp(-iv.log(base) * (iv.mpf(s.numerator) / s.denominator))
        val = iv.sin(arg) if kind == "sin" else iv.cos(arg)
        return Enclosure(val, iv.mpf(0), bits)


def width(value) -> float:
    return value.width if isinstance(value, Enclosure) else 0.0


def within(value, prec: Fraction) -> bool:
    """Whether ``value`` is exact or an enclosure no wider than ``prec``.

    Compared in mpmath, whose exponent range does not underflow.
    """
    if not isinstance(value, Enclosure):
        return True
    bound = mpmath.mpf(prec.numerator) / prec.denominator
    return all(_upper_width(x, value.bits) <= bound for x in (value.re, value.im))


def magnitude(value) -> float:
    """Floating point |value| (midpoint for enclosures)."""
    if isinstance(value, Enclosure):
        return abs(value.midpoint())
    re, im = to_complex_parts(value)
    return math.hypot(float(re), float(im))


def real_float(value) -> float:
    if isinstance(value, Enclosure):
        return float(value.re.mid)
    return float(to_complex_parts(value)[0])


def is_zero(value) -> bool:
    if isinstance(value, Enclosure):
        return value.re.a == 0 == value.re.b and value.im.a == 0 == value.im.b
    return value == 0
