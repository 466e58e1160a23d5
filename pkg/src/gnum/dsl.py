"""Text syntax for germs and set descriptors, and the named-descriptor registry.

Germ grammar::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | atom
    atom   := NUMBER | NUMBERi | "i" | "(" expr ")" | "|" expr "|"
            | alpha(RAT) | chi(DESC) | abs(expr) | re(expr) | im(expr)
            | conj(expr) | sin(alpha(RAT)) | cos(alpha(RAT)) | pscale()

Descriptor grammar (inside ``chi(...)`` and in registry ``expr`` entries)::

    desc   := conj ("|" conj)*
    conj   := neg ("&" neg)*
    neg    := "~" neg | NAME | geom(RAT) | dyad(INT, INT) | tail(RAT)
            | levels(INT, INT | inf) | full | empty | "(" desc ")"
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from . import scalars as S
from .errors import DslSyntaxError, NotNormalizable, UnknownDescriptor
from .germ import (AbsVal, Add, Alpha, Chi, Conj, Const, Germ, ImPart, Mul, Neg, Osc,
                   PrimeScale, RePart)
from .sets import (EMPTY, FULL, DyadicClass, GeomSeq, Levels, SetDescriptor, TailInterval,
                   complement, intersect, union)

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?i?(?![A-Za-z0-9_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*|&~(),])
""", re.VERBOSE)


def _tokenize(text):
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


# -- registry ------------------------------------------------------------------

_KINDS = {"geomseq", "dyadic", "tail", "full", "empty", "expr"}


class Registry:
    """Named set descriptors, resolvable from the DSL as ``chi(NAME)``."""

    def __init__(self, entries=None):
        self.entries = dict(entries or {})

    @classmethod
    def default(cls):
        half, third = Fraction(1, 2), Fraction(1, 3)
        return cls({
            "G2": GeomSeq(half), "G3": GeomSeq(third), "G4": GeomSeq(Fraction(1, 4)),
            "G8": GeomSeq(Fraction(1, 8)), "G23": GeomSeq(Fraction(2, 3)),
            "D20": DyadicClass(2, 0), "D21": DyadicClass(2, 1),
            "D30": DyadicClass(3, 0), "D31": DyadicClass(3, 1), "D32": DyadicClass(3, 2),
            "T2": TailInterval(half), "T4": TailInterval(Fraction(1, 4)),
            "T8": TailInterval(Fraction(1, 8)),
        })

    @classmethod
    def from_json(cls, data, base=None):
        """Load ``{"NAME": {"kind": ..., ...}}``; later entries may refer to earlier ones."""
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        reg = cls(base.entries if base else {})
        pending = dict(data)
        while pending:
            progressed = False
            for name, spec in list(pending.items()):
                try:
                    reg.entries[name] = _entry(spec, reg)
                except UnknownDescriptor:
                    continue
                del pending[name]
                progressed = True
            if not progressed:
                name = next(iter(pending))
                reg.entries[name] = _entry(pending[name], reg)  # raises the real error
        return reg

    def to_json(self) -> dict:
        return {name: {"kind": "expr", "expr": d.key()} for name, d in sorted(self.entries.items())}

    def lookup(self, name) -> SetDescriptor:
        try:
            return self.entries[name]
        except KeyError:
            raise UnknownDescriptor(name) from None

    def name_of(self, d: SetDescriptor):
        for name, e in sorted(self.entries.items()):
            if e == d:
                return name
        return None


def _entry(spec, reg):
    if not isinstance(spec, dict) or spec.get("kind") not in _KINDS:
        raise ValueError(f"bad registry entry {spec!r}")
    kind = spec["kind"]
    if kind == "geomseq":
        d = GeomSeq(Fraction(spec["rho"]))
    elif kind == "dyadic":
        d = DyadicClass(int(spec["m"]), int(spec["k"]))
    elif kind == "tail":
        d = TailInterval(Fraction(spec["eta"]))
    elif kind == "full":
        d = FULL
    elif kind == "empty":
        d = EMPTY
    else:
        d = parse_descriptor(spec["expr"], reg)
    if "levels" in spec:
        lo, hi = spec["levels"]
        d = intersect(d, Levels(int(lo), None if hi is None else int(hi)))
    return d


_DEFAULT = Registry.default()


def default_registry() -> Registry:
    return _DEFAULT


# -- parser ----------------------------------------------------------------------


class _Parser:
    def __init__(self, text, registry):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.reg = registry or _DEFAULT

    # helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise DslSyntaxError(msg, self.text, tok[2])

    def accept(self, value):
        if self.tok[1] == value and self.tok[0] in ("op", "name"):
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            self.error(f"expected {value!r}")

    def rational(self):
        sign = -1 if self.accept("-") else 1
        kind, text, _ = self.tok
        if kind != "num" or text.endswith("i"):
            self.error("expected a rational number")
        self.i += 1
        return sign * Fraction(text)

    def integer(self):
        r = self.rational()
        if r.denominator != 1:
            self.error("expected an integer")
        return int(r)

    def done(self):
        if self.tok[0] != "end":
            self.error(f"unexpected {self.tok[1]!r}")

    # germs
    def expr(self):
        parts = [self.term()]
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            minus = self.tok[1] == "-"
            self.i += 1
            t = self.term()
            if isinstance(t, Const):
                c = S.neg(t.c) if minus else t.c
                prev = parts[-1]
                if (isinstance(prev, Const) and S.is_real(prev.c)
                        and S.to_complex_parts(c)[0] == 0 and not S.is_real(c)):
                    parts[-1] = Const(S.add(prev.c, c))
                else:
                    parts.append(Const(c))
            else:
                parts.append(Neg(t) if minus else t)
        return parts[0] if len(parts) == 1 else Add(tuple(parts))

    def term(self):
        parts = [self.unary()]
        while self.accept("*"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else Mul(tuple(parts))

    def unary(self):
        if self.accept("-"):
            inner = self.unary()
            return Const(S.neg(inner.c)) if isinstance(inner, Const) else Neg(inner)
        return self.atom()

    def atom(self):
        kind, text, _ = self.tok
        if kind == "num":
            self.i += 1
            if text.endswith("i"):
                return Const(S.make_complex(0, Fraction(text[:-1])))
            return Const(Fraction(text))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("|"):
            e = self.expr()
            self.expect("|")
            return AbsVal(e)
        if kind != "name":
            self.error(f"unexpected {text or 'end of input'!r}")
        self.i += 1
        if text == "i":
            return Const(S.make_complex(0, 1))
        self.expect("(")
        if text == "alpha":
            node = Alpha(self.rational())
        elif text == "chi":
            node = Chi(self.desc())
        elif text in ("abs", "re", "im", "conj"):
            node = {"abs": AbsVal, "re": RePart, "im": ImPart, "conj": Conj}[text](self.expr())
        elif text in ("sin", "cos"):
            start = self.tok
            if not self.accept("alpha"):
                self.error("oscillators take alpha(-s)")
            self.expect("(")
            r = self.rational()
            self.expect(")")
            if r > 0:
                self.error("oscillator argument must be alpha(-s) with s >= 0", start)
            node = Osc(text, -r)
        elif text == "pscale":
            node = PrimeScale()
        else:
            self.error(f"unknown function {text!r}", self.toks[self.i - 2])
        self.expect(")")
        return node

    # descriptors
    def desc(self):
        parts = [self.dconj()]
        while self.accept("|"):
            parts.append(self.dconj())
        return parts[0] if len(parts) == 1 else union(*parts)

    def dconj(self):
        parts = [self.dneg()]
        while self.accept("&"):
            parts.append(self.dneg())
        return parts[0] if len(parts) == 1 else intersect(*parts)

    def dneg(self):
        if self.accept("~"):
            return complement(self.dneg())
        if self.accept("("):
            d = self.desc()
            self.expect(")")
            return d
        kind, text, _ = self.tok
        if kind != "name":
            self.error("expected a set descriptor")
        self.i += 1
        if text in self.reg.entries:
            return self.reg.entries[text]
        if text == "full":
            return FULL
        if text == "empty":
            return EMPTY
        if text not in ("geom", "dyad", "tail", "levels") or self.tok[1] != "(":
            raise UnknownDescriptor(text)
        self.expect("(")
        if text == "geom":
            d = GeomSeq(self.rational())
        elif text == "tail":
            d = TailInterval(self.rational())
        elif text == "dyad":
            m = self.integer()
            self.expect(",")
            d = DyadicClass(m, self.integer())
        else:
            lo = self.integer()
            self.expect(",")
            d = Levels(lo, None if self.accept("inf") else self.integer())
        self.expect(")")
        return d


def parse(text: str, registry: Registry | None = None) -> Germ:
    p = _Parser(text, registry)
    try:
        g = p.expr()
        p.done()
    except ValueError as exc:
        raise DslSyntaxError(str(exc), text, p.tok[2]) from None
    return g


def parse_descriptor(text: str, registry: Registry | None = None) -> SetDescriptor:
    p = _Parser(text, registry)
    try:
        d = p.desc()
        p.done()
    except ValueError as exc:
        raise DslSyntaxError(str(exc), text, p.tok[2]) from None
    return d


# -- formatting ----------------------------------------------------------------

_SUM, _PROD, _ATOM = 0, 1, 2


def format_descriptor(d: SetDescriptor, registry: Registry | None = None) -> str:
    reg = registry or _DEFAULT
    name = reg.name_of(d)
    if name is not None:
        return name
    from .sets import And, Not, Or
    if isinstance(d, Not):
        inner = format_descriptor(d.arg, reg)
        return "~" + (f"({inner})" if isinstance(d.arg, (And, Or)) else inner)
    if isinstance(d, (And, Or)):
        sep = " & " if isinstance(d, And) else " | "
        parts = []
        for a in d.args:
            text = format_descriptor(a, reg)
            parts.append(f"({text})" if isinstance(a, (And, Or)) else text)
        return sep.join(parts)
    return d.key()


def _scalar(c, ctx):
    text = S.format_scalar(c)
    if S.is_real(c) and c < 0 and ctx == _ATOM:
        return f"({text})"
    if not S.is_real(c) and S.to_complex_parts(c)[0] != 0 and ctx > _SUM:
        return f"({text})"
    return text


def format_germ(x: Germ, registry: Registry | None = None) -> str:
    return _fmt(x, _SUM, registry or _DEFAULT)


def _fmt(x, ctx, reg):
    if isinstance(x, Const):
        return _scalar(x.c, ctx)
    if isinstance(x, Alpha):
        return f"alpha({x.r})"
    if isinstance(x, Chi):
        return f"chi({format_descriptor(x.A, reg)})"
    if isinstance(x, Osc):
        return f"{x.kind}(alpha({-x.s}))"
    if isinstance(x, PrimeScale):
        return "pscale()"
    if isinstance(x, AbsVal):
        return f"|{_fmt(x.arg, _SUM, reg)}|"
    if isinstance(x, (Conj, RePart, ImPart)):
        fn = {Conj: "conj", RePart: "re", ImPart: "im"}[type(x)]
        return f"{fn}({_fmt(x.arg, _SUM, reg)})"
    if isinstance(x, Neg):
        text = "-" + _fmt(x.arg, _ATOM, reg)
        return f"({text})" if ctx > _PROD else text
    if isinstance(x, Mul):
        text = " * ".join(_fmt(a, _ATOM if isinstance(a, Mul) else _PROD, reg) for a in x.args)
        return f"({text})" if ctx > _PROD else text
    if isinstance(x, Add):
        out = _fmt(x.args[0], _PROD if isinstance(x.args[0], Add) else _SUM, reg)
        for a in x.args[1:]:
            if isinstance(a, Neg):
                out += " - " + _fmt(a.arg, _ATOM if isinstance(a.arg, (Add, Neg)) else _PROD, reg)
            elif isinstance(a, Const) and S.is_real(a.c) and a.c < 0:
                out += " - " + S.format_scalar(-a.c)
            else:
                out += " + " + _fmt(a, _ATOM if isinstance(a, Add) else _PROD, reg)
        return f"({out})" if ctx > _SUM else out
    raise TypeError(f"not a germ: {x!r}")


def format_normal(nf, registry: Registry | None = None) -> str:
    """Canonical text of a normal form: its terms joined by ``+``/``-``."""
    reg = registry or _DEFAULT
    pieces = []
    for t in nf.terms():
        c = t.c
        negative = S.is_real(c) and c < 0
        mag = -c if negative else c
        factors = []
        if mag != 1:
            factors.append(_scalar(mag, _PROD))
        if t.r != 0:
            factors.append(f"alpha({t.r})")
        if t.atom != FULL:
            factors.append(f"chi({format_descriptor(t.atom, reg)})")
        body = " * ".join(factors) or "1"
        pieces.append(("-" if negative else "+", body))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def format_prefix(x: Germ, registry: Registry | None = None) -> str:
    """Prefix (s-expression) rendering of the expression tree."""
    reg = registry or _DEFAULT
    if isinstance(x, Const):
        return S.format_scalar(x.c)
    if isinstance(x, Alpha):
        return f"(alpha {x.r})"
    if isinstance(x, Chi):
        return f"(chi {format_descriptor(x.A, reg)})"
    if isinstance(x, Osc):
        return f"({x.kind} {x.s})"
    if isinstance(x, PrimeScale):
        return "(pscale)"
    names = {Add: "add", Mul: "mul", Neg: "neg", AbsVal: "abs", Conj: "conj",
             RePart: "re", ImPart: "im"}
    return "(" + " ".join([names[type(x)], *(format_prefix(c, reg) for c in x.children())]) + ")"


def canonical_text(x: Germ, registry: Registry | None = None) -> str:
    """Formatted normal form when one exists, else the prefix form of the tree."""
    from .normal import normalize
    try:
        return format_normal(normalize(x), registry)
    except NotNormalizable:
        return format_prefix(x, registry)
