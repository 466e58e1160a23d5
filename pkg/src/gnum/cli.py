"""``gnum``: command-line front end.

Every command prints one JSON document on stdout tagged with
``"schema": "gnum/1"``.  Exit status: 0 on success, 1 when a mathematical
contract fails (a suite or oracle FAIL, a violated invariant, a
computation that cannot be completed), 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import dsl
from . import scalars as S
from .errors import (ContractViolation, DslSyntaxError, GnumError, NotNormalizable,
                     PreconditionError, UnknownDescriptor)
from .germ import evaluate
from .normal import NormalForm, is_null, normalize
from .oracle import SampleGrid, cross_check
from .order import decompose, is_qnegative, is_qpositive, quotient_sign
from .sets import atoms as make_atoms
from .testpoint import TestPoint
from .units import (CaseA, Family, approx_decompose, enumerate_families, ideal_member,
                    idempotent_to_chi, is_unit, unitize)
from .valuation import dist, norm, valuation

SCHEMA = "gnum/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- session ------------------------------------------------------------------------


class Session:
    """Registry and output settings shared by one invocation."""

    def __init__(self, registry: dsl.Registry, fmt: str = "json", precision=None):
        self.registry = registry
        self.fmt = fmt
        self.precision = precision      # default enclosure width for eval

    def germ(self, text):
        return dsl.parse(text, self.registry)

    def normal(self, text) -> NormalForm:
        return normalize(self.germ(text))

    def desc(self, d) -> str:
        return dsl.format_descriptor(d, self.registry)

    def text(self, x) -> str:
        if isinstance(x, NormalForm):
            return dsl.format_normal(x, self.registry)
        return dsl.canonical_text(x, self.registry)

    def family(self, path) -> Family:
        data = _load_json(path)
        try:
            if "atoms" in data:
                atoms = [dsl.parse_descriptor(t, self.registry) for t in data["atoms"]]
            else:
                atoms = make_atoms([dsl.parse_descriptor(t, self.registry)
                                    for t in data["generators"]])
            pivot = int(data["pivot"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad family file {path}: {exc}") from None
        fams = {f.pivot: f for f in enumerate_families(atoms)}
        if pivot not in fams:
            raise UsageError(f"pivot {pivot} is not a relevant atom of the algebra")
        return fams[pivot]


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _scalar_json(v):
    if isinstance(v, S.Enclosure):
        re = [float(v.re.a), float(v.re.b)]
        im = [float(v.im.a), float(v.im.b)]
        return {"exact": False, "re": re, "im": im, "width": float(S.width(v))}
    return {"exact": True, "value": S.format_scalar(v)}


def _nf_json(sess, nf: NormalForm):
    return {"text": sess.text(nf), **nf.to_json()}


# -- commands ---------------------------------------------------------------------------


def cmd_eval(sess, args):
    t = TestPoint.parse(args.at)
    prec = Fraction(args.prec) if args.prec else sess.precision
    value = evaluate(sess.germ(args.expr), t, prec)
    return {"at": {"q": t.level, "iota": str(t.iota), "eps": str(t.eps)}, **_scalar_json(value)}, 0


def cmd_val(sess, args):
    return valuation(sess.germ(args.expr)).to_json(), 0


def cmd_norm(sess, args):
    return norm(sess.germ(args.expr)).to_json(), 0


def cmd_dist(sess, args):
    return dist(sess.germ(args.x), sess.germ(args.y)).to_json("dist"), 0


def cmd_is_unit(sess, args):
    v = is_unit(sess.normal(args.expr))
    out = {"unit": v.unit}
    if v.witness:
        w = v.witness
        out["witness"] = {"r": str(w.r), "eta": str(w.eta), "level": w.level}
    if v.obstruction is not None:
        out["obstruction"] = sess.desc(v.obstruction)
    return out, 0


def cmd_is_null(sess, args):
    v = is_null(sess.germ(args.expr))
    out = {"null": v.null, "mode": v.mode}
    if v.witness:
        out["witness"] = {"a": str(v.a), "points": [
            {"q": t.level, "iota": str(t.iota), "eps": str(t.eps)} for t in v.witness]}
    return out, 0


def cmd_approx(sess, args):
    x = sess.normal(args.expr)
    case = approx_decompose(x, max_n=args.max_n)
    if isinstance(case, CaseA):
        return {"case": "A", "S": sess.desc(case.S), "a": case.a}, 0
    return {"case": "B", "truncated": case.truncated,
            "chain": [{"a": a, "S": sess.desc(s)} for a, s in case.pairs]}, 0


def cmd_unitize(sess, args):
    u = unitize(sess.normal(args.expr))
    return {"a": u.a, "S": sess.desc(u.S), "y": sess.text(u.y), "e": sess.text(u.e)}, 0


def cmd_idempotent(sess, args):
    return {"S": sess.desc(idempotent_to_chi(sess.normal(args.expr)))}, 0


def cmd_ideal_member(sess, args):
    F = sess.family(args.family)
    v = ideal_member(sess.normal(args.expr), F)
    out = {"member": v.member}
    if v.member:
        out["witness"] = sess.desc(v.descriptor)
    return out, 0


def cmd_enum_families(sess, args):
    data = _load_json(args.algebra)
    if "atoms" in data:
        atoms = [dsl.parse_descriptor(t, sess.registry) for t in data["atoms"]]
    elif "generators" in data:
        atoms = make_atoms([dsl.parse_descriptor(t, sess.registry) for t in data["generators"]])
    else:
        raise UsageError("algebra file needs an 'atoms' or 'generators' list")
    fams = enumerate_families(atoms)
    return {"atoms": [sess.desc(a) for a in atoms],
            "families": [{"pivot": f.pivot, "excluded_atom": sess.desc(atoms[f.pivot]),
                          "members": [sess.desc(f.union_of(m)) for m in f.members()]}
                         for f in fams]}, 0


def _verdict(v):
    out = {"verdict": v.verdict.value, "mode": v.mode}
    if v.evidence:
        out["evidence"] = v.evidence
    return out


def cmd_sign(sess, args):
    x = sess.germ(args.expr)
    return {"qpositive": _verdict(is_qpositive(x)), "qnegative": _verdict(is_qnegative(x))}, 0


def cmd_decompose(sess, args):
    d = decompose(sess.normal(args.expr))
    return {"pos": _nf_json(sess, d.pos), "neg": _nf_json(sess, d.neg),
            "theta": sess.text(d.theta), "support_set": sess.desc(d.support_set),
            "pointwise": d.pointwise}, 0


def cmd_qsign(sess, args):
    F = sess.family(args.family)
    return {"qsign": quotient_sign(sess.normal(args.expr), F).value, "pivot": F.pivot}, 0


def cmd_oracle(sess, args):
    grid = SampleGrid.default()
    if args.grid:
        try:
            grid = SampleGrid.from_json(_load_json(args.grid))
        except TypeError as exc:
            raise UsageError(f"bad grid file {args.grid}: {exc}") from None
    rep = cross_check(sess.normal(args.expr), grid)
    out = rep.to_json()
    out["germ"] = sess.text(sess.normal(args.expr))
    out["grid"] = grid.to_json()
    return out, 0 if rep.ok else 1


def cmd_suite(sess, args):
    from .suites import SUITES, run_suite
    if args.list:
        return {"suites": [{"name": k, "statement": v[0]} for k, v in SUITES.items()]}, 0
    if not args.name:
        raise UsageError("suite name required (or --list)")
    if args.name not in SUITES:
        raise UsageError(f"unknown suite {args.name!r}; see 'gnum suite --list'")
    rep = run_suite(args.name, seed=args.seed, size=args.size)
    return rep.to_json(), 0 if rep.passed else 1


# -- argument parsing -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gnum", description="Exact computations with generalized numbers.")
    p.add_argument("--registry", help="descriptor registry JSON (merged over the defaults)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def cmd(name, fn, help_, *positional):
        sp = sub.add_parser(name, help=help_)
        for arg in positional:
            sp.add_argument(arg)
        sp.set_defaults(fn=fn)
        return sp

    e = cmd("eval", cmd_eval, "evaluate at a test point", "expr")
    e.add_argument("--at", required=True, help="test point q,iota,eps")
    e.add_argument("--prec", help="enclosure width for inexact values (default $GNUM_PRECISION)")
    cmd("val", cmd_val, "sharp valuation", "expr")
    cmd("norm", cmd_norm, "sharp norm", "expr")
    cmd("dist", cmd_dist, "sharp distance", "x", "y")
    cmd("is-unit", cmd_is_unit, "unit test with witness or obstruction", "expr")
    cmd("is-null", cmd_is_null, "null test", "expr")
    a = cmd("approx", cmd_approx, "approximation by the sets N_a", "expr")
    a.add_argument("--max-n", type=int, default=64)
    cmd("unitize", cmd_unitize, "unit y = x(1-e) + e", "expr")
    cmd("idempotent", cmd_idempotent, "set S with e = X_S", "expr")
    i = cmd("ideal-member", cmd_ideal_member, "membership in g_f(F)", "expr")
    i.add_argument("--family", required=True)
    cmd("enum-families", cmd_enum_families, "families over an atom algebra", "algebra")
    cmd("sign", cmd_sign, "q-positivity and q-negativity", "expr")
    cmd("decompose", cmd_decompose, "positive and negative parts", "expr")
    q = cmd("qsign", cmd_qsign, "sign in the quotient by g_f(F)", "expr")
    q.add_argument("--family", required=True)
    o = cmd("oracle", cmd_oracle, "sampled cross-check", "expr")
    o.add_argument("--grid")
    s = sub.add_parser("suite", help="run a property suite")
    s.add_argument("name", nargs="?")
    s.add_argument("--list", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--size", type=int)
    s.set_defaults(fn=cmd_suite)
    return p


def _text(out, indent=""):
    lines = []
    for k, v in out.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.extend(_text(v, indent + "  "))
        else:
            lines.append(f"{indent}{k}: {v if not isinstance(v, list) else json.dumps(v)}")
    return lines


def _emit(out, fmt):
    if fmt == "text":
        print("\n".join(_text(out)))
    else:
        print(json.dumps(out, default=str))


def _env_precision():
    text = os.environ.get("GNUM_PRECISION")
    if not text:
        return None
    try:
        prec = Fraction(text)
    except ValueError:
        raise UsageError(f"GNUM_PRECISION={text!r} is not a rational number") from None
    if prec <= 0:
        raise UsageError("GNUM_PRECISION must be positive")
    return prec


def _fail(code, kind, message, **extra):
    payload = {"schema": SCHEMA, "error": kind, "message": message, **extra}
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(2, "usage", str(exc))
    except SystemExit as exc:          # --help
        return int(exc.code or 0)
    try:
        reg = dsl.Registry.from_json(_load_json(args.registry), base=dsl.default_registry()) \
            if args.registry \
            else dsl.default_registry()
        sess = Session(reg, args.format, _env_precision())
        out, code = args.fn(sess, args)
    except UsageError as exc:
        return _fail(2, "usage", str(exc))
    except DslSyntaxError as exc:
        return _fail(2, "syntax", str(exc), position=exc.pos)
    except UnknownDescriptor as exc:
        return _fail(2, "unknown-descriptor", str(exc))
    except (PreconditionError, NotNormalizable) as exc:
        return _fail(2, type(exc).__name__, str(exc))
    except ValueError as exc:
        return _fail(2, "value", str(exc))
    except ContractViolation as exc:
        return _fail(1, "contract", str(exc))
    except GnumError as exc:
        return _fail(1, type(exc).__name__, str(exc))
    _emit({"schema": SCHEMA, **out}, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
