"""Exact computer algebra for the ring of full generalized numbers.

Germs are symbolic representatives; oscillator-free germs compile to
:class:`NormalForm` objects on which valuations, norms, unit tests,
idempotents, ideals and the order are decided exactly.
"""
from .dsl import Registry, default_registry, format_germ, parse, parse_descriptor
from .errors import (ContractViolation, GnumError, Inconclusive, NotIdempotent,
                     NotNormalizable, PrecisionError, PreconditionError)
from .germ import Germ, alpha, arith, chi, evaluate, lift
from .normal import NormalForm, is_null, normalize
from .oracle import SampleGrid, cross_check, sampled_valuation
from .order import (abs_complex, complex_parts, convexity_check, decompose, is_qnegative,
                    is_qpositive, quotient_sign)
from .sets import TailClass, atoms, in_Sf, member, tail_class
from .testpoint import TestPoint
from .units import (Family, approx_decompose, enumerate_families, ideal_member,
                    idempotent_to_chi, is_unit, n_a_set, prime_scale_witness,
                    unit_approx_seq, unitize, zero_set)
from .valuation import a_set_contains, ball_contains, dist, geometric_inverse, norm, valuation

__version__ = "0.1.0"

__all__ = [
    "ContractViolation", "Family", "Germ", "GnumError", "Inconclusive", "NormalForm",
    "NotIdempotent", "NotNormalizable", "PrecisionError", "PreconditionError", "Registry",
    "SampleGrid", "TailClass", "TestPoint", "a_set_contains", "abs_complex", "alpha",
    "approx_decompose", "arith", "atoms", "ball_contains", "chi", "complex_parts",
    "convexity_check", "cross_check", "decompose", "default_registry", "dist",
    "enumerate_families", "evaluate", "format_germ", "geometric_inverse", "ideal_member",
    "idempotent_to_chi", "in_Sf", "is_null", "is_qnegative", "is_qpositive", "is_unit", "lift",
    "member", "n_a_set", "norm", "normalize", "parse", "parse_descriptor",
    "prime_scale_witness", "quotient_sign", "sampled_valuation", "tail_class",
    "unit_approx_seq", "unitize", "valuation", "zero_set",
]
