"""Exception hierarchy shared by every gnum module."""


class GnumError(Exception):
    """Base class for all library errors."""


class PrecisionError(GnumError):
    """An oscillator argument is too large for the transcendental budget."""


class NotNormalizable(GnumError):
    """The germ has no exact normal form (oscillators, mixed-sign abs, ...)."""


class PreconditionError(GnumError):
    """An operation was called outside its contract."""


class NotIdempotent(PreconditionError):
    pass


class TooLarge(PreconditionError):
    pass


class ScaleNotFound(GnumError):
    """Bounded search for a scale exponent ``a`` gave up."""


class UnknownDescriptor(GnumError):
    def __init__(self, name):
        super().__init__(f"unknown set descriptor {name!r}")
        self.name = name


class DslSyntaxError(GnumError):
    def __init__(self, message, text="", pos=0):
        super().__init__(f"{message} at position {pos}")
        self.text = text
        self.pos = pos


class ContractViolation(GnumError):
    """A theorem-backed invariant failed on the model (must never happen)."""


class Inconclusive(GnumError):
    """A sampled verdict whose confidence band straddles the decision point."""
