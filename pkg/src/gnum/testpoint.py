from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class TestPoint:
    """A scaled mollifier ``phi_eps`` seen through its level, base diameter and scale.

    ``level`` is the q of ``phi in A_q``; ``iota`` is ``i(phi)`` for the
    unscaled mollifier; ``eps`` is the scaling parameter.  The effective
    diameter is ``iota * eps``.
    """

    __test__ = False  # not a pytest class

    level: int
    iota: Fraction
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "iota", Fraction(self.iota))
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.level < 0:
            raise ValueError("level must be a natural number")
        if not (0 < self.iota <= 1 and 0 < self.eps <= 1):
            raise ValueError("iota and eps must lie in (0, 1]")

    @property
    def diameter(self) -> Fraction:
        return self.iota * self.eps

    @classmethod
    def parse(cls, text: str) -> "TestPoint":
        """``"q,iota,eps"`` as used on the command line."""
        q, iota, eps = (part.strip() for part in text.split(","))
        return cls(int(q), Fraction(iota), Fraction(eps))

    def __str__(self):
        return f"(q={self.level}, iota={self.iota}, eps={self.eps})"
