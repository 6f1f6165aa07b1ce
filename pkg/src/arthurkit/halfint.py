"""Exact half-integer arithmetic.

Values in (1/2)Z are stored as twice their value, so every operation is
integer arithmetic.  No floats appear anywhere downstream: order
comparisons on Jordan-block coordinates must be exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering


@total_ordering
@dataclass(frozen=True)
class HalfInt:
    """An element of (1/2)Z, stored as ``twice`` = 2x."""

    twice: int

    @staticmethod
    def of(value) -> "HalfInt":
        """Coerce an int, Fraction with denominator 1 or 2, or HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, int):
            return HalfInt(2 * value)
        if isinstance(value, Fraction):
            doubled = value * 2
            if doubled.denominator != 1:
                raise ValueError(f"{value} is not a half-integer")
            return HalfInt(int(doubled))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other) -> "HalfInt":
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __mul__(self, other: int) -> "HalfInt":
        if not isinstance(other, int):
            raise TypeError("HalfInt can only be scaled by an integer")
        return HalfInt(self.twice * other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (HalfInt, int, Fraction)):
            return self.twice == HalfInt.of(other).twice
        return NotImplemented

    def __lt__(self, other) -> bool:
        return self.twice < HalfInt.of(other).twice

    def __hash__(self) -> int:
        return hash(("HalfInt", self.twice))

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def as_int(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def floor(self) -> int:
        return self.twice // 2

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self.twice})"


def neg_one_pow(exponent: "HalfInt | int") -> int:
    """(-1) ** exponent for an integer-valued exponent (possibly a HalfInt)."""
    if isinstance(exponent, HalfInt):
        exponent = exponent.as_int()
    return -1 if exponent % 2 else 1
