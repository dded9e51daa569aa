"""Extended naturals: finite integers plus a single absorbing infinity."""

from __future__ import annotations

from fractions import Fraction
import numbers


class _Infinity:
    """The distinguished value above every finite distance.

    Addition absorbs, multiplication by a positive scalar absorbs, and the
    value compares greater than every int/Fraction/float that is finite.
    """

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    __str__ = __repr__

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self) -> int:
        return hash("dirhyp-infinity")

    def __eq__(self, other) -> bool:
        return other is self or (isinstance(other, float) and other == float("inf"))

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return self.__eq__(other)

    def __gt__(self, other) -> bool:
        return not self.__eq__(other)

    def __ge__(self, other) -> bool:
        return True

    def __add__(self, other):
        if other is self or isinstance(other, numbers.Real):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if other is self:
            return self
        if isinstance(other, numbers.Real):
            if other > 0:
                return self
            raise ArithmeticError("infinity times a non-positive scalar is undefined")
        return NotImplemented

    __rmul__ = __mul__

    def __float__(self) -> float:
        return float("inf")


INF = _Infinity()


def is_inf(value) -> bool:
    return value is INF


def ext(value):
    """Normalize ints, numpy ints and float('inf') into an ExtNat."""
    if value is INF:
        return INF
    if isinstance(value, float):
        if value == float("inf"):
            return INF
        if value.is_integer():
            return int(value)
        raise ValueError(f"not an extended natural: {value!r}")
    return int(value)


def ext_min(values, default=INF):
    best = default
    for v in values:
        if v < best:
            best = v
    return best


def ext_max(values, default=0):
    best = default
    for v in values:
        if v > best:
            best = v
    return best


def to_json(value):
    """Serialize an ExtNat or rational for reports: infinity becomes "inf"."""
    if value is INF:
        return "inf"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return value


def from_json(value):
    if value == "inf":
        return INF
    if isinstance(value, str) and "/" in value:
        return Fraction(value)
    return value
