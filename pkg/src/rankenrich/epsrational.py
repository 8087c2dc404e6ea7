"""Exact rationals extended with a formal positive infinitesimal.

An ``EpsRational`` is a value ``base + eps * E`` where ``base`` and ``eps``
are exact `fractions.Fraction` values and ``E`` is a formal infinitesimal:
positive, but smaller than every positive rational.  The order is therefore
lexicographic on ``(base, eps)``.  This is exactly what is needed to express
strict bounds ("the threshold must exceed 1/4") and minimal overbids
("outbid the current winner by an arbitrarily small amount") without ever
touching floating point.

Only the operations the engine needs are defined: addition, subtraction,
negation, multiplication and division by an ordinary rational, and the total
order.  Products of two infinitesimal-carrying values are rejected because
``E**2`` has no representation here (and no caller needs it).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]
EpsLike = Union["EpsRational", int, Fraction]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class EpsRational:
    """An exact value ``base + eps*E`` with lexicographic total order."""

    __slots__ = ("base", "eps")

    base: Fraction
    eps: Fraction

    def __init__(self, base: Rational | str = 0, eps: Rational | str = 0):
        object.__setattr__(self, "base", _as_fraction(base))
        object.__setattr__(self, "eps", _as_fraction(eps))

    # Immutable by convention; block accidental writes.
    def __setattr__(self, name, value):
        raise AttributeError("EpsRational is immutable")

    # -- coercion ---------------------------------------------------------

    @staticmethod
    def coerce(x: EpsLike) -> "EpsRational":
        if isinstance(x, EpsRational):
            return x
        if isinstance(x, (int, Fraction)):
            return EpsRational(x)
        raise TypeError(f"cannot coerce {x!r} to EpsRational")

    @property
    def is_rational(self) -> bool:
        return self.eps == 0

    def as_fraction(self) -> Fraction:
        """Return the value as a plain rational; error if an E-term remains."""
        if self.eps != 0:
            raise ValueError(f"{self} carries an infinitesimal part")
        return self.base

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: EpsLike) -> "EpsRational":
        o = EpsRational.coerce(other)
        return EpsRational(self.base + o.base, self.eps + o.eps)

    __radd__ = __add__

    def __sub__(self, other: EpsLike) -> "EpsRational":
        o = EpsRational.coerce(other)
        return EpsRational(self.base - o.base, self.eps - o.eps)

    def __rsub__(self, other: EpsLike) -> "EpsRational":
        o = EpsRational.coerce(other)
        return EpsRational(o.base - self.base, o.eps - self.eps)

    def __neg__(self) -> "EpsRational":
        return EpsRational(-self.base, -self.eps)

    def __mul__(self, other: EpsLike) -> "EpsRational":
        o = EpsRational.coerce(other)
        if self.eps != 0 and o.eps != 0:
            raise TypeError("product of two infinitesimal-carrying values")
        if o.eps == 0:
            return EpsRational(self.base * o.base, self.eps * o.base)
        return EpsRational(self.base * o.base, o.eps * self.base)

    __rmul__ = __mul__

    def __truediv__(self, other: Rational) -> "EpsRational":
        d = _as_fraction(other)
        if d == 0:
            raise ZeroDivisionError("division by zero")
        return EpsRational(self.base / d, self.eps / d)

    def __abs__(self) -> "EpsRational":
        return -self if self < 0 else self

    # -- order ------------------------------------------------------------

    def _key(self):
        return (self.base, self.eps)

    def __eq__(self, other) -> bool:
        try:
            o = EpsRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self._key() == o._key()

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __lt__(self, other: EpsLike) -> bool:
        o = EpsRational.coerce(other)
        return self._key() < o._key()

    def __le__(self, other: EpsLike) -> bool:
        o = EpsRational.coerce(other)
        return self._key() <= o._key()

    def __gt__(self, other: EpsLike) -> bool:
        o = EpsRational.coerce(other)
        return self._key() > o._key()

    def __ge__(self, other: EpsLike) -> bool:
        o = EpsRational.coerce(other)
        return self._key() >= o._key()

    def __hash__(self):
        # Rational-valued instances hash like their Fraction so dict keys mix.
        if self.eps == 0:
            return hash(self.base)
        return hash(self._key())

    def __bool__(self) -> bool:
        return self.base != 0 or self.eps != 0

    # -- display ----------------------------------------------------------

    def __repr__(self) -> str:
        return f"EpsRational({self.base!r}, {self.eps!r})"

    def __str__(self) -> str:
        if self.eps == 0:
            return str(self.base)
        if self.eps > 0:
            sign, mag = "+", self.eps
        else:
            sign, mag = "-", -self.eps
        eps_part = "eps" if mag == 1 else f"{mag}*eps"
        if self.base == 0 and sign == "+":
            return eps_part
        if self.base == 0:
            return f"-{eps_part}"
        return f"{self.base} {sign} {eps_part}"


ZERO = EpsRational(0)
ONE = EpsRational(1)
EPS = EpsRational(0, 1)


def eps_max(*values: EpsLike) -> EpsRational:
    vals = [EpsRational.coerce(v) for v in values]
    best = vals[0]
    for v in vals[1:]:
        if v > best:
            best = v
    return best


def eps_min(*values: EpsLike) -> EpsRational:
    vals = [EpsRational.coerce(v) for v in values]
    best = vals[0]
    for v in vals[1:]:
        if v < best:
            best = v
    return best
