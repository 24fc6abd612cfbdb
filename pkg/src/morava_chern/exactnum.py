"""Exact coefficient arithmetic: p-local rationals, valuations and F_p.

Rationals are carried by :class:`fractions.Fraction` (always reduced, positive
denominator, zero stored as ``0/1``).  Membership in Z_(p) is checked lazily
by :func:`is_p_integral` at the point a contract needs it.
"""
from __future__ import annotations

import functools
from fractions import Fraction
from numbers import Rational

__all__ = [
    "INF",
    "NotPIntegral",
    "NotAUnit",
    "PrimeField",
    "as_fraction",
    "check_prime",
    "format_rational",
    "is_p_integral",
    "is_p_unit",
    "is_prime",
    "nu_p",
    "parse_rational",
    "reduce_mod_p",
]


class NotPIntegral(ArithmeticError):
    """Raised when a rational with p in its denominator is reduced mod p."""


class NotAUnit(ArithmeticError):
    """Raised when an element required to be a p-adic unit is not one."""


class _Infinity:
    """Valuation of zero.  Compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "+inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("morava_chern.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __neg__(self):
        raise ArithmeticError("cannot negate the infinite valuation")

    def __add__(self, other):
        return self

    __radd__ = __add__


INF = _Infinity()


@functools.lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def check_prime(p) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _int_valuation(k: int, p: int) -> int:
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v


def nu_p(x, p: int):
    """p-adic valuation of a rational; ``INF`` for zero."""
    check_prime(p)
    x = as_fraction(x)
    if x == 0:
        return INF
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def is_p_integral(x, p: int) -> bool:
    check_prime(p)
    return as_fraction(x).denominator % p != 0


def is_p_unit(x, p: int) -> bool:
    return nu_p(x, p) == 0


def reduce_mod_p(x, p: int) -> "PrimeField":
    x = as_fraction(x)
    if not is_p_integral(x, p):
        raise NotPIntegral(f"{format_rational(x)} is not {p}-integral")
    return PrimeField(x.numerator * pow(x.denominator, -1, p), p)


class PrimeField:
    """Element of F_p, stored as its least non-negative residue."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        check_prime(p)
        self.p = p
        self.value = int(value) % p

    def _coerce(self, other):
        if isinstance(other, PrimeField):
            if other.p != self.p:
                raise ValueError("mismatched characteristics")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return reduce_mod_p(other, self.p).value
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeField(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeField(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeField(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeField(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeField(-self.value, self.p)

    def inverse(self) -> "PrimeField":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return PrimeField(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * PrimeField(o, self.p).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return PrimeField(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, PrimeField):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return (other - self.value) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"PrimeField({self.value}, {self.p})"

    def __str__(self):
        return str(self.value)


def format_rational(x) -> str:
    """Canonical text form ``num/den``; the denominator is dropped when it is 1."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if not s:
        raise ValueError("empty rational")
    num, sep, den = s.partition("/")
    try:
        if sep:
            d = int(den)
            if d <= 0:
                raise ValueError
            return Fraction(int(num), d)
        return Fraction(int(num))
    except ValueError:
        raise ValueError(f"not a rational in num/den form: {s!r}") from None
