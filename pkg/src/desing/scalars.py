"""Exact coefficient arithmetic over Q (gmpy2 rationals) and prime fields F_p."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from gmpy2 import mpq

# Fraction is still accepted on input; arithmetic runs on mpq
Rational = type(mpq())
RATIONALS = (Fraction, Rational)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n below 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class ModP:
    """Residue class modulo a prime, always stored in [0, p)."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.p = p
        self.value = value % p

    def _other(self, other) -> "ModP":
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError(f"mixed characteristics {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return ModP(other, self.p)
        if isinstance(other, RATIONALS):
            if other.denominator % self.p == 0:
                raise ZeroDivisionError("denominator vanishes mod p")
            return ModP(int(other.numerator) * pow(int(other.denominator), -1, self.p), self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return ModP(self.value + o.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return ModP(self.value - o.value, self.p)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return ModP(o.value - self.value, self.p)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return ModP(self.value * o.value, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o.value == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return ModP(self.value * pow(o.value, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return ModP(-self.value, self.p)

    def __pow__(self, k: int):
        if k < 0:
            if self.value == 0:
                raise ZeroDivisionError("division by zero in F_p")
            return ModP(pow(pow(self.value, -1, self.p), -k, self.p), self.p)
        return ModP(pow(self.value, k, self.p), self.p)

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return (other - self.value) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __repr__(self):
        return f"ModP({self.value}, {self.p})"

    def __str__(self):
        return str(self.value)


Scalar = Union[Rational, ModP]


@dataclass(frozen=True)
class Field:
    characteristic: int = 0

    def __post_init__(self):
        c = self.characteristic
        if c != 0 and not is_prime(c):
            raise ValueError(f"characteristic {c} is neither 0 nor prime")

    def __call__(self, x) -> Scalar:
        p = self.characteristic
        if isinstance(x, ModP):
            if p == 0 or x.p != p:
                raise ValueError("mixed characteristics")
            return x
        if p == 0:
            return mpq(x)
        if isinstance(x, str):
            x = mpq(x)
        if isinstance(x, RATIONALS):
            return ModP(0, p) + x
        return ModP(int(x), p)

    @property
    def zero(self) -> Scalar:
        return self(0)

    @property
    def one(self) -> Scalar:
        return self(1)


def scalar_char(a: Scalar) -> int:
    return a.p if isinstance(a, ModP) else 0


def scalar_arith(op: str, a: Scalar, b: Scalar) -> Scalar:
    if scalar_char(a) != scalar_char(b):
        raise ValueError("mixed characteristics")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if not b:
            raise ZeroDivisionError("division by zero")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def format_scalar(c: Scalar) -> str:
    if isinstance(c, RATIONALS) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    if isinstance(c, RATIONALS):
        return str(c.numerator)
    return str(c)


def is_negative(c: Scalar) -> bool:
    return isinstance(c, RATIONALS) and c < 0
