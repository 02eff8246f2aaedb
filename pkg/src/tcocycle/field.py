"""Exact coefficient fields: the rationals and prime fields F_p."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import flint

from .errors import CharDividesFactorial, DivisionByZero, FieldMismatch, InvalidParameters


@dataclass(frozen=True)
class Field:
    """A coefficient field, identified by its characteristic (0 means the rationals)."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p < 0 or p == 1:
            raise InvalidParameters(f"bad characteristic {p}")
        if p and not flint.fmpz(p).is_prime():
            raise InvalidParameters(f"{p} is not prime")

    @staticmethod
    def rational() -> "Field":
        return QQ

    @staticmethod
    def prime(p: int) -> "Field":
        return Field(int(p))

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    def __str__(self):
        return "Q" if self.is_rational else f"F_{self.characteristic}"

    # -- element construction -------------------------------------------------

    def canonical(self, value) -> Fraction | int:
        """Canonical stored value: reduced Fraction over Q, residue in [0, p) over F_p."""
        p = self.characteristic
        if not p:
            return Fraction(value)
        if isinstance(value, Fraction):
            num, den = value.numerator % p, value.denominator % p
            if den == 0:
                raise DivisionByZero(f"denominator {value.denominator} vanishes in {self}")
            return num * pow(den, -1, p) % p
        return int(value) % p

    def __call__(self, value) -> "Scalar":
        return Scalar(self.canonical(value), self)

    def zero(self) -> "Scalar":
        return self(0)

    def one(self) -> "Scalar":
        return self(1)

    # -- bridging to the polynomial backend ------------------------------------

    def to_backend(self, value):
        if self.is_rational:
            v = Fraction(value)
            return flint.fmpq(v.numerator, v.denominator)
        return int(self.canonical(value))

    def from_backend(self, c) -> "Scalar":
        if self.is_rational:
            return Scalar(Fraction(int(c.p), int(c.q)), self)
        return Scalar(int(c) % self.characteristic, self)

    # -- json ------------------------------------------------------------------

    def to_json(self):
        return "Q" if self.is_rational else {"prime": self.characteristic}

    @staticmethod
    def from_json(obj) -> "Field":
        if obj in (None, "Q", "QQ", "rational"):
            return QQ
        if isinstance(obj, dict) and "prime" in obj:
            return Field.prime(obj["prime"])
        raise InvalidParameters(f"unrecognised field descriptor {obj!r}")

    @staticmethod
    def parse(text: str) -> "Field":
        """Parse a command-line field descriptor: ``Q`` or ``prime:101``."""
        text = text.strip()
        if text in ("Q", "QQ", "rational"):
            return QQ
        head, _, tail = text.partition(":")
        if head in ("prime", "F", "GF") and tail.isdigit():
            return Field.prime(int(tail))
        raise InvalidParameters(f"unrecognised field {text!r}; expected Q or prime:<p>")


QQ = Field(0)


@dataclass(frozen=True)
class Scalar:
    """An element of a :class:`Field`, stored canonically."""

    value: Fraction | int
    field: Field = QQ

    def _check(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            other = self.field(other)
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return self.field(self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return self.field(self.value - other.value)

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return self.field(self.value * other.value)

    __rmul__ = __mul__

    def __neg__(self):
        return self.field(-self.value)

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        p = self.field.characteristic
        if p:
            return Scalar(pow(self.value, -1, p), self.field)
        return Scalar(1 / self.value, self.field)

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) / self

    def is_zero(self) -> bool:
        return self.value == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.canonical(other)
        except (TypeError, ValueError, DivisionByZero):
            return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field))

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"Scalar({self.value}, {self.field})"


def arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Field arithmetic by operator name (``add``, ``sub``, ``mul``, ``div``)."""
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise InvalidParameters(f"unknown operation {op!r}")


def factorial_divisible(n: int, field: Field) -> bool:
    """True when the characteristic divides ``n!`` (only possible for ``p <= n``)."""
    p = field.characteristic
    return bool(p) and p <= n


@lru_cache(maxsize=None)
def factorial_inverse(n: int, field: Field = QQ) -> Scalar:
    """``1/n!`` in ``field``; raises :class:`CharDividesFactorial` when it does not exist."""
    if n < 0:
        raise InvalidParameters("factorial of a negative integer")
    if factorial_divisible(n, field):
        raise CharDividesFactorial(
            f"characteristic {field.characteristic} divides {n}! = {math.factorial(n)}",
            n=n,
            characteristic=field.characteristic,
        )
    return field(math.factorial(n)).inverse()
