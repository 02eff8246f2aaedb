"""Multivariate polynomials and rational functions over an exact field.

Values are immutable. A :class:`RationalFunction` is always stored in canonical
form: numerator and denominator coprime, denominator monic under the graded
lexicographic order of the ring's declared variable order. Equality is therefore
structural.

Polynomial arithmetic and gcd are delegated to FLINT's sparse multivariate
polynomials (``python-flint``); everything above that (canonical forms,
substitution, the expression grammar) lives here.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Mapping, Sequence

import flint

from .errors import (
    ChartMismatch,
    DivisionByZero,
    DivisionByZeroFunction,
    ExpressionSyntaxError,
    FieldMismatch,
    InvalidParameters,
    NotLaurent,
    SubstitutedDenominatorZero,
    UnknownVariable,
)
from .field import QQ, Field, Scalar

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_WORD_MODULUS = 2**63


@dataclass(frozen=True, eq=False)
class PolyRing:
    """Polynomial ring ``field[variables]``; obtain instances through :func:`poly_ring`."""

    variables: tuple[str, ...]
    field: Field = QQ
    ctx: object = dc_field(default=None, repr=False, compare=False)

    def __eq__(self, other):
        return self is other or (
            isinstance(other, PolyRing)
            and self.variables == other.variables
            and self.field == other.field
        )

    def __hash__(self):
        return hash((self.variables, self.field))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise UnknownVariable(f"{var!r} is not one of {list(self.variables)}") from None

    # -- raw backend helpers ---------------------------------------------------

    def _const(self, value):
        return self.ctx.constant(self.field.to_backend(value))

    def _from_terms(self, terms: Mapping[tuple[int, ...], object]):
        return self.ctx.from_dict(
            {tuple(e): self.field.to_backend(getattr(c, "value", c)) for e, c in terms.items()}
        )

    # -- element constructors --------------------------------------------------

    def zero(self) -> "RationalFunction":
        return RationalFunction._raw(self, self.ctx.from_dict({}), self._const(1))

    def one(self) -> "RationalFunction":
        return self.const(1)

    def const(self, value) -> "RationalFunction":
        return RationalFunction._raw(self, self._const(value), self._const(1))

    def var(self, name: str) -> "RationalFunction":
        return RationalFunction._raw(self, self.ctx.gens()[self.index(name)], self._const(1))

    def gens(self) -> tuple["RationalFunction", ...]:
        return tuple(self.var(v) for v in self.variables)

    def polynomial(self, terms: Mapping[tuple[int, ...], object]) -> "Polynomial":
        return Polynomial(self, self._from_terms(terms))

    def parse(self, text: str) -> "RationalFunction":
        return parse_expression(text, self.variables, self.field)


@lru_cache(maxsize=None)
def poly_ring(variables: Sequence[str] = (), field: Field = QQ) -> PolyRing:
    variables = tuple(variables)
    if len(set(variables)) != len(variables):
        raise InvalidParameters(f"repeated variable in {variables}")
    for v in variables:
        if not _IDENT.match(v):
            raise InvalidParameters(f"invalid variable name {v!r}")
    p = field.characteristic
    if p == 0:
        ctx = flint.fmpq_mpoly_ctx.get(variables, "deglex")
    elif p < _WORD_MODULUS:
        ctx = flint.nmod_mpoly_ctx.get(variables, p, "deglex")
    else:
        ctx = flint.fmpz_mod_mpoly_ctx.get(variables, p, "deglex")
    return PolyRing(variables, field, ctx)


def _check_same(a: PolyRing, b: PolyRing):
    if a is b:
        return
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    if a.variables != b.variables:
        raise ChartMismatch(f"{list(a.variables)} vs {list(b.variables)}")


class Polynomial:
    """Sparse polynomial; ``terms`` maps exponent vectors to nonzero scalars."""

    __slots__ = ("ring", "_p")

    def __init__(self, ring: PolyRing, raw):
        self.ring = ring
        self._p = raw

    @property
    def variables(self) -> tuple[str, ...]:
        return self.ring.variables

    @property
    def terms(self) -> dict[tuple[int, ...], Scalar]:
        conv = self.ring.field.from_backend
        return {tuple(int(e) for e in m): conv(c) for m, c in self._p.terms()}

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_monomial(self) -> bool:
        return len(self._p) == 1

    def degrees(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self._p.degrees())

    def leading_coefficient(self) -> Scalar:
        return self.ring.field.from_backend(self._p.leading_coefficient())

    def _wrap(self, other):
        if isinstance(other, Polynomial):
            _check_same(self.ring, other.ring)
            return other._p
        return self.ring._const(getattr(other, "value", other))

    def __add__(self, other):
        return Polynomial(self.ring, self._p + self._wrap(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial(self.ring, self._p - self._wrap(other))

    def __rsub__(self, other):
        return Polynomial(self.ring, self._wrap(other) - self._p)

    def __mul__(self, other):
        return Polynomial(self.ring, self._p * self._wrap(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(self.ring, -self._p)

    def __pow__(self, n: int):
        return Polynomial(self.ring, self._p**n)

    def gcd(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(self.ring, self._p.gcd(self._wrap(other)))

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._p == other._p
        return self._p == self._wrap(other)

    def __hash__(self):
        return hash((self.ring, str(self._p)))

    def __str__(self):
        return _poly_str(self.ring, self._p)

    def __repr__(self):
        return f"Polynomial({self}, vars={list(self.variables)})"


class RationalFunction:
    """Canonical quotient ``numerator / denominator`` of polynomials."""

    __slots__ = ("ring", "_n", "_d")

    def __init__(self, numerator: Polynomial, denominator: Polynomial | None = None):
        ring = numerator.ring
        den = ring._const(1) if denominator is None else denominator._p
        if denominator is not None:
            _check_same(ring, denominator.ring)
        n, d = _canonical(ring, numerator._p, den)
        self.ring, self._n, self._d = ring, n, d

    @classmethod
    def _raw(cls, ring, n, d) -> "RationalFunction":
        obj = object.__new__(cls)
        obj.ring, obj._n, obj._d = ring, n, d
        return obj

    @classmethod
    def _make(cls, ring, n, d) -> "RationalFunction":
        n, d = _canonical(ring, n, d)
        return cls._raw(ring, n, d)

    # -- accessors --------------------------------------------------------------

    @property
    def numerator(self) -> Polynomial:
        return Polynomial(self.ring, self._n)

    @property
    def denominator(self) -> Polynomial:
        return Polynomial(self.ring, self._d)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.ring.variables

    @property
    def field(self) -> Field:
        return self.ring.field

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def is_one(self) -> bool:
        return self._d.is_one() and self._n.is_one()

    def is_constant(self) -> bool:
        return self._d.is_constant() and self._n.is_constant()

    def is_polynomial(self) -> bool:
        return self._d.is_constant()

    def __bool__(self):
        return not self._n.is_zero()

    # -- arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            _check_same(self.ring, other.ring)
            return other
        if isinstance(other, Polynomial):
            _check_same(self.ring, other.ring)
            return RationalFunction._raw(self.ring, other._p, self.ring._const(1))
        if isinstance(other, Scalar):
            if other.field != self.ring.field:
                raise FieldMismatch(f"{self.ring.field} vs {other.field}")
            other = other.value
        return self.ring.const(other)

    def __add__(self, other):
        o = self._coerce(other)
        if o._n.is_zero():
            return self
        if self._n.is_zero():
            return o
        if self._d == o._d:
            return RationalFunction._make(self.ring, self._n + o._n, self._d)
        return RationalFunction._make(self.ring, self._n * o._d + o._n * self._d, self._d * o._d)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(self.ring, -self._n, self._d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if self._n.is_zero() or o._n.is_zero():
            return self.ring.zero()
        g1 = self._n.gcd(o._d)
        g2 = o._n.gcd(self._d)
        n1, d2 = (self._n, o._d) if g1.is_one() else (self._n / g1, o._d / g1)
        n2, d1 = (o._n, self._d) if g2.is_one() else (o._n / g2, self._d / g2)
        n, d = n1 * n2, d1 * d2
        lc = d.leading_coefficient()
        if lc != 1:
            n, d = n / lc, d / lc
        return RationalFunction._raw(self.ring, n, d)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self._n.is_zero():
            raise DivisionByZeroFunction("inverse of the zero function")
        return RationalFunction._make(self.ring, self._d, self._n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o._n.is_zero():
            raise DivisionByZeroFunction("division by the zero function")
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction._raw(self.ring, self._n**n, self._d**n)

    def scale(self, c) -> "RationalFunction":
        return self * self.ring.const(getattr(c, "value", c))

    # -- comparison -------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.ring == other.ring and self._n == other._n and self._d == other._d
        try:
            o = self._coerce(other)
        except (FieldMismatch, ChartMismatch, TypeError, ValueError):
            return NotImplemented
        return self._n == o._n and self._d == o._d

    def __hash__(self):
        return hash((self.ring, str(self._n), str(self._d)))

    def __str__(self):
        return to_expression(self)

    def __repr__(self):
        return f"RationalFunction({to_expression(self)!r}, vars={list(self.variables)})"

    # -- calculus ---------------------------------------------------------------

    def diff(self, var: str | int) -> "RationalFunction":
        return partial_derivative(self, var)


def _canonical(ring: PolyRing, n, d):
    if d.is_zero():
        raise DivisionByZeroFunction("zero denominator")
    if n.is_zero():
        return n, ring._const(1)
    if not d.is_constant():
        g = n.gcd(d)
        if not g.is_one():
            n, d = n / g, d / g
    lc = d.leading_coefficient()
    if lc != 1:
        n, d = n / lc, d / lc
    return n, d


def rf_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise InvalidParameters(f"unknown operation {op!r}")


# -- calculus -------------------------------------------------------------------


def partial_derivative(f: RationalFunction, var: str | int) -> RationalFunction:
    """Quotient-rule derivative of ``f`` with respect to ``var`` (a name or an index)."""
    i = var if isinstance(var, int) else f.ring.index(var)
    dn = f._n.derivative(i)
    if f._d.is_constant():
        return RationalFunction._raw(f.ring, dn, f._d)
    dd = f._d.derivative(i)
    if dd.is_zero():
        return RationalFunction._make(f.ring, dn, f._d)
    return RationalFunction._make(f.ring, dn * f._d - f._n * dd, f._d * f._d)


def substitute(f: RationalFunction, assignment: Mapping[str, RationalFunction]) -> RationalFunction:
    """Compose ``f`` with the map ``var -> assignment[var]``.

    The images must all live in one ring (the target); variables of ``f`` that do
    not occur may be left unassigned.
    """
    images = list(assignment.values())
    if not images:
        if f.is_constant():
            return f
        raise InvalidParameters("empty assignment for a non-constant function")
    target = images[0].ring
    for im in images:
        _check_same(target, im.ring)
    if target.field != f.ring.field:
        raise FieldMismatch(f"{f.ring.field} vs {target.field}")
    degs = [max(a, b) for a, b in zip(f._n.degrees(), f._d.degrees())] if f.ring.nvars else []
    values = []
    for name, deg in zip(f.ring.variables, degs):
        if name in assignment:
            values.append(assignment[name])
        elif deg:
            raise UnknownVariable(f"variable {name!r} is not assigned")
        else:
            values.append(None)
    nn, nd = _subst_poly(f._n, values, target)
    dn, dd = _subst_poly(f._d, values, target)
    if dn.is_zero():
        raise SubstitutedDenominatorZero(f"denominator of {f} vanishes identically")
    return RationalFunction._make(target, nn * dd, nd * dn)


def _subst_poly(p, values, target: PolyRing):
    """Return (num, den) backend polynomials of ``p`` evaluated at rational ``values``."""
    field = target.field

    def const(c):
        return target._const(field.from_backend(c).value)

    if p.is_zero():
        return target.ctx.from_dict({}), target._const(1)
    if p.is_constant():
        return const(p.leading_coefficient()), target._const(1)
    degs = [int(d) for d in p.degrees()]
    one = target._const(1)
    num_pows: dict[tuple[int, int], object] = {}
    den_pows: dict[tuple[int, int], object] = {}

    def npow(k, e):
        key = (k, e)
        if key not in num_pows:
            num_pows[key] = values[k]._n ** e
        return num_pows[key]

    def dpow(k, e):
        key = (k, e)
        if key not in den_pows:
            den_pows[key] = values[k]._d ** e
        return den_pows[key]

    total = target.ctx.from_dict({})
    for mono, c in p.terms():
        term = const(c)
        for k, e in enumerate(mono):
            e = int(e)
            if degs[k] == 0:
                continue
            if e:
                term = term * npow(k, e)
            if degs[k] - e:
                term = term * dpow(k, degs[k] - e)
        total = total + term
    den = one
    for k, D in enumerate(degs):
        if D:
            den = den * dpow(k, D)
    return total, den


def laurent_coefficient(f: RationalFunction, var: str, exponent: int) -> Scalar:
    """Coefficient of ``var**exponent`` in the finite Laurent expansion of univariate ``f``."""
    i = f.ring.index(var)
    for j in range(f.ring.nvars):
        if j != i and (f._n.degrees()[j] or f._d.degrees()[j]):
            raise InvalidParameters(f"{f} depends on variables other than {var}")
    if len(f._d) != 1:
        raise NotLaurent(f"denominator of {f} is not a monomial in {var}")
    (dmono, dcoeff), = f._d.terms()
    shift = int(dmono[i])
    target = exponent + shift
    for mono, c in f._n.terms():
        if int(mono[i]) == target:
            return f.field.from_backend(c) / f.field.from_backend(dcoeff)
    return f.field.zero()


# -- expression grammar ---------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("int", m.group(1), start))
        elif m.group(2):
            tokens.append(("ident", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExpressionSyntaxError(f"unexpected character {ch!r}", start, text)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


_BINARY = {"+": 1, "-": 1, "*": 2, "/": 2}


class _Parser:
    """Precedence climbing: ``^`` > unary ``-`` > ``* /`` > ``+ -``, all left-associative."""

    def __init__(self, text: str, ring: PolyRing):
        self.text = text
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ExpressionSyntaxError(message, tok[2], self.text)

    def parse(self) -> RationalFunction:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        value = self.expr(1)
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return value

    def expr(self, min_prec: int) -> RationalFunction:
        lhs = self.unary()
        while True:
            kind = self.peek()[0]
            prec = _BINARY.get(kind)
            if prec is None or prec < min_prec:
                return lhs
            tok = self.advance()
            rhs = self.expr(prec + 1)
            if kind == "+":
                lhs = lhs + rhs
            elif kind == "-":
                lhs = lhs - rhs
            elif kind == "*":
                lhs = lhs * rhs
            else:
                if rhs.is_zero():
                    if rhs.is_constant():
                        raise DivisionByZero(f"division by zero at position {tok[2]}", position=tok[2])
                    raise DivisionByZeroFunction(f"division by zero at position {tok[2]}")
                lhs = lhs / rhs

    def unary(self) -> RationalFunction:
        if self.peek()[0] == "-":
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        while self.peek()[0] == "^":
            self.advance()
            tok = self.peek()
            if tok[0] != "int":
                self.fail("exponent must be a nonnegative integer literal")
            self.advance()
            base = base ** int(tok[1])
        return base

    def atom(self) -> RationalFunction:
        tok = self.advance()
        kind = tok[0]
        if kind == "int":
            return self.ring.const(int(tok[1]))
        if kind == "ident":
            if tok[1] not in self.ring.variables:
                raise UnknownVariable(
                    f"{tok[1]!r} at position {tok[2]} is not one of {list(self.ring.variables)}",
                    position=tok[2],
                )
            return self.ring.var(tok[1])
        if kind == "(":
            value = self.expr(1)
            if self.peek()[0] != ")":
                self.fail("expected ')'")
            self.advance()
            return value
        self.fail("expected a number, variable or '('", tok)


def parse_expression(text: str, variables: Sequence[str], field: Field = QQ) -> RationalFunction:
    return _Parser(text, poly_ring(tuple(variables), field)).parse()


def _poly_str(ring: PolyRing, p) -> str:
    if p.is_zero():
        return "0"
    out = []
    for mono, c in p.terms():
        factors = []
        for name, e in zip(ring.variables, mono):
            e = int(e)
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        coeff = ring.field.from_backend(c).value
        neg = ring.field.is_rational and coeff < 0
        mag = -coeff if neg else coeff
        if factors:
            body = "*".join(factors) if mag == 1 else f"{mag}*" + "*".join(factors)
        else:
            body = str(mag)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def to_expression(f: RationalFunction) -> str:
    """Serialise in the expression grammar; ``parse_expression`` inverts it exactly."""
    num = _poly_str(f.ring, f._n)
    if f._d.is_one():
        return num
    den = _poly_str(f.ring, f._d)
    if len(f._n) > 1 or "/" in num:
        num = f"({num})"
    if len(f._d) > 1 or "*" in den:
        den = f"({den})"
    return f"{num}/{den}"
