"""Holomorphic differential forms with rational-function coefficients on one chart."""
from __future__ import annotations

from typing import Iterable, Mapping

from .errors import ChartMismatch, InvalidParameters
from .field import QQ, Field
from .ratfunc import (
    PolyRing,
    RationalFunction,
    parse_expression,
    partial_derivative,
    poly_ring,
    substitute,
    to_expression,
)


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Sign of the shuffle sorting ``a + b``; 0 if they share an index."""
    inversions = 0
    for i in a:
        for j in b:
            if i == j:
                return 0
            if i > j:
                inversions += 1
    return -1 if inversions & 1 else 1


class DifferentialForm:
    """Sum of ``coeff * dx_I`` over strictly increasing index tuples ``I``.

    ``components`` maps index tuples (positions in ``ring.variables``) to nonzero
    coefficients. Mixed degrees are representable; the invariant formulas only ever produce
    homogeneous forms.
    """

    __slots__ = ("ring", "components")

    def __init__(self, ring: PolyRing, components: Mapping[tuple[int, ...], RationalFunction] | None = None):
        self.ring = ring
        comps = {}
        for key, c in (components or {}).items():
            key = tuple(key)
            if any(b <= a for a, b in zip(key, key[1:])):
                raise InvalidParameters(f"component key {key} is not strictly increasing")
            if key and (key[0] < 0 or key[-1] >= ring.nvars):
                raise InvalidParameters(f"component key {key} out of range")
            if c.ring != ring:
                raise ChartMismatch(f"coefficient over {c.ring.variables}, form over {ring.variables}")
            if not c.is_zero():
                comps[key] = c
        self.components = comps

    @classmethod
    def _raw(cls, ring, comps):
        obj = object.__new__(cls)
        obj.ring = ring
        obj.components = comps
        return obj

    # -- constructors -------------------------------------------------------------

    @classmethod
    def zero(cls, ring: PolyRing) -> "DifferentialForm":
        return cls._raw(ring, {})

    @classmethod
    def function(cls, f: RationalFunction) -> "DifferentialForm":
        return cls._raw(f.ring, {} if f.is_zero() else {(): f})

    @classmethod
    def dvar(cls, ring: PolyRing, name: str) -> "DifferentialForm":
        return cls._raw(ring, {(ring.index(name),): ring.one()})

    # -- introspection ------------------------------------------------------------

    @property
    def chart_vars(self) -> tuple[str, ...]:
        return self.ring.variables

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def degrees(self) -> set[int]:
        return {len(k) for k in self.components}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int | None:
        """Degree of a homogeneous form; ``None`` for the zero form."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise InvalidParameters(f"form of mixed degree {sorted(degs)}")
        return next(iter(degs))

    def coefficient(self, names: Iterable[str] = ()) -> RationalFunction:
        key = tuple(sorted(self.ring.index(n) for n in names))
        return self.components.get(key, self.ring.zero())

    # -- linear structure ---------------------------------------------------------

    def _check(self, other: "DifferentialForm"):
        if other.ring is not self.ring and other.ring != self.ring:
            raise ChartMismatch(f"{list(self.ring.variables)} vs {list(other.ring.variables)}")

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check(other)
        if not other.components:
            return self
        comps = dict(self.components)
        for k, c in other.components.items():
            if k in comps:
                s = comps[k] + c
                if s.is_zero():
                    del comps[k]
                else:
                    comps[k] = s
            else:
                comps[k] = c
        return DifferentialForm._raw(self.ring, comps)

    def __neg__(self):
        return DifferentialForm._raw(self.ring, {k: -c for k, c in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "DifferentialForm":
        """Multiply every coefficient by a function or scalar."""
        if not isinstance(f, RationalFunction):
            f = self.ring.const(getattr(f, "value", f))
        if f.is_zero():
            return DifferentialForm.zero(self.ring)
        if f.is_one():
            return self
        return DifferentialForm._raw(self.ring, {k: f * c for k, c in self.components.items()})

    def __mul__(self, other):
        if isinstance(other, DifferentialForm):
            return wedge(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self.ring == other.ring and self.components == other.components

    def __hash__(self):
        return hash((self.ring, frozenset(self.components.items())))

    def __repr__(self):
        return f"DifferentialForm({format_form(self)!r})"

    def __str__(self):
        return format_form(self)

    def d(self) -> "DifferentialForm":
        return exterior_derivative(self)


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    a._check(b)
    if not a.components or not b.components:
        return DifferentialForm.zero(a.ring)
    out: dict[tuple[int, ...], RationalFunction] = {}
    for ka, ca in a.components.items():
        for kb, cb in b.components.items():
            sign = _merge_sign(ka, kb)
            if not sign:
                continue
            key = tuple(sorted(ka + kb))
            prod = ca * cb
            if sign < 0:
                prod = -prod
            if key in out:
                out[key] = out[key] + prod
            else:
                out[key] = prod
    return DifferentialForm._raw(a.ring, {k: c for k, c in out.items() if not c.is_zero()})


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    out: dict[tuple[int, ...], RationalFunction] = {}
    for key, c in a.components.items():
        for i in range(a.ring.nvars):
            if i in key:
                continue
            dc = partial_derivative(c, i)
            if dc.is_zero():
                continue
            below = sum(1 for j in key if j < i)
            if below & 1:
                dc = -dc
            new = tuple(sorted(key + (i,)))
            out[new] = out[new] + dc if new in out else dc
    return DifferentialForm._raw(a.ring, {k: c for k, c in out.items() if not c.is_zero()})


def pullback(a: DifferentialForm, change) -> DifferentialForm:
    """Pull ``a`` back along ``change``.

    ``change.assignment`` maps each of ``a``'s chart variables to a rational function
    of the source chart's variables. Coefficients are substituted and each
    ``d(var)`` becomes the differential of its image.
    """
    assignment: Mapping[str, RationalFunction] = change.assignment
    missing = [v for v in a.ring.variables if v not in assignment]
    if missing:
        raise ChartMismatch(f"change does not assign {missing}")
    images = [assignment[v] for v in a.ring.variables]
    source = images[0].ring if images else getattr(change, "source_ring", None)
    if source is None:
        raise InvalidParameters("cannot infer the source chart of an empty change")
    if not a.components:
        return DifferentialForm.zero(source)
    differentials = {}
    result = DifferentialForm.zero(source)
    for key, c in a.components.items():
        term = DifferentialForm.function(substitute(c, assignment) if a.ring.nvars else _lift_const(c, source))
        for i in key:
            if i not in differentials:
                differentials[i] = exterior_derivative(DifferentialForm.function(images[i]))
            term = wedge(term, differentials[i])
            if not term.components:
                break
        result = result + term
    return result


def _lift_const(c: RationalFunction, ring: PolyRing) -> RationalFunction:
    f = c.field.from_backend(c._n.leading_coefficient()) if not c.is_zero() else c.field.zero()
    return ring.const(f.value)


# -- serialisation ----------------------------------------------------------------


def form_to_records(a: DifferentialForm) -> list[dict]:
    names = a.ring.variables
    return [
        {"indices": [names[i] for i in key], "coeff": to_expression(c)}
        for key, c in sorted(a.components.items(), key=lambda kv: (len(kv[0]), kv[0]))
    ]


def form_from_records(records: Iterable[Mapping], variables, field: Field = QQ) -> DifferentialForm:
    ring = poly_ring(tuple(variables), field)
    out = DifferentialForm.zero(ring)
    for rec in records:
        idx = [ring.index(n) for n in rec["indices"]]
        if len(set(idx)) != len(idx):
            continue
        order = sorted(range(len(idx)), key=lambda t: idx[t])
        inversions = sum(1 for x in range(len(order)) for y in range(x + 1, len(order)) if order[x] > order[y])
        coeff = parse_expression(rec["coeff"], ring.variables, field)
        if inversions & 1:
            coeff = -coeff
        out = out + DifferentialForm(ring, {tuple(sorted(idx)): coeff})
    return out


def format_form(a: DifferentialForm) -> str:
    """Human-readable rendering, e.g. ``3/z dz``."""
    if not a.components:
        return "0"
    names = a.ring.variables
    parts = []
    for key, c in sorted(a.components.items(), key=lambda kv: (len(kv[0]), kv[0])):
        basis = "^".join(f"d{names[i]}" for i in key)
        coeff = to_expression(c)
        if " " in coeff:
            coeff = f"({coeff})"
        parts.append(f"{coeff} {basis}" if basis else coeff)
    return " + ".join(parts)
