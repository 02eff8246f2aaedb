"""Cech cochains with differential-form coefficients."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

from .errors import ChartMismatch, IndexOutOfRange, InvalidBundle, InvalidParameters
from .forms import DifferentialForm, form_from_records, form_to_records, format_form, wedge
from .geometry import CechSpace


def _sort_sign(t: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Sorted tuple and the sign of the sorting permutation (0 on repeats)."""
    t = list(t)
    if len(set(t)) != len(t):
        return tuple(sorted(t)), 0
    sign = 1
    for a in range(len(t)):
        for b in range(a + 1, len(t)):
            if t[a] > t[b]:
                sign = -sign
    return tuple(sorted(t)), sign


class CechCochain:
    """Degree-``k`` cochain: forms of degree ``grade`` on strictly increasing ``(k+1)``-tuples.

    Each component lives in the coordinates of its tuple's anchor (minimal) chart.
    Absent tuples are zero.
    """

    __slots__ = ("space", "degree", "grade", "components")

    def __init__(self, space: CechSpace, degree: int, grade: int, components: Mapping | None = None):
        if degree < 0 or grade < 0:
            raise InvalidParameters("degree and grade must be nonnegative")
        self.space = space
        self.degree = degree
        self.grade = grade
        comps = {}
        for t, w in (components or {}).items():
            t = tuple(t)
            if len(t) != degree + 1 or any(b <= a for a, b in zip(t, t[1:])):
                raise InvalidParameters(f"tuple {list(t)} is not a strictly increasing {degree + 1}-tuple")
            if not space.in_nerve(t):
                raise IndexOutOfRange(f"tuple {list(t)} is not in the nerve")
            if w.ring != space.cover.ring(t[0]):
                raise ChartMismatch(f"component on {list(t)} is not in chart {t[0]} coordinates")
            if w.components and w.degrees() != {grade}:
                raise InvalidParameters(f"component on {list(t)} is not homogeneous of degree {grade}")
            if w.components:
                comps[t] = w
        self.components = comps

    @classmethod
    def zero(cls, space: CechSpace, degree: int, grade: int) -> "CechCochain":
        return cls(space, degree, grade, {})

    @classmethod
    def constant(cls, space: CechSpace, value=1) -> "CechCochain":
        """The 0-cochain with the constant function ``value`` on every chart."""
        comps = {}
        for (i,) in space.tuples(1):
            ring = space.cover.ring(i)
            comps[(i,)] = DifferentialForm.function(ring.const(value))
        return cls(space, 0, 0, comps)

    def tuples(self) -> list[tuple[int, ...]]:
        return self.space.tuples(self.degree + 1)

    def __getitem__(self, t) -> DifferentialForm:
        return component_signed(self, t)

    def is_zero(self) -> bool:
        return not self.components

    def _compatible(self, other: "CechCochain"):
        if self.degree != other.degree:
            raise InvalidParameters(f"degree {self.degree} vs {other.degree}")
        if not self.space.same_as(other.space):
            raise InvalidBundle("cochains live on different covers")

    def __add__(self, other: "CechCochain") -> "CechCochain":
        self._compatible(other)
        comps = dict(self.components)
        for t, w in other.components.items():
            comps[t] = comps[t] + w if t in comps else w
        grade = self.grade if self.components else other.grade
        return CechCochain(self.space, self.degree, grade, comps)

    def __neg__(self):
        return CechCochain(self.space, self.degree, self.grade, {t: -w for t, w in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CechCochain":
        return CechCochain(self.space, self.degree, self.grade, {t: w.scale(c) for t, w in self.components.items()})

    def __eq__(self, other):
        if not isinstance(other, CechCochain):
            return NotImplemented
        return self.degree == other.degree and self.components == other.components

    def __hash__(self):
        return hash((self.degree, frozenset(self.components.items())))

    def __repr__(self):
        body = ", ".join(f"{list(t)}: {format_form(w)}" for t, w in sorted(self.components.items()))
        return f"CechCochain(degree={self.degree}, grade={self.grade}, {{{body}}})"

    def coboundary(self) -> "CechCochain":
        return coboundary(self)

    def is_cocycle(self) -> "ResidualReport":
        return is_cocycle(self)

    def to_json(self, include_cover: bool = True) -> dict:
        return cochain_to_json(self, include_cover)


def component_signed(c: CechCochain, t: Sequence[int]) -> DifferentialForm:
    """The component on any ``(k+1)``-tuple, extended by total antisymmetry."""
    t = tuple(t)
    if len(t) != c.degree + 1:
        raise IndexOutOfRange(f"expected a {c.degree + 1}-tuple, got {list(t)}")
    for i in t:
        if i not in c.space.cover.charts:
            raise IndexOutOfRange(f"index {i} is not a chart of the cover")
    s, sign = _sort_sign(t)
    ring = c.space.cover.ring(s[0])
    w = c.components.get(s) if sign else None
    if w is None:
        return DifferentialForm.zero(ring)
    return w if sign > 0 else -w


def restrict(space: CechSpace, w: DifferentialForm, source: Sequence[int], target: Sequence[int]) -> DifferentialForm:
    """Rewrite a form on ``U_source`` in the anchor coordinates of ``U_target``."""
    if not set(source) <= set(target):
        raise InvalidParameters(f"{list(target)} does not contain {list(source)}")
    a_src, a_tgt = min(source), min(target)
    if not w.components:
        return DifferentialForm.zero(space.cover.ring(a_tgt))
    return space.cover.pull_form(w, a_tgt, a_src)


def coboundary(c: CechCochain) -> CechCochain:
    """``(dc)_{i1..ik+2} = sum_j (-1)^(j+1) c_{i1..^ij..ik+2}``, j counted from 1."""
    comps = {}
    for t in c.space.tuples(c.degree + 2):
        acc = DifferentialForm.zero(c.space.cover.ring(t[0]))
        for j in range(len(t)):
            face = t[:j] + t[j + 1 :]
            w = c.components.get(face)
            if w is None:
                continue
            w = restrict(c.space, w, face, t)
            acc = acc - w if j & 1 else acc + w
        if acc.components:
            comps[t] = acc
    return CechCochain(c.space, c.degree + 1, c.grade, comps)


@dataclass
class ResidualReport:
    residuals: dict = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.residuals

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {
            "ok": self.ok,
            "residuals": [{"tuple": list(t), "form": form_to_records(w)} for t, w in sorted(self.residuals.items())],
        }


def is_cocycle(c: CechCochain) -> ResidualReport:
    return ResidualReport(dict(coboundary(c).components))


def cup(a: CechCochain, b: CechCochain) -> CechCochain:
    """``w_{i1..i(r+s+1)} = u_{i1..i(r+1)} ^ v_{i(r+1)..i(r+s+1)}``."""
    if not a.space.same_as(b.space):
        raise InvalidBundle("cup product of cochains on different covers")
    r, s = a.degree, b.degree
    comps = {}
    for t in a.space.tuples(r + s + 1):
        front, back = t[: r + 1], t[r:]
        u, v = a.components.get(front), b.components.get(back)
        if u is None or v is None:
            continue
        w = wedge(restrict(a.space, u, front, t), restrict(a.space, v, back, t))
        if w.components:
            comps[t] = w
    return CechCochain(a.space, r + s, a.grade + b.grade, comps)


def cup_power(a: CechCochain, n: int) -> CechCochain:
    if n < 1:
        raise InvalidParameters("cup power needs n >= 1")
    out = a
    for _ in range(n - 1):
        out = cup(out, a)
    return out


# -- serialisation ----------------------------------------------------------------


def cochain_to_json(c: CechCochain, include_cover: bool = True) -> dict:
    out = {
        "degree": c.degree,
        "grade": c.grade,
        "components": [{"tuple": list(t), "form": form_to_records(w)} for t, w in sorted(c.components.items())],
    }
    if include_cover:
        out["cover"] = c.space.to_json()
    return out


def cochain_from_json(obj: Mapping, space: CechSpace | None = None) -> CechCochain:
    if space is None:
        if "cover" not in obj:
            raise InvalidBundle("cochain file has no cover block")
        space = CechSpace.from_json(obj["cover"])
    comps = {}
    for n, rec in enumerate(obj.get("components", [])):
        t = tuple(int(i) for i in rec["tuple"])
        s, sign = _sort_sign(t)
        if not sign:
            continue
        if s[0] not in space.cover.charts:
            raise IndexOutOfRange(f"components[{n}] mentions unknown chart {s[0]}")
        w = form_from_records(rec["form"], space.cover.ring(s[0]).variables, space.cover.field)
        if sign < 0:
            w = -w
        comps[s] = comps[s] + w if s in comps else w
    return CechCochain(space, int(obj["degree"]), int(obj.get("grade", 0)), comps)
