"""Covers, coordinate changes and bundle presentations by transition cocycles.

Every overlap ``U_{i1..ip}`` with ``i1 < .. < ip`` is written in the coordinates of
chart ``i1`` (its anchor). Transitions ``g_ij`` are stored for ``i < j`` only, in
chart-``i`` coordinates; ``g_ji`` is always the exact inverse.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    ChartMismatch,
    CocycleCheckFailed,
    DimensionMismatch,
    ExpressionSyntaxError,
    InvalidBundle,
    MissingCoordinateChange,
    NotFlagPresented,
    PairNotInNerve,
    RankMismatch,
    SingularMatrix,
    TCocycleError,
)
from .field import QQ, Field
from .forms import DifferentialForm, pullback
from .matform import FormMatrix, FuncMatrix, determinant, maurer_cartan, mat_inverse, mat_mul
from .ratfunc import PolyRing, RationalFunction, parse_expression, poly_ring, substitute, to_expression


@dataclass(frozen=True)
class Chart:
    index: int
    vars: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise InvalidBundle(f"chart {self.index} has no coordinates")
        if len(set(self.vars)) != len(self.vars):
            raise InvalidBundle(f"chart {self.index} repeats a coordinate name")


@dataclass(frozen=True, eq=False)
class CoordinateChange:
    """``assignment`` writes each ``to_chart`` variable as a function of ``from_chart`` variables."""

    from_chart: int
    to_chart: int
    assignment: Mapping[str, RationalFunction]
    source_ring: PolyRing | None = None

    @property
    def is_identity(self) -> bool:
        """True when both charts use the same variable list and every variable maps to itself."""
        ring = self.source_ring
        if ring is None or tuple(self.assignment) != ring.variables:
            return False
        return all(f == ring.var(v) for v, f in self.assignment.items())


class Cover:
    """Ordered charts plus the declared coordinate changes between them."""

    def __init__(self, charts: Iterable[Chart], changes: Iterable[CoordinateChange] = (), field: Field = QQ):
        self.field = field
        self.charts: dict[int, Chart] = {}
        for c in sorted(charts, key=lambda c: c.index):
            if c.index in self.charts:
                raise InvalidBundle(f"chart index {c.index} declared twice")
            if c.index < 0:
                raise InvalidBundle(f"chart index {c.index} is negative")
            self.charts[c.index] = c
        self._rings = {i: poly_ring(c.vars, field) for i, c in self.charts.items()}
        self.changes: dict[tuple[int, int], CoordinateChange] = {}
        for ch in changes:
            self._add_change(ch)
        self._check_inverse_pairs()

    def _add_change(self, ch: CoordinateChange):
        a, b = ch.from_chart, ch.to_chart
        if a not in self.charts or b not in self.charts:
            raise InvalidBundle(f"change {a}->{b} mentions an undeclared chart")
        target = self.charts[b].vars
        missing = [v for v in target if v not in ch.assignment]
        if missing:
            raise InvalidBundle(f"change {a}->{b} does not assign {missing}")
        src = self._rings[a]
        for v, f in ch.assignment.items():
            if v not in target:
                raise InvalidBundle(f"change {a}->{b} assigns unknown variable {v!r}")
            if f.ring != src:
                raise ChartMismatch(f"change {a}->{b}: image of {v} is not in chart {a} coordinates")
        if (a, b) in self.changes:
            raise InvalidBundle(f"change {a}->{b} declared twice")
        # key order follows the target chart so that is_identity can compare variable lists
        ch = CoordinateChange(a, b, {v: ch.assignment[v] for v in target}, src)
        self.changes[(a, b)] = ch

    def _check_inverse_pairs(self):
        for (a, b), ab in self.changes.items():
            if a >= b or (b, a) not in self.changes:
                continue
            ba = self.changes[(b, a)]
            # chart-a vars -> chart-b vars -> chart-a vars must be the identity
            for v, f in ba.assignment.items():
                if substitute(f, ab.assignment) != self._rings[a].var(v):
                    raise InvalidBundle(f"changes {a}->{b} and {b}->{a} are not mutually inverse")

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(self.charts)

    def ring(self, i: int) -> PolyRing:
        if i not in self._rings:
            raise InvalidBundle(f"no chart with index {i}")
        return self._rings[i]

    def change(self, from_chart: int, to_chart: int) -> CoordinateChange | None:
        """The declared change, or ``None`` for the identity (same chart)."""
        if from_chart == to_chart:
            return None
        ch = self.changes.get((from_chart, to_chart))
        if ch is None:
            raise MissingCoordinateChange(
                f"no coordinate change from chart {from_chart} to chart {to_chart}",
                from_chart=from_chart,
                to_chart=to_chart,
            )
        return ch

    def pull_function(self, f: RationalFunction, from_chart: int, to_chart: int) -> RationalFunction:
        """Rewrite ``f`` (chart ``to_chart`` coordinates) in chart ``from_chart`` coordinates."""
        ch = self.change(from_chart, to_chart)
        if ch is None or ch.is_identity:
            return f
        return substitute(f, ch.assignment) if not f.is_constant() else _recast(f, self._rings[from_chart])

    def pull_matrix(self, m: FuncMatrix, from_chart: int, to_chart: int) -> FuncMatrix:
        ch = self.change(from_chart, to_chart)
        if ch is None or ch.is_identity:
            return m
        ring = self._rings[from_chart]
        return FuncMatrix(ring, [[self.pull_function(e, from_chart, to_chart) for e in r] for r in m.entries])

    def pull_form(self, w: DifferentialForm, from_chart: int, to_chart: int) -> DifferentialForm:
        ch = self.change(from_chart, to_chart)
        if ch is None or ch.is_identity:
            return w
        return pullback(w, ch)

    def same_as(self, other: "Cover") -> bool:
        if self is other:
            return True
        if self.field != other.field or self.charts != other.charts:
            return False
        if set(self.changes) != set(other.changes):
            return False
        return all(
            dict(self.changes[k].assignment) == dict(other.changes[k].assignment) for k in self.changes
        )


def _recast(f: RationalFunction, ring: PolyRing) -> RationalFunction:
    """Move a constant function into another ring."""
    if f.ring == ring:
        return f
    if f.is_zero():
        return ring.zero()
    num = f.field.from_backend(f._n.leading_coefficient())
    den = f.field.from_backend(f._d.leading_coefficient())
    return ring.const((num / den).value)


def _faces(t: tuple[int, ...]):
    for n in range(1, len(t) + 1):
        yield from combinations(t, n)


class CechSpace:
    """A cover together with its nerve: the index tuples whose overlaps are nonempty.

    ``nerve`` lists declared overlaps; all their faces are included. When omitted
    every tuple of distinct chart indices counts.
    """

    def __init__(self, cover: Cover, nerve: Iterable[Sequence[int]] | None = None):
        self.cover = cover
        if nerve is None:
            self.nerve = None
            self._simplices = None
        else:
            declared = tuple(sorted({tuple(sorted(int(i) for i in t)) for t in nerve}))
            for t in declared:
                if len(set(t)) != len(t):
                    raise InvalidBundle(f"nerve tuple {list(t)} repeats an index")
                for i in t:
                    if i not in cover.charts:
                        raise InvalidBundle(f"nerve tuple {list(t)} mentions an undeclared chart")
            self.nerve = declared
            self._simplices = {f for t in declared for f in _faces(t)}
            self._simplices.update((i,) for i in cover.indices)

    def in_nerve(self, t: Sequence[int]) -> bool:
        s = tuple(sorted(t))
        if len(set(s)) != len(s) or any(i not in self.cover.charts for i in s):
            return False
        return self._simplices is None or s in self._simplices

    def tuples(self, length: int) -> list[tuple[int, ...]]:
        """Strictly increasing nerve tuples with ``length`` entries."""
        if length < 1:
            return []
        if self._simplices is None:
            return list(combinations(self.cover.indices, length))
        return sorted(t for t in self._simplices if len(t) == length)

    @staticmethod
    def anchor(t: Sequence[int]) -> int:
        return min(t)

    def same_as(self, other: "CechSpace") -> bool:
        return self is other or (self.cover.same_as(other.cover) and self.nerve == other.nerve)

    def to_json(self) -> dict:
        out = cover_to_json(self.cover)
        if self.nerve is not None:
            out["nerve"] = [list(t) for t in self.nerve]
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "CechSpace":
        return cls(cover_from_json(obj), obj.get("nerve"))


class BundlePresentation:
    """A rank-``M`` bundle on a cover, given by transition matrices on nerve overlaps."""

    def __init__(
        self,
        cover: Cover,
        rank: int,
        transitions: Mapping[tuple[int, int], FuncMatrix],
        flag: bool = False,
        nerve: Iterable[Sequence[int]] | None = None,
    ):
        if rank < 1:
            raise InvalidBundle(f"rank must be positive, got {rank}")
        self.cover = cover
        self.rank = rank
        self.flag = bool(flag)
        self.space = CechSpace(cover, nerve)
        self.nerve = self.space.nerve
        self.transitions: dict[tuple[int, int], FuncMatrix] = {}
        for (i, j), m in sorted(transitions.items()):
            if not i < j:
                raise InvalidBundle(f"transition pair ({i}, {j}) must be increasing")
            if m.shape != (rank, rank):
                raise RankMismatch(f"transition ({i}, {j}) has shape {m.shape}, rank is {rank}")
            if m.ring != cover.ring(i):
                raise ChartMismatch(f"transition ({i}, {j}) is not written in chart {i} coordinates")
            if determinant(m).is_zero():
                raise SingularMatrix(f"transition ({i}, {j}) has vanishing determinant", pair=(i, j))
            if self.flag:
                _check_flag(m, f"transition ({i}, {j})")
            self.transitions[(i, j)] = m
        for pair in self.tuples(2):
            if pair not in self.transitions:
                raise InvalidBundle(f"no transition declared for overlap {list(pair)}")
        self._cache: dict = {}

    @property
    def field(self) -> Field:
        return self.cover.field

    def in_nerve(self, t: Sequence[int]) -> bool:
        return self.space.in_nerve(t)

    def tuples(self, length: int) -> list[tuple[int, ...]]:
        return self.space.tuples(length)

    def anchor(self, t: Sequence[int]) -> int:
        return min(t)

    def transition(self, i: int, j: int, coords: int | None = None) -> FuncMatrix:
        """``g_ij`` written in chart ``coords`` (default: the pair's anchor)."""
        anchor = min(i, j)
        if coords is None:
            coords = anchor
        key = ("g", i, j, coords)
        if key in self._cache:
            return self._cache[key]
        if i == j:
            m = FuncMatrix.identity(self.cover.ring(coords), self.rank)
        else:
            if not self.in_nerve((i, j)):
                raise PairNotInNerve(f"overlap ({i}, {j}) is not in the nerve", pair=(i, j))
            if i < j:
                m = self.transitions[(i, j)]
            else:
                m = self.transition(j, i, anchor).inverse()
            if coords != anchor:
                m = self.cover.pull_matrix(m, coords, anchor)
        self._cache[key] = m
        return m

    def maurer_cartan(self, i: int, j: int, coords: int | None = None) -> FormMatrix:
        """``g_ij^{-1} dg_ij`` in chart ``coords``."""
        if coords is None:
            coords = min(i, j)
        key = ("mc", i, j, coords)
        if key not in self._cache:
            self._cache[key] = maurer_cartan(self.transition(i, j, coords), self.transition(j, i, coords))
        return self._cache[key]

    def with_transitions(self, transitions, flag: bool | None = None) -> "BundlePresentation":
        return BundlePresentation(
            self.cover, self.rank, transitions, self.flag if flag is None else flag, self.nerve
        )

    def __repr__(self):
        return f"BundlePresentation(rank={self.rank}, charts={list(self.cover.indices)}, flag={self.flag})"


def _check_flag(m: FuncMatrix, what: str):
    if not m.is_upper_triangular():
        raise NotFlagPresented(f"{what} is not upper triangular")
    if any(e.is_zero() for e in m.diagonal_entries()):
        raise NotFlagPresented(f"{what} has a zero diagonal entry")


@dataclass
class CocycleFailure:
    triple: tuple[int, int, int]
    residual: FuncMatrix | None
    reason: str = "g_ij g_jk != g_ik"

    def to_json(self):
        return {
            "triple": list(self.triple),
            "reason": self.reason,
            "residual": self.residual.to_exprs() if self.residual is not None else None,
        }


@dataclass
class CocycleReport:
    checked: list[tuple[int, int, int]] = dc_field(default_factory=list)
    failures: list[CocycleFailure] = dc_field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.valid

    def to_json(self):
        return {
            "valid": self.valid,
            "checked": [list(t) for t in self.checked],
            "failures": [f.to_json() for f in self.failures],
        }


def validate_cocycle(bundle: BundlePresentation) -> CocycleReport:
    """Check ``g_ij g_jk = g_ik`` on every nerve triple, in chart-``i`` coordinates."""
    report = CocycleReport()
    for t in bundle.tuples(3):
        i, j, k = t
        report.checked.append(t)
        try:
            lhs = mat_mul(bundle.transition(i, j, i), bundle.transition(j, k, i))
            rhs = bundle.transition(i, k, i)
        except TCocycleError as exc:
            report.failures.append(CocycleFailure(t, None, str(exc)))
            continue
        if lhs != rhs:
            report.failures.append(CocycleFailure(t, lhs - rhs))
    return report


@dataclass(frozen=True, eq=False)
class GaugeTransformation:
    """Per-chart changes of frame ``h_i``; charts not listed get the identity."""

    matrices: Mapping[int, FuncMatrix]

    def __post_init__(self):
        for i, h in self.matrices.items():
            if h.rows != h.cols:
                raise DimensionMismatch(f"gauge matrix on chart {i} is not square")
            if determinant(h).is_zero():
                raise SingularMatrix(f"gauge matrix on chart {i} has vanishing determinant", chart=i)

    @property
    def flag_compatible(self) -> bool:
        return all(h.is_upper_triangular() for h in self.matrices.values())

    def matrix(self, bundle: BundlePresentation, i: int) -> FuncMatrix:
        h = self.matrices.get(i)
        if h is None:
            return FuncMatrix.identity(bundle.cover.ring(i), bundle.rank)
        if h.shape != (bundle.rank, bundle.rank):
            raise RankMismatch(f"gauge matrix on chart {i} has shape {h.shape}, rank is {bundle.rank}")
        if h.ring != bundle.cover.ring(i):
            raise ChartMismatch(f"gauge matrix on chart {i} is not written in chart {i} coordinates")
        return h

    def inverse(self) -> "GaugeTransformation":
        return GaugeTransformation({i: mat_inverse(h) for i, h in self.matrices.items()})

    @classmethod
    def identity(cls) -> "GaugeTransformation":
        return cls({})


def apply_gauge(bundle: BundlePresentation, h: GaugeTransformation) -> BundlePresentation:
    """The presentation with ``g~_ij = h_i^{-1} g_ij h_j``."""
    for i in h.matrices:
        if i not in bundle.cover.charts:
            raise InvalidBundle(f"gauge names unknown chart {i}")
        h.matrix(bundle, i)
    new = {}
    for (i, j), g in bundle.transitions.items():
        hi = h.matrix(bundle, i)
        hj = bundle.cover.pull_matrix(h.matrix(bundle, j), i, j)
        new[(i, j)] = mat_mul(mat_mul(mat_inverse(hi), g), hj)
    flag = bundle.flag and all(m.is_upper_triangular() for m in new.values())
    out = BundlePresentation(bundle.cover, bundle.rank, new, flag, bundle.nerve)
    if not validate_cocycle(out).valid and validate_cocycle(bundle).valid:
        raise CocycleCheckFailed("gauge transformation broke the cocycle condition")
    return out


# -- file format ------------------------------------------------------------------


def _parse_in(text, ring: PolyRing, where: str) -> RationalFunction:
    try:
        return parse_expression(str(text), ring.variables, ring.field)
    except ExpressionSyntaxError as exc:
        raise ExpressionSyntaxError(f"{where}: {exc.message}", exc.position, exc.text) from None
    except TCocycleError as exc:
        raise type(exc)(f"{where}: {exc}") from None


def _parse_matrix(rows, ring: PolyRing, where: str) -> FuncMatrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InvalidBundle(f"{where}: matrix must be a nonempty list of rows")
    return FuncMatrix(
        ring, [[_parse_in(e, ring, f"{where}[{a}][{b}]") for b, e in enumerate(r)] for a, r in enumerate(rows)]
    )


def cover_from_json(obj: Mapping) -> Cover:
    fld = Field.from_json(obj.get("field", "Q"))
    try:
        charts = [Chart(int(c["index"]), tuple(c["vars"])) for c in obj["charts"]]
    except (KeyError, TypeError) as exc:
        raise InvalidBundle(f"malformed chart list: {exc}") from None
    rings = {c.index: poly_ring(c.vars, fld) for c in charts}
    changes = []
    for n, ch in enumerate(obj.get("changes", [])):
        a, b = int(ch["from"]), int(ch["to"])
        if a not in rings or b not in rings:
            raise InvalidBundle(f"changes[{n}] mentions an undeclared chart")
        assignment = {v: _parse_in(e, rings[a], f"changes[{n}].map.{v}") for v, e in ch["map"].items()}
        changes.append(CoordinateChange(a, b, assignment, rings[a]))
    return Cover(charts, changes, fld)


def cover_to_json(cover: Cover) -> dict:
    return {
        "field": cover.field.to_json(),
        "charts": [{"index": c.index, "vars": list(c.vars)} for c in cover.charts.values()],
        "changes": [
            {"from": a, "to": b, "map": {v: to_expression(f) for v, f in ch.assignment.items()}}
            for (a, b), ch in sorted(cover.changes.items())
        ],
    }


def bundle_from_json(obj: Mapping) -> tuple[BundlePresentation, GaugeTransformation | None]:
    try:
        return _bundle_from_json(obj)
    except KeyError as exc:
        raise InvalidBundle(f"bundle description lacks field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise InvalidBundle(f"malformed bundle description: {exc}") from None


def _bundle_from_json(obj: Mapping) -> tuple[BundlePresentation, GaugeTransformation | None]:
    if not isinstance(obj, Mapping):
        raise InvalidBundle("bundle description must be a JSON object")
    for key in ("rank", "charts", "transitions"):
        if key not in obj:
            raise InvalidBundle(f"bundle description lacks {key!r}")
    cover = cover_from_json(obj)
    transitions = {}
    for n, tr in enumerate(obj["transitions"]):
        i, j = (int(x) for x in tr["pair"])
        if (i, j) in transitions:
            raise InvalidBundle(f"transition {[i, j]} declared twice")
        transitions[(i, j)] = _parse_matrix(tr["matrix"], cover.ring(i), f"transitions[{n}]")
    bundle = BundlePresentation(cover, int(obj["rank"]), transitions, bool(obj.get("flag", False)), obj.get("nerve"))
    gauge = None
    if obj.get("gauge") is not None:
        gauge = gauge_from_json(obj["gauge"], cover)
    return bundle, gauge


def gauge_from_json(entries, cover: Cover) -> GaugeTransformation:
    if isinstance(entries, Mapping):
        entries = entries.get("gauge", [])
    mats = {}
    for n, e in enumerate(entries):
        i = int(e["index"])
        mats[i] = _parse_matrix(e["matrix"], cover.ring(i), f"gauge[{n}]")
    return GaugeTransformation(mats)


def gauge_to_json(h: GaugeTransformation) -> list[dict]:
    return [{"index": i, "matrix": m.to_exprs()} for i, m in sorted(h.matrices.items())]


def bundle_to_json(bundle: BundlePresentation, gauge: GaugeTransformation | None = None) -> dict:
    out = cover_to_json(bundle.cover)
    out["rank"] = bundle.rank
    out["transitions"] = [{"pair": [i, j], "matrix": m.to_exprs()} for (i, j), m in sorted(bundle.transitions.items())]
    out["flag"] = bundle.flag
    if bundle.nerve is not None:
        out["nerve"] = [list(t) for t in bundle.nerve]
    if gauge is not None:
        out["gauge"] = gauge_to_json(gauge)
    return out


def load_bundle(path) -> tuple[BundlePresentation, GaugeTransformation | None]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidBundle(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return bundle_from_json(obj)


def dump_bundle(bundle: BundlePresentation, path, gauge: GaugeTransformation | None = None):
    Path(path).write_text(json.dumps(bundle_to_json(bundle, gauge), indent=2) + "\n", encoding="utf-8")
