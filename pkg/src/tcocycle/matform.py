"""Matrices over rational functions and over differential forms."""
from __future__ import annotations

from typing import Sequence

from .errors import ChartMismatch, DimensionMismatch, InvalidParameters, NotSquare, SingularMatrix
from .field import QQ, Field
from .forms import DifferentialForm, exterior_derivative, pullback, wedge
from .ratfunc import PolyRing, RationalFunction, parse_expression, poly_ring, substitute, to_expression


class FuncMatrix:
    """Rectangular matrix of rational functions sharing one ring."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring: PolyRing, entries: Sequence[Sequence[RationalFunction]]):
        rows = tuple(tuple(r) for r in entries)
        if not rows or not rows[0]:
            raise DimensionMismatch("empty matrix")
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise DimensionMismatch("ragged matrix")
            for e in r:
                if e.ring != ring:
                    raise ChartMismatch(f"entry over {e.ring.variables}, matrix over {ring.variables}")
        self.ring = ring
        self.entries = rows

    @classmethod
    def identity(cls, ring: PolyRing, n: int) -> "FuncMatrix":
        one, zero = ring.one(), ring.zero()
        return cls(ring, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, ring: PolyRing, diag: Sequence[RationalFunction]) -> "FuncMatrix":
        n = len(diag)
        zero = ring.zero()
        return cls(ring, [[diag[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def from_exprs(cls, rows: Sequence[Sequence[str]], variables, field: Field = QQ) -> "FuncMatrix":
        ring = poly_ring(tuple(variables), field)
        return cls(ring, [[parse_expression(str(e), ring.variables, field) for e in r] for r in rows])

    def to_exprs(self) -> list[list[str]]:
        return [[to_expression(e) for e in r] for r in self.entries]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, FuncMatrix):
            return NotImplemented
        return self.ring == other.ring and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"FuncMatrix({self.to_exprs()})"

    def __add__(self, other: "FuncMatrix") -> "FuncMatrix":
        _same_shape(self, other)
        return FuncMatrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "FuncMatrix") -> "FuncMatrix":
        _same_shape(self, other)
        return FuncMatrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return FuncMatrix(self.ring, [[-a for a in r] for r in self.entries])

    def __matmul__(self, other):
        return mat_mul(self, other)

    def scale(self, f) -> "FuncMatrix":
        return FuncMatrix(self.ring, [[a * f for a in r] for r in self.entries])

    def is_identity(self) -> bool:
        return all(
            (e.is_one() if i == j else e.is_zero())
            for i, r in enumerate(self.entries)
            for j, e in enumerate(r)
        )

    def is_upper_triangular(self) -> bool:
        return all(self.entries[i][j].is_zero() for i in range(self.rows) for j in range(min(i, self.cols)))

    def diagonal_entries(self) -> list[RationalFunction]:
        return [self.entries[i][i] for i in range(min(self.shape))]

    def substitute(self, assignment) -> "FuncMatrix":
        """Compose every entry with a coordinate change."""
        images = list(assignment.values())
        target = images[0].ring if images else self.ring
        return FuncMatrix(target, [[substitute(e, assignment) for e in r] for r in self.entries])

    def inverse(self) -> "FuncMatrix":
        return mat_inverse(self)

    def determinant(self) -> RationalFunction:
        return determinant(self)

    def d(self) -> "FormMatrix":
        return mat_d(self)


class FormMatrix:
    """Rectangular matrix of differential forms; ``degree`` is the common entry degree
    (``None`` when every entry is zero)."""

    __slots__ = ("ring", "entries", "degree")

    def __init__(self, ring: PolyRing, entries: Sequence[Sequence[DifferentialForm]]):
        rows = tuple(tuple(r) for r in entries)
        if not rows or not rows[0]:
            raise DimensionMismatch("empty matrix")
        width = len(rows[0])
        degree = None
        for r in rows:
            if len(r) != width:
                raise DimensionMismatch("ragged matrix")
            for e in r:
                if e.ring != ring:
                    raise ChartMismatch(f"entry over {e.ring.variables}, matrix over {ring.variables}")
                for deg in e.degrees():
                    if degree is None:
                        degree = deg
                    elif deg != degree:
                        raise InvalidParameters("form matrix entries must share one degree")
        self.ring = ring
        self.entries = rows
        self.degree = degree

    @classmethod
    def _raw(cls, ring, rows, degree):
        obj = object.__new__(cls)
        obj.ring, obj.entries, obj.degree = ring, rows, degree
        return obj

    @classmethod
    def from_funcs(cls, m: FuncMatrix) -> "FormMatrix":
        return cls._raw(m.ring, tuple(tuple(DifferentialForm.function(e) for e in r) for r in m.entries), 0)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, FormMatrix):
            return NotImplemented
        return self.ring == other.ring and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"FormMatrix({[[str(e) for e in r] for r in self.entries]})"

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.entries for e in r)

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        _same_shape(self, other)
        return FormMatrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        _same_shape(self, other)
        return FormMatrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return FormMatrix._raw(self.ring, tuple(tuple(-a for a in r) for r in self.entries), self.degree)

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __rmatmul__(self, other):
        return mat_mul(other, self)

    def pullback(self, change) -> "FormMatrix":
        rows = [[pullback(e, change) for e in r] for r in self.entries]
        target = rows[0][0].ring
        return FormMatrix(target, rows)


def _same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    if a.ring != b.ring:
        raise ChartMismatch(f"{a.ring.variables} vs {b.ring.variables}")


def _as_forms(m) -> FormMatrix:
    return FormMatrix.from_funcs(m) if isinstance(m, FuncMatrix) else m


def mat_mul(a, b):
    """Matrix product; form entries multiply by wedge, function entries by multiplication."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.shape} @ {b.shape}")
    if a.ring != b.ring:
        raise ChartMismatch(f"{a.ring.variables} vs {b.ring.variables}")
    n, m, p = a.rows, a.cols, b.cols
    if isinstance(a, FuncMatrix) and isinstance(b, FuncMatrix):
        zero = a.ring.zero()
        out = []
        for i in range(n):
            row = []
            for j in range(p):
                acc = zero
                for k in range(m):
                    x, y = a.entries[i][k], b.entries[k][j]
                    if x.is_zero() or y.is_zero():
                        continue
                    acc = acc + x * y
                row.append(acc)
            out.append(row)
        return FuncMatrix(a.ring, out)
    if isinstance(a, FuncMatrix):
        out = []
        for i in range(n):
            row = []
            for j in range(p):
                acc = DifferentialForm.zero(a.ring)
                for k in range(m):
                    f, w = a.entries[i][k], b.entries[k][j]
                    if not f.is_zero() and w.components:
                        acc = acc + w.scale(f)
                row.append(acc)
            out.append(tuple(row))
        return FormMatrix._raw(a.ring, tuple(out), b.degree)
    if isinstance(b, FuncMatrix):
        out = []
        for i in range(n):
            row = []
            for j in range(p):
                acc = DifferentialForm.zero(a.ring)
                for k in range(m):
                    w, f = a.entries[i][k], b.entries[k][j]
                    if not f.is_zero() and w.components:
                        acc = acc + w.scale(f)
                row.append(acc)
            out.append(tuple(row))
        return FormMatrix._raw(a.ring, tuple(out), a.degree)
    degree = None if a.degree is None or b.degree is None else a.degree + b.degree
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = DifferentialForm.zero(a.ring)
            for k in range(m):
                x, y = a.entries[i][k], b.entries[k][j]
                if x.components and y.components:
                    acc = acc + wedge(x, y)
            row.append(acc)
        out.append(tuple(row))
    return FormMatrix._raw(a.ring, tuple(out), degree)


def trace(a):
    """Sum of the diagonal: a rational function or a differential form."""
    if a.rows != a.cols:
        raise NotSquare(f"shape {a.shape}")
    if isinstance(a, FuncMatrix):
        acc = a.ring.zero()
        for i in range(a.rows):
            acc = acc + a.entries[i][i]
        return acc
    acc = DifferentialForm.zero(a.ring)
    for i in range(a.rows):
        acc = acc + a.entries[i][i]
    return acc


def trace_of_product(a: FormMatrix, b: FormMatrix) -> DifferentialForm:
    """``trace(a @ b)`` without forming the off-diagonal entries."""
    if a.cols != b.rows or a.rows != b.cols:
        raise DimensionMismatch(f"{a.shape} @ {b.shape}")
    acc = DifferentialForm.zero(a.ring)
    for i in range(a.rows):
        for k in range(a.cols):
            x, y = a.entries[i][k], b.entries[k][i]
            if x.components and y.components:
                acc = acc + wedge(x, y)
    return acc


def _minor_det(entries, rows: tuple[int, ...], cols: tuple[int, ...], zero, memo) -> RationalFunction:
    """Laplace expansion along the first listed row, memoised on (rows, cols)."""
    key = (rows, cols)
    if key in memo:
        return memo[key]
    if not rows:
        return zero + 1
    r, rest = rows[0], rows[1:]
    acc = zero
    for pos, c in enumerate(cols):
        e = entries[r][c]
        if e.is_zero():
            continue
        sub = _minor_det(entries, rest, cols[:pos] + cols[pos + 1 :], zero, memo)
        if sub.is_zero():
            continue
        term = e * sub
        acc = acc - term if pos & 1 else acc + term
    memo[key] = acc
    return acc


def determinant(a: FuncMatrix) -> RationalFunction:
    if a.rows != a.cols:
        raise NotSquare(f"shape {a.shape}")
    n = a.rows
    return _minor_det(a.entries, tuple(range(n)), tuple(range(n)), a.ring.zero(), {})


def mat_inverse(a: FuncMatrix) -> FuncMatrix:
    """Exact inverse as adjugate over determinant."""
    if a.rows != a.cols:
        raise NotSquare(f"shape {a.shape}")
    n = a.rows
    zero = a.ring.zero()
    memo: dict = {}
    full = tuple(range(n))
    det = _minor_det(a.entries, full, full, zero, memo)
    if det.is_zero():
        raise SingularMatrix("determinant vanishes identically")
    inv_det = det.inverse()
    out = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            # (adj a)_{ji} = (-1)^{i+j} det(a without row i, column j)
            minor = _minor_det(a.entries, full[:i] + full[i + 1 :], full[:j] + full[j + 1 :], zero, memo)
            if minor.is_zero():
                continue
            c = minor * inv_det
            out[j][i] = -c if (i + j) & 1 else c
    return FuncMatrix(a.ring, out)


def mat_d(a: FuncMatrix) -> FormMatrix:
    """Entrywise exterior derivative."""
    rows = tuple(tuple(exterior_derivative(DifferentialForm.function(e)) for e in r) for r in a.entries)
    return FormMatrix._raw(a.ring, rows, 1)


def maurer_cartan(g: FuncMatrix, g_inv: FuncMatrix | None = None) -> FormMatrix:
    """The matrix of 1-forms ``g^{-1} dg``."""
    if g_inv is None:
        g_inv = mat_inverse(g)
    return mat_mul(g_inv, mat_d(g))
