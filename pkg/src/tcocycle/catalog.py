"""Standard example presentations and the residue pairing on the projective line."""
from __future__ import annotations

import ast
from typing import Mapping, Sequence

from .cech import CechCochain
from .errors import InvalidParameters, NotLaurent, WrongCover
from .field import QQ, Field, Scalar
from .geometry import BundlePresentation, Chart, CoordinateChange, Cover, validate_cocycle
from .matform import FuncMatrix
from .ratfunc import RationalFunction, laurent_coefficient, parse_expression, poly_ring


def cp1_cover(field: Field = QQ) -> Cover:
    """Charts ``0: z`` and ``1: w`` glued by ``w = 1/z``."""
    rz, rw = poly_ring(("z",), field), poly_ring(("w",), field)
    changes = [
        CoordinateChange(0, 1, {"w": rz.var("z").inverse()}),
        CoordinateChange(1, 0, {"z": rw.var("w").inverse()}),
    ]
    return Cover([Chart(0, ("z",)), Chart(1, ("w",))], changes, field)


def o_d_cp1(d: int, field: Field = QQ) -> BundlePresentation:
    """The line bundle with ``g_01 = z^d`` on the two-chart cover of the projective line."""
    if not isinstance(d, int):
        raise InvalidParameters(f"degree must be an integer, got {d!r}")
    cover = cp1_cover(field)
    z = cover.ring(0).var("z")
    return BundlePresentation(cover, 1, {(0, 1): FuncMatrix(cover.ring(0), [[z**d]])}, flag=True)


def cpn_var(i: int, j: int) -> str:
    """Affine coordinate ``x_j / x_i`` on chart ``i``."""
    return f"z{i}_{j}"


def cpn_cover(n: int, field: Field = QQ) -> Cover:
    if not isinstance(n, int) or n < 1:
        raise InvalidParameters(f"projective dimension must be a positive integer, got {n!r}")
    charts = [Chart(i, tuple(cpn_var(i, j) for j in range(n + 1) if j != i)) for i in range(n + 1)]
    rings = {c.index: poly_ring(c.vars, field) for c in charts}
    changes = []
    for a in range(n + 1):
        ra = rings[a]
        for b in range(n + 1):
            if a == b:
                continue
            xb = ra.var(cpn_var(a, b))  # x_b / x_a
            assignment = {}
            for j in range(n + 1):
                if j == b:
                    continue
                # x_j / x_b = (x_j / x_a) / (x_b / x_a), and x_a / x_a = 1
                num = ra.one() if j == a else ra.var(cpn_var(a, j))
                assignment[cpn_var(b, j)] = num / xb
            changes.append(CoordinateChange(a, b, assignment))
    return Cover(charts, changes, field)


def o_d_cpn(n: int, d: int, field: Field = QQ) -> BundlePresentation:
    """``g_ij = (x_j / x_i)^d`` on the standard ``n+1``-chart cover."""
    if not isinstance(d, int):
        raise InvalidParameters(f"degree must be an integer, got {d!r}")
    cover = cpn_cover(n, field)
    trans = {}
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            r = cover.ring(i)
            trans[(i, j)] = FuncMatrix(r, [[r.var(cpn_var(i, j)) ** d]])
    return BundlePresentation(cover, 1, trans, flag=True)


def direct_sum(bundles: Sequence[BundlePresentation]) -> BundlePresentation:
    """Block-diagonal transitions."""
    bundles = list(bundles)
    if not bundles:
        raise InvalidParameters("direct sum of nothing")
    first = bundles[0]
    for b in bundles[1:]:
        if not b.space.same_as(first.space):
            raise InvalidParameters("summands live on different covers")
    rank = sum(b.rank for b in bundles)
    trans = {}
    for pair in first.transitions:
        ring = first.cover.ring(pair[0])
        rows = [[ring.zero()] * rank for _ in range(rank)]
        off = 0
        for b in bundles:
            m = b.transitions[pair]
            for r in range(b.rank):
                for c in range(b.rank):
                    rows[off + r][off + c] = m.entries[r][c]
            off += b.rank
        trans[pair] = FuncMatrix(ring, rows)
    return BundlePresentation(first.cover, rank, trans, all(b.flag for b in bundles), first.nerve)


def triangular_extension(
    diag: Sequence[BundlePresentation], offdiag: Mapping[tuple[int, int], Mapping[tuple[int, int], object]]
) -> BundlePresentation:
    """Upper-triangular presentation with line bundles ``diag`` on the diagonal.

    ``offdiag[(r, c)][(i, j)]`` (``r < c``, ``i < j``) is the ``(r, c)`` entry of
    ``g_ij``, an expression string or a function in chart-``i`` coordinates.
    The result must satisfy the cocycle condition.
    """
    base = direct_sum(diag)
    if any(b.rank != 1 for b in diag):
        raise InvalidParameters("diagonal blocks must be line bundles")
    rows_by_pair = {pair: [list(r) for r in m.entries] for pair, m in base.transitions.items()}
    for (r, c), per_pair in offdiag.items():
        if not 0 <= r < c < base.rank:
            raise InvalidParameters(f"off-diagonal position {(r, c)} is not strictly upper")
        for pair, e in per_pair.items():
            pair = tuple(pair)
            if pair not in rows_by_pair:
                raise InvalidParameters(f"no transition on overlap {list(pair)}")
            ring = base.cover.ring(pair[0])
            if not isinstance(e, RationalFunction):
                e = parse_expression(str(e), ring.variables, ring.field)
            rows_by_pair[pair][r][c] = e
    trans = {pair: FuncMatrix(base.cover.ring(pair[0]), rows) for pair, rows in rows_by_pair.items()}
    out = BundlePresentation(base.cover, base.rank, trans, True, base.nerve)
    report = validate_cocycle(out)
    if not report.valid:
        raise InvalidParameters(
            f"off-diagonal data break the cocycle condition on {[list(f.triple) for f in report.failures]}"
        )
    return out


def trivial(n_charts: int = 2, rank: int = 1, field: Field = QQ) -> BundlePresentation:
    if n_charts == 2:
        cover = cp1_cover(field)
    else:
        cover = cpn_cover(n_charts - 1, field)
    trans = {
        (i, j): FuncMatrix.identity(cover.ring(i), rank)
        for i in cover.indices
        for j in cover.indices
        if i < j
    }
    return BundlePresentation(cover, rank, trans, True)


CATALOG = {
    "o_d_cp1": o_d_cp1,
    "o_d_cpn": o_d_cpn,
    "direct_sum": direct_sum,
    "triangular_extension": triangular_extension,
    "trivial": trivial,
}


def example(name: str, *args, **kwargs) -> BundlePresentation:
    if name not in CATALOG:
        raise InvalidParameters(f"unknown example {name!r}; known: {sorted(CATALOG)}")
    try:
        bundle = CATALOG[name](*args, **kwargs)
    except TypeError as exc:
        raise InvalidParameters(f"{name}: {exc}") from None
    if not validate_cocycle(bundle).valid:
        raise InvalidParameters(f"{name} produced an invalid cocycle")
    return bundle


def _eval_node(node, field: Field):
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in CATALOG:
            raise InvalidParameters(f"unknown example constructor in {ast.unparse(node)!r}")
        args = [_eval_node(a, field) for a in node.args]
        kwargs = {kw.arg: _eval_node(kw.value, field) for kw in node.keywords}
        if node.func.id in ("o_d_cp1", "o_d_cpn", "trivial"):
            kwargs.setdefault("field", field)
        return example(node.func.id, *args, **kwargs)
    if isinstance(node, (ast.List, ast.Tuple)):
        vals = [_eval_node(e, field) for e in node.elts]
        return vals if isinstance(node, ast.List) else tuple(vals)
    if isinstance(node, ast.Dict):
        return {_eval_node(k, field): _eval_node(v, field) for k, v in zip(node.keys, node.values)}
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        val = _eval_node(node.operand, field)
        if isinstance(val, int):
            return -val
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, str)):
        return node.value
    raise InvalidParameters(f"unsupported example syntax {ast.unparse(node)!r}")


def example_from_string(text: str, field: Field = QQ) -> BundlePresentation:
    """Build an example from a call expression such as ``direct_sum([o_d_cp1(2), o_d_cp1(3)])``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise InvalidParameters(f"cannot parse example {text!r}: {exc.msg}") from None
    out = _eval_node(tree.body, field)
    if not isinstance(out, BundlePresentation):
        raise InvalidParameters(f"{text!r} does not describe a bundle")
    return out


# -- residue pairing -------------------------------------------------------------------


def is_cp1_cover(cover: Cover) -> bool:
    if cover.indices != (0, 1):
        return False
    if len(cover.charts[0].vars) != 1 or len(cover.charts[1].vars) != 1:
        return False
    z, w = cover.charts[0].vars[0], cover.charts[1].vars[0]
    ok = False
    if (0, 1) in cover.changes:
        if cover.changes[(0, 1)].assignment[w] != cover.ring(0).var(z).inverse():
            return False
        ok = True
    if (1, 0) in cover.changes:
        if cover.changes[(1, 0)].assignment[z] != cover.ring(1).var(w).inverse():
            return False
        ok = True
    return ok


def cp1_degree(result) -> Scalar:
    """Coefficient of ``z^-1 dz`` in the ``(0, 1)`` component of a degree-1 cochain."""
    cochain: CechCochain = getattr(result, "cochain", result)
    if cochain.degree != 1:
        raise WrongCover(f"pairing needs a degree-1 cochain, got degree {cochain.degree}")
    cover = cochain.space.cover
    if not is_cp1_cover(cover):
        raise WrongCover("pairing is defined on the two-chart cover {0: z, 1: w = 1/z} only")
    z = cover.charts[0].vars[0]
    w = cochain.components.get((0, 1))
    if w is None:
        return cover.field.zero()
    coeff = w.coefficient([z])
    if set(w.components) - {(0,)}:
        raise NotLaurent("component is not a 1-form in dz")
    return laurent_coefficient(coeff, z, -1)
