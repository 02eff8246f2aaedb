"""T-invariant cocycles, their refined variants, and the gauge-change witness.

All components on a tuple ``i1 < .. < i(k+1)`` are computed in chart-``i1``
coordinates. Positions inside a tuple are 0-based here.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import permutations
from typing import Sequence

from .cech import CechCochain, coboundary, is_cocycle
from .errors import (
    CharDividesFactorial,
    CocycleCheckFailed,
    DClosedCheckFailed,
    InvalidParameters,
    NotFlagPresented,
    NotRankOne,
    PairNotInNerve,
    WitnessVerificationFailed,
)
from .field import Field, factorial_inverse
from .forms import DifferentialForm, exterior_derivative, form_to_records, wedge
from .geometry import BundlePresentation, GaugeTransformation, apply_gauge, validate_cocycle
from .matform import FormMatrix, FuncMatrix, mat_d, mat_mul, trace, trace_of_product


def normalization_tag(k: int) -> str:
    return f"1/({k}!·(2π√−1)^{k})"


def perm_sign(p: Sequence[int]) -> int:
    sign = 1
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                sign = -sign
    return sign


def check_degree_allowed(field: Field, k: int):
    """The cocycle theorem over a field of characteristic p needs p not dividing (k+2)!."""
    p = field.characteristic
    if p and p <= k + 2:
        raise CharDividesFactorial(f"characteristic {p} divides ({k}+2)! = {_fact(k + 2)}", k=k, p=p)


def _fact(n: int) -> int:
    out = 1
    for m in range(2, n + 1):
        out *= m
    return out


def _check_tuple(bundle: BundlePresentation, t: Sequence[int]) -> tuple[int, ...]:
    t = tuple(t)
    if any(b <= a for a, b in zip(t, t[1:])):
        raise InvalidParameters(f"tuple {list(t)} is not strictly increasing")
    if not bundle.in_nerve(t):
        raise PairNotInNerve(f"tuple {list(t)} is not in the nerve")
    return t


def _mc_table(bundle: BundlePresentation, t: tuple[int, ...]) -> list[list[FormMatrix | None]]:
    """``A[p][q] = g^{-1} dg`` for the pair of positions ``(p, q)``, in anchor coordinates."""
    a = t[0]
    n = len(t)
    return [[None if p == q else bundle.maurer_cartan(t[p], t[q], a) for q in range(n)] for p in range(n)]


def _trace_chain(factors: list[FormMatrix], prefix_cache: dict, key: tuple) -> DifferentialForm:
    """``tr(F_1 ... F_k)``; products of leading factors are cached under ``key`` prefixes."""
    if len(factors) == 1:
        return trace(factors[0])
    prefix_key = key[:-1]
    prefix = prefix_cache.get(prefix_key)
    if prefix is None:
        prefix = factors[0]
        for f in factors[1:-1]:
            prefix = mat_mul(prefix, f)
        prefix_cache[prefix_key] = prefix
    return trace_of_product(prefix, factors[-1])


def t_component_unnormalized(bundle: BundlePresentation, t: Sequence[int]) -> DifferentialForm:
    """``(k+1)!`` times the T-invariant component: the bare signed permutation sum."""
    t = _check_tuple(bundle, t)
    k = len(t) - 1
    ring = bundle.cover.ring(t[0])
    if k == 0:
        return DifferentialForm.function(ring.const(bundle.rank))
    A = _mc_table(bundle, t)
    total = DifferentialForm.zero(ring)
    cache: dict = {}
    for sigma in permutations(range(k + 1)):
        last = sigma[k]
        factors = [A[sigma[l]][last] for l in range(k)]
        term = _trace_chain(factors, cache, sigma)
        if term.components:
            total = total - term if perm_sign(sigma) < 0 else total + term
    return total


def t_component(bundle: BundlePresentation, t: Sequence[int]) -> DifferentialForm:
    """``sum over sigma in S_{k+1} of sgn(sigma)/(k+1)! tr prod_l g^{-1}_{s(l) s(k+1)} dg_{s(l) s(k+1)}``."""
    k = len(t) - 1
    c = factorial_inverse(k + 1, bundle.field)
    return t_component_unnormalized(bundle, t).scale(c)


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self):
        out = {"check": self.name, "ok": self.ok}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class TInvariantResult:
    cochain: CechCochain
    k: int
    refined: bool = False
    dclosed_report: dict = dc_field(default_factory=dict)
    normalization_tag: str = ""
    checks: list[Check] = dc_field(default_factory=list)

    @property
    def all_dclosed(self) -> bool:
        return all(self.dclosed_report.values())

    def to_json(self, include_cover: bool = True) -> dict:
        out = self.cochain.to_json(include_cover)
        out["k"] = self.k
        out["refined"] = self.refined
        out["normalization_tag"] = self.normalization_tag
        out["dclosed"] = [{"tuple": list(t), "closed": ok} for t, ok in sorted(self.dclosed_report.items())]
        out["verification"] = [c.to_json() for c in self.checks]
        return out


def _dclosed(cochain: CechCochain) -> dict:
    return {t: not exterior_derivative(w).components for t, w in cochain.components.items()}


def _require_valid(bundle: BundlePresentation):
    report = validate_cocycle(bundle)
    if not report.valid:
        bad = ", ".join(str(list(f.triple)) for f in report.failures)
        err = CocycleCheckFailed(f"transition data violate g_ij g_jk = g_ik on {bad}", report=report)
        err.exit_status = 1
        raise err


def t_invariant(bundle: BundlePresentation, k: int, verify: bool = True) -> TInvariantResult:
    """Assemble the degree-``k`` cochain over all nerve tuples and certify it is a cocycle."""
    if k < 1:
        raise InvalidParameters("t_invariant needs k >= 1; degree 0 is the constant 1 by convention")
    check_degree_allowed(bundle.field, k)
    if verify:
        _require_valid(bundle)
    comps = {t: t_component(bundle, t) for t in bundle.tuples(k + 1)}
    cochain = CechCochain(bundle.space, k, k, comps)
    checks = []
    if verify:
        report = is_cocycle(cochain)
        if not report.ok:
            raise CocycleCheckFailed(
                f"coboundary nonzero on {sorted(report.residuals)}", residuals=report.residuals
            )
        checks.append(Check("cocycle", True))
    return TInvariantResult(cochain, k, False, _dclosed(cochain), normalization_tag(k), checks)


def refined_first(bundle: BundlePresentation, verify: bool = True) -> TInvariantResult:
    """Components ``tr(g_ij^{-1} dg_ij)``; each is certified d-closed."""
    check_degree_allowed(bundle.field, 1)
    if verify:
        _require_valid(bundle)
    comps = {}
    for t in bundle.tuples(2):
        i, j = t
        comps[t] = trace(bundle.maurer_cartan(i, j, i))
    cochain = CechCochain(bundle.space, 1, 1, comps)
    dclosed = _dclosed(cochain)
    bad = [t for t, ok in dclosed.items() if not ok]
    if bad:
        raise DClosedCheckFailed(f"d tr(g^-1 dg) nonzero on {bad}")
    checks = [Check("dclosed", True)]
    if verify:
        if not is_cocycle(cochain):
            raise CocycleCheckFailed("refined first invariant is not a cocycle")
        checks.append(Check("cocycle", True))
        agree = all(t_component(bundle, t) == w for t, w in cochain.components.items()) and all(
            t_component(bundle, t).is_zero() for t in bundle.tuples(2) if t not in cochain.components
        )
        if not agree:
            raise CocycleCheckFailed("tr(g^-1 dg) disagrees with the permutation sum at k = 1")
        checks.append(Check("matches_permutation_sum", True))
    return TInvariantResult(cochain, 1, True, dclosed, normalization_tag(1), checks)


def flag_refined(bundle: BundlePresentation, k: int, verify: bool = True) -> TInvariantResult:
    """The T-invariant of a flag-presented bundle with a d-closedness certificate per component."""
    if not bundle.flag:
        raise NotFlagPresented("refined invariants in degree k >= 2 need an upper-triangular presentation")
    res = t_invariant(bundle, k, verify)
    bad = [t for t, ok in res.dclosed_report.items() if not ok]
    if bad:
        raise DClosedCheckFailed(f"flag-refined components not d-closed on {bad}")
    res.refined = True
    res.checks.append(Check("dclosed", True))
    return res


def line_fast_component(bundle: BundlePresentation, t: Sequence[int]) -> DifferentialForm:
    """``dlog g_{i1 i2} ^ dlog g_{i2 i3} ^ .. ^ dlog g_{ik i(k+1)}`` for a line bundle."""
    if bundle.rank != 1:
        raise NotRankOne(f"rank is {bundle.rank}")
    t = _check_tuple(bundle, t)
    a = t[0]
    ring = bundle.cover.ring(a)
    if len(t) == 1:
        return DifferentialForm.function(ring.one())
    out = None
    for p in range(len(t) - 1):
        dlog = bundle.maurer_cartan(t[p], t[p + 1], a).entries[0][0]
        out = dlog if out is None else wedge(out, dlog)
    return out


def flag_decompose(bundle: BundlePresentation) -> list[BundlePresentation]:
    """The rank-1 presentations given by the diagonal entries of a triangular cocycle."""
    if not bundle.flag:
        raise NotFlagPresented("bundle is not flag-presented")
    out = []
    for j in range(bundle.rank):
        trans = {pair: FuncMatrix(m.ring, [[m.entries[j][j]]]) for pair, m in bundle.transitions.items()}
        out.append(BundlePresentation(bundle.cover, 1, trans, True, bundle.nerve))
    return out


# -- gauge witness -------------------------------------------------------------------


@dataclass
class WitnessResult:
    witness: CechCochain
    verified: bool
    difference: CechCochain
    k: int

    def to_json(self, include_cover: bool = True) -> dict:
        out = self.witness.to_json(include_cover)
        out["k"] = self.k
        out["verified"] = self.verified
        out["difference"] = self.difference.to_json(False)
        return out


class _WitnessTables:
    """Per-tuple building blocks in anchor coordinates, indexed by tuple position."""

    def __init__(self, bundle: BundlePresentation, h: GaugeTransformation, t: tuple[int, ...]):
        a = t[0]
        n = len(t)
        cover = bundle.cover
        self.A = _mc_table(bundle, t)
        K = []
        for p in range(n):
            hp = cover.pull_matrix(h.matrix(bundle, t[p]), a, t[p])
            hp_inv = hp.inverse()
            K.append(mat_mul(hp, mat_d(hp_inv)))
        self.K = K
        g = [[bundle.transition(t[p], t[q], a) for q in range(n)] for p in range(n)]
        dg = [[mat_d(g[p][q]) if p != q else None for q in range(n)] for p in range(n)]
        # g_pq^{-1} K_p g_pq, with g_pp = I
        self.conj = [
            [K[p] if p == q else mat_mul(mat_mul(g[q][p], K[p]), g[p][q]) for q in range(n)] for p in range(n)
        ]
        # -g_pq d(g_pq^{-1}) = -g_pq dg_qp
        self.negN = [[None if p == q else -mat_mul(g[p][q], dg[q][p]) for q in range(n)] for p in range(n)]
        self.negK = [-Kp for Kp in K]


def _subsets(items: Sequence[int]):
    items = list(items)
    for mask in range(1 << len(items)):
        yield [items[b] for b in range(len(items)) if mask >> b & 1]


def _trace_product(factors: list[FormMatrix]) -> DifferentialForm:
    if len(factors) == 1:
        return trace(factors[0])
    prefix = factors[0]
    for f in factors[1:-1]:
        prefix = mat_mul(prefix, f)
    return trace_of_product(prefix, factors[-1])


def witness_component(bundle: BundlePresentation, h: GaugeTransformation, J: Sequence[int]) -> DifferentialForm:
    """The component of the witness cochain on the ``k``-tuple ``J``.

    Built from a ``(k+1)``-slot template whose last slot is a placeholder; the
    placeholder is never looked up, so the result depends on ``J`` alone.
    """
    J = _check_tuple(bundle, J)
    k = len(J)
    ring = bundle.cover.ring(J[0])
    T = _WitnessTables(bundle, h, J)
    phantom = k
    total = DifferentialForm.zero(ring)
    for sigma in permutations(range(k + 1)):
        sign = perm_sign(sigma)
        pos = sigma.index(phantom)
        acc = DifferentialForm.zero(ring)
        if pos == k:
            # placeholder in the last slot: Delta_(U; empty) over nonempty U
            for U in _subsets(range(k)):
                if not U:
                    continue
                b = sigma[U[0]]
                Us = set(U)
                factors = [T.conj[sigma[l]][b] if l in Us else T.A[sigma[l]][b] for l in range(k)]
                acc = acc + _trace_product(factors)
        else:
            v = pos
            c = sigma[k]
            rest = [l for l in range(k) if l != v]
            for U in _subsets(rest):
                Us = set(U)
                # Delta_{U, v}: every factor pairs with the last slot
                factors = []
                for l in range(k):
                    if l == v:
                        factors.append(T.negK[c])
                    elif l in Us:
                        factors.append(T.conj[sigma[l]][c])
                    else:
                        factors.append(T.A[sigma[l]][c])
                acc = acc + _trace_product(factors)
                if U:
                    # Delta_(U; v): factors pair with slot min(U)
                    b = sigma[U[0]]
                    factors = []
                    for l in range(k):
                        if l == v:
                            factors.append(T.negN[b][c])
                        elif l in Us:
                            factors.append(T.conj[sigma[l]][b])
                        else:
                            factors.append(T.A[sigma[l]][b])
                    acc = acc + _trace_product(factors)
        if acc.components:
            total = total - acc if sign < 0 else total + acc
    c = factorial_inverse(k + 1, bundle.field)
    if k & 1:
        c = -c
    return total.scale(c)


def gauge_witness(bundle: BundlePresentation, h: GaugeTransformation, k: int) -> WitnessResult:
    """A ``(k-1)``-cochain ``s`` with ``ds = f_k(h.g) - f_k(g)``, verified before return."""
    if k < 1:
        raise InvalidParameters("the witness exists for k >= 1")
    check_degree_allowed(bundle.field, k)
    gauged = apply_gauge(bundle, h)
    comps = {J: witness_component(bundle, h, J) for J in bundle.tuples(k)}
    witness = CechCochain(bundle.space, k - 1, k, comps)
    difference = t_invariant(gauged, k).cochain - t_invariant(bundle, k).cochain
    ds = coboundary(witness)
    if ds != difference:
        residual = ds - difference
        raise WitnessVerificationFailed(
            f"coboundary of the witness misses the invariant difference on {sorted(residual.components)}",
            residual={list(t).__repr__(): form_to_records(w) for t, w in residual.components.items()},
        )
    return WitnessResult(witness, True, difference, k)


# -- formal Chern character --------------------------------------------------------


@dataclass
class ChernTerm:
    k: int
    tag: str
    coefficient: object
    cochain: CechCochain
    result: TInvariantResult | None = None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "tag": self.tag,
            "coefficient": str(getattr(self.coefficient, "value", self.coefficient)),
            "cochain": self.cochain.to_json(False),
        }


def chern_character_formal(
    bundle: BundlePresentation, k_max: int, rank_degree_zero: bool = False
) -> list[ChernTerm]:
    """``sum_k f_k / (k! (2 pi i)^k)`` as a graded list; the powers of ``2 pi i`` stay symbolic.

    Degree 0 is the constant 1 (or the rank with ``rank_degree_zero``). A degree
    the field cannot normalise is an error only when its cochain is nonzero.
    """
    if k_max < 0:
        raise InvalidParameters("k_max must be nonnegative")
    F = bundle.field
    c0 = bundle.rank if rank_degree_zero else 1
    out = [ChernTerm(0, "1", F.one(), CechCochain.constant(bundle.space, c0))]
    for k in range(1, k_max + 1):
        tag = f"(2π√−1)^-{k}"
        try:
            check_degree_allowed(F, k)
            coeff = factorial_inverse(k, F)
        except CharDividesFactorial:
            raw = {t: t_component_unnormalized(bundle, t) for t in bundle.tuples(k + 1)}
            if any(w.components for w in raw.values()):
                raise
            out.append(ChernTerm(k, tag, F.zero(), CechCochain.zero(bundle.space, k, k)))
            continue
        res = t_invariant(bundle, k)
        out.append(ChernTerm(k, tag, coeff, res.cochain.scale(coeff), res))
    return out
