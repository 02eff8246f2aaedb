"""Seeded random covers, cocycles and gauges for the property battery.

Charts all carry the coordinates ``x, y, z`` and are glued by identity changes,
so components up to degree 3 can be nonzero. A cocycle is produced as
``g_ij = f_i^{-1} f_j`` from random frames ``f_i = L D U`` (unipotent ``L, U``
with sparse polynomial entries, monomial diagonal ``D``); this reaches every
cocycle on a full nerve up to the choice of frames, keeps determinants monomial
and keeps all entries Laurent polynomials.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .field import QQ, Field
from .geometry import BundlePresentation, Chart, CoordinateChange, Cover, GaugeTransformation
from .matform import FuncMatrix, mat_inverse, mat_mul
from .ratfunc import PolyRing, RationalFunction

VARS = ("x", "y", "z")


@dataclass(frozen=True)
class SyntheticConfig:
    n_charts: int = 4
    rank: int = 2
    field: Field = QQ
    max_degree: int = 2
    max_terms: int = 3
    triangular: bool = False
    variables: tuple[str, ...] = VARS


def trivial_cover(n_charts: int, field: Field = QQ, variables=VARS) -> Cover:
    """``n_charts`` charts sharing one coordinate system, all changes declared as identities."""
    charts = [Chart(i, variables) for i in range(n_charts)]
    cover = Cover(charts, (), field)
    ring = cover.ring(0)
    changes = [
        CoordinateChange(a, b, {v: ring.var(v) for v in variables})
        for a in range(n_charts)
        for b in range(n_charts)
        if a != b
    ]
    return Cover(charts, changes, field)


def _coeff(rng: random.Random, field: Field):
    if field.characteristic:
        return rng.randrange(1, field.characteristic)
    c = rng.randint(1, 4)
    return -c if rng.random() < 0.5 else c


def random_polynomial(rng: random.Random, ring: PolyRing, max_degree: int, max_terms: int) -> RationalFunction:
    """Nonzero polynomial with at most ``max_terms`` terms of total degree at most ``max_degree``."""
    n = ring.nvars
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            budget = rng.randint(0, max_degree)
            exps = [0] * n
            for _ in range(budget):
                exps[rng.randrange(n)] += 1
            terms[tuple(exps)] = _coeff(rng, ring.field)
        f = RationalFunction(ring.polynomial(terms))
        if not f.is_zero():
            return f


def random_monomial(rng: random.Random, ring: PolyRing, max_degree: int) -> RationalFunction:
    exps = [0] * ring.nvars
    for _ in range(rng.randint(0, max_degree)):
        exps[rng.randrange(ring.nvars)] += 1
    return RationalFunction(ring.polynomial({tuple(exps): _coeff(rng, ring.field)}))


def random_unipotent(rng, ring: PolyRing, rank: int, max_degree: int, max_terms: int, upper: bool = True) -> FuncMatrix:
    rows = [[ring.one() if r == c else ring.zero() for c in range(rank)] for r in range(rank)]
    for r in range(rank):
        for c in range(rank):
            if (upper and c > r) or (not upper and c < r):
                if rng.random() < 0.8:
                    rows[r][c] = random_polynomial(rng, ring, max_degree, max_terms)
    return FuncMatrix(ring, rows)


def random_frame(rng, ring: PolyRing, cfg: SyntheticConfig) -> FuncMatrix:
    """``L D U`` (or ``D U`` when triangular) with monomial diagonal ``D``."""
    D = FuncMatrix.diagonal(ring, [random_monomial(rng, ring, 1) for _ in range(cfg.rank)])
    U = random_unipotent(rng, ring, cfg.rank, cfg.max_degree, cfg.max_terms, upper=True)
    m = mat_mul(D, U)
    if not cfg.triangular:
        L = random_unipotent(rng, ring, cfg.rank, cfg.max_degree, cfg.max_terms, upper=False)
        m = mat_mul(L, m)
    return m


def random_bundle(cfg: SyntheticConfig, seed: int) -> BundlePresentation:
    rng = random.Random(seed)
    cover = trivial_cover(cfg.n_charts, cfg.field, cfg.variables)
    frames = [random_frame(rng, cover.ring(i), cfg) for i in range(cfg.n_charts)]
    inverses = [mat_inverse(f) for f in frames]
    trans = {
        (i, j): mat_mul(inverses[i], frames[j])
        for i in range(cfg.n_charts)
        for j in range(i + 1, cfg.n_charts)
    }
    return BundlePresentation(cover, cfg.rank, trans, flag=cfg.triangular)


def random_gauge(bundle: BundlePresentation, seed: int, triangular: bool | None = None,
                 max_degree: int = 2, max_terms: int = 3) -> GaugeTransformation:
    """Unipotent times monomial-diagonal changes of frame on every chart."""
    rng = random.Random(seed)
    tri = bundle.flag if triangular is None else triangular
    mats = {}
    for i in bundle.cover.indices:
        ring = bundle.cover.ring(i)
        D = FuncMatrix.diagonal(ring, [random_monomial(rng, ring, 1) for _ in range(bundle.rank)])
        U = random_unipotent(rng, ring, bundle.rank, max_degree, max_terms, upper=True)
        mats[i] = mat_mul(U, D) if tri or rng.random() < 0.5 else mat_mul(D, U)
    return GaugeTransformation(mats)
