"""Exploratory computations on questions left open about these invariants.

Nothing here is asserted; each function reports what it finds.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import permutations

from .catalog import direct_sum, o_d_cpn
from .cech import CechCochain, cup
from .field import QQ, Field
from .forms import exterior_derivative, form_to_records
from .geometry import BundlePresentation, GaugeTransformation, apply_gauge
from .invariants import chern_character_formal, flag_refined, gauge_witness, t_invariant
from .matform import FuncMatrix
from .synthetic import SyntheticConfig, random_bundle


def _records(c: CechCochain) -> list:
    return [{"tuple": list(t), "form": form_to_records(w)} for t, w in sorted(c.components.items())]


@dataclass
class WhitneyRow:
    k: int
    product_rule: bool
    sum_rule: bool
    product_defect: list = dc_field(default_factory=list)

    def to_json(self):
        return {
            "k": self.k,
            "ch(E+F) == ch(E)*ch(F)": self.product_rule,
            "ch(E+F) == ch(E)+ch(F)": self.sum_rule,
            "product_defect": self.product_defect,
        }


def whitney(e: BundlePresentation, f: BundlePresentation, k_max: int) -> list[WhitneyRow]:
    """Compare ``ch(E + F)`` with ``ch(E) ch(F)`` (cup product) and with ``ch(E) + ch(F)``
    degree by degree, at the cochain level."""
    s = direct_sum([e, f])
    ce = chern_character_formal(e, k_max)
    cf = chern_character_formal(f, k_max)
    cs = chern_character_formal(s, k_max)
    rows = []
    for k in range(k_max + 1):
        prod = None
        for a in range(k + 1):
            term = cup(ce[a].cochain, cf[k - a].cochain)
            prod = term if prod is None else prod + term
        lhs = cs[k].cochain
        total = ce[k].cochain + cf[k].cochain if k else CechCochain.constant(s.space, 2)
        rows.append(WhitneyRow(k, lhs == prod, lhs == total, _records(lhs - prod)))
    return rows


def whitney_examples(k_max: int = 2, field: Field = QQ) -> dict:
    """Run the comparison on ``O(a) + O(b)`` over the projective plane and on random
    line bundles over synthetic covers."""
    out = {}
    for a, b in ((1, 1), (1, 2), (2, -1)):
        rows = whitney(o_d_cpn(2, a, field), o_d_cpn(2, b, field), k_max)
        out[f"O({a})+O({b}) on CP2"] = [r.to_json() for r in rows]
    for seed in range(2):
        e = random_bundle(SyntheticConfig(n_charts=4, rank=1, field=field), 1000 + seed)
        f = random_bundle(SyntheticConfig(n_charts=4, rank=1, field=field), 2000 + seed)
        out[f"synthetic line bundles seed={seed}"] = [r.to_json() for r in whitney(e, f, k_max)]
    return out


@dataclass
class FlagComparison:
    gauge: str
    k: int
    cochains_equal: bool
    witness_dclosed: bool

    def to_json(self):
        return {
            "gauge": self.gauge,
            "k": self.k,
            "refined cochains equal": self.cochains_equal,
            "witness components d-closed": self.witness_dclosed,
        }


def flag_dependence(bundle: BundlePresentation, k: int) -> list[FlagComparison]:
    """Re-present a flag bundle through constant permutation gauges; whenever the
    result is again triangular (another flag), compare the refined cochains and
    inspect the connecting witness."""
    out = []
    for perm in permutations(range(bundle.rank)):
        if list(perm) == list(range(bundle.rank)):
            continue
        mats = {}
        for i in bundle.cover.indices:
            ring = bundle.cover.ring(i)
            mats[i] = FuncMatrix(ring, [[ring.one() if perm[r] == c else ring.zero() for c in range(bundle.rank)]
                                        for r in range(bundle.rank)])
        h = GaugeTransformation(mats)
        other = apply_gauge(bundle, h)
        if not all(m.is_upper_triangular() for m in other.transitions.values()):
            continue
        other = other.with_transitions(other.transitions, flag=True)
        a = flag_refined(bundle, k).cochain
        b = flag_refined(other, k).cochain
        w = gauge_witness(bundle, h, k).witness
        closed = all(not exterior_derivative(c).components for c in w.components.values())
        out.append(FlagComparison(f"permutation {list(perm)}", k, a == b, closed))
    return out


def flag_dependence_examples(field: Field = QQ) -> dict:
    out = {}
    for a, b in ((1, 2), (0, 3)):
        s = direct_sum([o_d_cpn(2, a, field), o_d_cpn(2, b, field)])
        for k in (1, 2):
            out[f"O({a})+O({b}) on CP2, k={k}"] = [c.to_json() for c in flag_dependence(s, k)]
    return out


def nonflag_closedness(k: int = 2, seeds=range(6), field: Field = QQ) -> dict:
    """How many components of the degree-``k`` cochain are d-closed when no flag is
    available. One non-closed component already rules out this cochain as a refined
    representative; it says nothing about other representatives."""
    out = {}
    for rank in (2, 3):
        closed = total = 0
        witnesses = []
        for seed in seeds:
            b = random_bundle(SyntheticConfig(n_charts=k + 2, rank=rank, field=field), 5000 + seed)
            report = t_invariant(b, k).dclosed_report
            total += len(report)
            closed += sum(report.values())
            if not all(report.values()) and len(witnesses) < 2:
                witnesses.append({"seed": 5000 + seed, "tuples": [list(t) for t, ok in sorted(report.items()) if not ok]})
        out[f"rank {rank}, k={k}"] = {"components": total, "d-closed": closed, "non-closed examples": witnesses}
    return out
