import json

import pytest

from tcocycle.catalog import cp1_cover, cpn_var, o_d_cp1, o_d_cpn
from tcocycle.errors import (
    ChartMismatch,
    ExpressionSyntaxError,
    InvalidBundle,
    MissingCoordinateChange,
    NotFlagPresented,
    PairNotInNerve,
    RankMismatch,
    SingularMatrix,
)
from tcocycle.geometry import (
    BundlePresentation,
    Chart,
    CoordinateChange,
    Cover,
    GaugeTransformation,
    apply_gauge,
    bundle_from_json,
    bundle_to_json,
    dump_bundle,
    load_bundle,
    validate_cocycle,
)
from tcocycle.matform import FuncMatrix
from tcocycle.ratfunc import poly_ring
from tcocycle.synthetic import trivial_cover


def test_transition_inverse_and_identity():
    b = o_d_cp1(4)
    z = b.cover.ring(0).var("z")
    assert b.transition(1, 0) == FuncMatrix(b.cover.ring(0), [[z**-4]])
    assert b.transition(1, 1).is_identity()
    assert b.transition(0, 0, coords=1).is_identity()


def test_transition_written_in_other_chart():
    b = o_d_cp1(3)
    w = b.cover.ring(1).var("w")
    assert b.transition(0, 1, coords=1) == FuncMatrix(b.cover.ring(1), [[w**-3]])


def test_rank2_inverse_by_adjugate():
    cover = cp1_cover()
    r = cover.ring(0)
    b = BundlePresentation(cover, 2, {(0, 1): FuncMatrix.from_exprs([["z", "1"], ["0", "1"]], r.variables)})
    assert b.transition(1, 0) == FuncMatrix.from_exprs([["1/z", "-1/z"], ["0", "1"]], r.variables)


def test_validate_cocycle_examples():
    assert validate_cocycle(o_d_cp1(2)).valid
    assert validate_cocycle(o_d_cp1(2)).checked == []
    b = o_d_cpn(2, 1)
    rep = validate_cocycle(b)
    assert rep.valid and rep.checked == [(0, 1, 2)]
    r = b.cover.ring(0)
    bad = dict(b.transitions)
    bad[(0, 2)] = bad[(0, 2)].scale(r.one() + r.var(cpn_var(0, 1)))
    rep = validate_cocycle(b.with_transitions(bad))
    assert not rep.valid
    assert [f.triple for f in rep.failures] == [(0, 1, 2)]
    assert rep.to_json()["failures"][0]["triple"] == [0, 1, 2]


def test_construction_errors():
    cover = cp1_cover()
    r0, r1 = cover.ring(0), cover.ring(1)
    with pytest.raises(SingularMatrix):
        BundlePresentation(cover, 1, {(0, 1): FuncMatrix(r0, [[r0.zero()]])})
    with pytest.raises(RankMismatch):
        BundlePresentation(cover, 2, {(0, 1): FuncMatrix(r0, [[r0.one()]])})
    with pytest.raises(ChartMismatch):
        BundlePresentation(cover, 1, {(0, 1): FuncMatrix(r1, [[r1.one()]])})
    with pytest.raises(InvalidBundle):
        BundlePresentation(cover, 1, {})
    with pytest.raises(NotFlagPresented):
        BundlePresentation(cover, 2, {(0, 1): FuncMatrix.from_exprs([["1", "0"], ["z", "1"]], r0.variables)}, flag=True)


def test_nerve_restricts_pairs():
    cover = trivial_cover(3)
    r = cover.ring(0)
    b = BundlePresentation(cover, 1, {(0, 1): FuncMatrix(r, [[r.var("x")]])}, nerve=[(0, 1)])
    assert b.tuples(2) == [(0, 1)]
    with pytest.raises(PairNotInNerve):
        b.transition(1, 2)


def test_missing_coordinate_change():
    cover = Cover([Chart(0, ("z",)), Chart(1, ("w",))])
    with pytest.raises(MissingCoordinateChange) as e:
        cover.change(0, 1)
    assert e.value.code == "MISSING_COORDINATE_CHANGE"
    assert cover.change(1, 1) is None


def test_changes_must_be_mutually_inverse():
    rz, rw = poly_ring(("z",)), poly_ring(("w",))
    with pytest.raises(InvalidBundle):
        Cover(
            [Chart(0, ("z",)), Chart(1, ("w",))],
            [CoordinateChange(0, 1, {"w": rz.var("z").inverse()}), CoordinateChange(1, 0, {"z": rw.var("w") * rw.const(2)})],
        )


def test_identity_change_detection():
    cover = trivial_cover(2)
    assert cover.change(0, 1).is_identity
    assert not cp1_cover().change(0, 1).is_identity


def test_apply_identity_gauge():
    b = o_d_cpn(2, 2)
    out = apply_gauge(b, GaugeTransformation.identity())
    assert out.transitions == b.transitions


def test_triangular_gauge_keeps_flag():
    cover = cp1_cover()
    r0, r1 = cover.ring(0), cover.ring(1)
    b = BundlePresentation(cover, 2, {(0, 1): FuncMatrix.from_exprs([["z^2", "z"], ["0", "1/z"]], r0.variables)}, flag=True)
    h = GaugeTransformation({
        0: FuncMatrix.from_exprs([["2", "z^3"], ["0", "1"]], r0.variables),
        1: FuncMatrix.from_exprs([["1", "w"], ["0", "5"]], r1.variables),
    })
    out = apply_gauge(b, h)
    assert out.flag
    assert all(m.is_upper_triangular() for m in out.transitions.values())


def test_gauge_roundtrip():
    b = o_d_cpn(2, 1)
    rings = {i: b.cover.ring(i) for i in b.cover.indices}
    h = GaugeTransformation({0: FuncMatrix(rings[0], [[rings[0].var("z0_1") + rings[0].one()]])})
    back = apply_gauge(apply_gauge(b, h), h.inverse())
    assert back.transitions == b.transitions


def test_bundle_json_roundtrip(tmp_path):
    b = o_d_cpn(2, -1)
    again, gauge = bundle_from_json(json.loads(json.dumps(bundle_to_json(b))))
    assert gauge is None
    assert again.transitions == b.transitions and again.cover.same_as(b.cover)
    path = tmp_path / "b.json"
    h = GaugeTransformation({1: FuncMatrix(b.cover.ring(1), [[b.cover.ring(1).const(3)]])})
    dump_bundle(b, path, h)
    again, gauge = load_bundle(path)
    assert gauge.matrices[1] == h.matrices[1]


def test_bundle_json_errors(tmp_path):
    obj = bundle_to_json(o_d_cp1(1))
    obj["transitions"][0]["matrix"] = [["z +"]]
    with pytest.raises(ExpressionSyntaxError) as e:
        bundle_from_json(obj)
    assert "transitions[0][0][0]" in str(e.value)
    obj = bundle_to_json(o_d_cp1(1))
    del obj["changes"][0]["map"]
    with pytest.raises(InvalidBundle):
        bundle_from_json(obj)
    path = tmp_path / "broken.json"
    path.write_text('{"rank": 1,\n "charts": [}')
    with pytest.raises(InvalidBundle) as e:
        load_bundle(path)
    assert "line 2" in str(e.value)


def test_gauge_on_invalid_input_stays_invalid():
    b = o_d_cpn(2, 1)
    r = b.cover.ring(0)
    bad = dict(b.transitions)
    bad[(0, 2)] = bad[(0, 2)].scale(r.const(2))
    tampered = b.with_transitions(bad)
    out = apply_gauge(tampered, GaugeTransformation.identity())
    assert not validate_cocycle(out).valid
