import time

import pytest
from hypothesis import given, settings, strategies as st

from tcocycle.catalog import (
    cp1_cover,
    cp1_degree,
    direct_sum,
    example,
    example_from_string,
    o_d_cp1,
    o_d_cpn,
    triangular_extension,
    trivial,
)
from tcocycle.errors import InvalidParameters, NotLaurent, WrongCover
from tcocycle.field import QQ, Field
from tcocycle.geometry import BundlePresentation, GaugeTransformation, apply_gauge, validate_cocycle
from tcocycle.invariants import refined_first, t_invariant
from tcocycle.matform import FuncMatrix


def test_o_d_cp1_examples():
    assert o_d_cp1(0).transitions[(0, 1)].is_identity()
    b = o_d_cp1(3)
    z = b.cover.ring(0).var("z")
    assert b.transitions[(0, 1)].entries[0][0] == z**3
    assert validate_cocycle(b).valid and not validate_cocycle(b).checked


def test_o_d_cpn_examples():
    b = o_d_cpn(2, 1)
    assert len(b.cover.charts) == 3 and len(b.transitions) == 3
    assert validate_cocycle(b).checked == [(0, 1, 2)] and validate_cocycle(b).valid
    assert validate_cocycle(o_d_cpn(3, -2)).valid


@pytest.mark.parametrize("d", range(-5, 6))
def test_degree_of_line_bundles(d):
    assert cp1_degree(t_invariant(o_d_cp1(d), 1)) == QQ(d)


def test_degree_examples():
    assert cp1_degree(t_invariant(trivial(2, 1), 1)) == QQ(0)
    assert cp1_degree(t_invariant(direct_sum([o_d_cp1(2), o_d_cp1(3)]), 1)) == QQ(5)
    assert cp1_degree(refined_first(o_d_cp1(-4))) == QQ(-4)


def test_degree_over_prime_field():
    F = Field.prime(7)
    assert cp1_degree(t_invariant(o_d_cp1(-2, F), 1)) == F(-2)


def test_degree_errors():
    with pytest.raises(WrongCover):
        cp1_degree(t_invariant(o_d_cpn(2, 1), 1))
    with pytest.raises(WrongCover):
        cp1_degree(t_invariant(o_d_cpn(2, 1), 2))
    cover = cp1_cover()
    r = cover.ring(0)
    # z - 1 vanishes inside the overlap, so the residue read-off is not defined
    b = BundlePresentation(cover, 1, {(0, 1): FuncMatrix.from_exprs([["z-1"]], r.variables)})
    with pytest.raises(NotLaurent):
        cp1_degree(t_invariant(b, 1))


def _regular_gauge(seed):
    # constant invertible diagonal times a polynomial unipotent: invertible over each chart
    cover = cp1_cover()
    mats = {}
    for i, v in ((0, "z"), (1, "w")):
        r = cover.ring(i)
        mats[i] = FuncMatrix.from_exprs([[str(seed + 2 + i), f"{seed}*{v}^2 - {v}"], ["0", "-1"]], r.variables)
    return GaugeTransformation(mats)


@pytest.mark.parametrize("seed", range(4))
def test_degree_invariant_under_regular_gauge(seed):
    b = direct_sum([o_d_cp1(seed - 1), o_d_cp1(2)])
    before = cp1_degree(t_invariant(b, 1))
    after = cp1_degree(t_invariant(apply_gauge(b, _regular_gauge(seed)), 1))
    assert before == after == QQ(seed + 1)


@settings(max_examples=20, deadline=None)
@given(st.integers(-5, 5), st.integers(-4, 4), st.integers(-4, 4), st.integers(1, 9))
def test_monomial_gauge_shifts_degree(d, m, n, c):
    # z^m on chart 0 and w^n on chart 1 are not invertible on those charts, so they
    # change the bundle: the new transition is z^(d - m - n)
    cover = cp1_cover()
    rz, rw = cover.ring(0), cover.ring(1)
    h = GaugeTransformation({
        0: FuncMatrix(rz, [[rz.const(c) * rz.var("z") ** m]]),
        1: FuncMatrix(rw, [[rw.var("w") ** n]]),
    })
    assert cp1_degree(t_invariant(apply_gauge(o_d_cp1(d), h), 1)) == QQ(d - m - n)


def test_direct_sum_and_extension():
    s = direct_sum([o_d_cpn(2, 1), o_d_cpn(2, 3)])
    assert s.rank == 2 and s.flag
    ext = triangular_extension([o_d_cp1(1), o_d_cp1(2)], {(0, 1): {(0, 1): "z^5 + 1"}})
    assert ext.transitions[(0, 1)].entries[0][1] == ext.cover.ring(0).parse("z^5 + 1")
    with pytest.raises(InvalidParameters):
        direct_sum([o_d_cp1(1), o_d_cpn(2, 1)])
    with pytest.raises(InvalidParameters):
        triangular_extension([o_d_cp1(1), o_d_cp1(2)], {(1, 0): {(0, 1): "z"}})


def test_extension_must_satisfy_cocycle():
    diag = [o_d_cpn(2, 0), o_d_cpn(2, 0)]
    with pytest.raises(InvalidParameters):
        triangular_extension(diag, {(0, 1): {(0, 1): "z0_1"}})


def test_example_strings():
    b = example_from_string("direct_sum([o_d_cp1(2), o_d_cp1(-3)])")
    assert b.rank == 2
    assert cp1_degree(t_invariant(b, 1)) == QQ(-1)
    b = example_from_string("o_d_cp1(4)", Field.prime(11))
    assert b.field == Field.prime(11)
    assert example("o_d_cpn", 2, 1).rank == 1
    for bad in ("os.system('x')", "o_d_cp1(2.5)", "o_d_cp1(", "unknown(1)", "3"):
        with pytest.raises(InvalidParameters):
            example_from_string(bad)


def test_degree_sweep_is_fast():
    t0 = time.perf_counter()
    for d in range(-5, 6):
        assert cp1_degree(t_invariant(o_d_cp1(d), 1)) == QQ(d)
    assert time.perf_counter() - t0 < 1.0
