from hypothesis import given, settings, strategies as st

from tcocycle.catalog import cp1_cover
from tcocycle.forms import (
    DifferentialForm,
    exterior_derivative,
    form_from_records,
    form_to_records,
    format_form,
    pullback,
    wedge,
)
from tcocycle.geometry import CoordinateChange
from tcocycle.ratfunc import RationalFunction, poly_ring

R = poly_ring(("x", "y", "z"))
x, y, z = R.gens()
dx, dy, dz = (DifferentialForm.dvar(R, v) for v in ("x", "y", "z"))
fn = DifferentialForm.function


def test_wedge_examples():
    assert wedge(dz, dz).is_zero()
    f, g = x * x + y, y / z
    assert wedge(dx * f, dy * g) == (dx ^ dy) * (f * g)
    assert wedge(dx + dy, dy * x) == (dx ^ dy) * x


def test_wedge_reorders_with_sign():
    assert (dy ^ dx) == -(dx ^ dy)
    assert (dz ^ dx ^ dy) == (dx ^ dy ^ dz)
    assert (dy ^ dx ^ dz).coefficient(["x", "y", "z"]) == R.const(-1)


def test_d_examples():
    assert exterior_derivative(fn(z * z)) == dz * (R.const(2) * z)
    assert exterior_derivative(dz * z.inverse()).is_zero()
    assert exterior_derivative(dy * x) == dx ^ dy


def test_pullback_examples():
    cover = cp1_cover()
    rw, rz = cover.ring(1), cover.ring(0)
    dw = DifferentialForm.dvar(rw, "w")
    change = cover.changes[(0, 1)]
    zz = rz.var("z")
    dzz = DifferentialForm.dvar(rz, "z")
    assert pullback(dw, change) == dzz * (-(zz**-2))
    assert pullback(dw * rw.var("w").inverse(), change) == dzz * (-(zz.inverse()))


def test_pullback_identity():
    change = CoordinateChange(0, 1, {v: R.var(v) for v in R.variables})
    a = (dx ^ dz) * (x / (y + z)) + fn(y)
    assert pullback(a, change) == a


def test_records_roundtrip_and_format():
    a = (dx ^ dy) * (x / z) - dz * R.const(3)
    assert form_from_records(form_to_records(a), R.variables) == a
    assert format_form(DifferentialForm.zero(R)) == "0"
    assert "dx^dy" in format_form(a)


# -- properties ---------------------------------------------------------------------

monos = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
polys = st.dictionaries(monos, st.integers(-3, 3), min_size=1, max_size=3).map(R.polynomial)


@st.composite
def functions(draw):
    n, d = draw(polys), draw(polys)
    if d.is_zero():
        d = R.polynomial({(0, 0, 0): 1})
    return RationalFunction(n, d)


@st.composite
def forms(draw, degree=None):
    deg = draw(st.integers(0, 3)) if degree is None else degree
    keys = draw(st.lists(st.sets(st.integers(0, 2), min_size=deg, max_size=deg), max_size=3))
    comps = {}
    for k in keys:
        comps[tuple(sorted(k))] = draw(functions())
    return DifferentialForm(R, comps)


@settings(max_examples=50, deadline=None)
@given(forms())
def test_d_squared(a):
    assert exterior_derivative(exterior_derivative(a)).is_zero()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.data())
def test_graded_leibniz(p, q, data):
    a, b = data.draw(forms(p)), data.draw(forms(q))
    lhs = exterior_derivative(a ^ b)
    rhs = (exterior_derivative(a) ^ b) + (a ^ exterior_derivative(b)) * R.const((-1) ** p)
    assert lhs == rhs


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.data())
def test_graded_commutativity(p, q, data):
    a, b = data.draw(forms(p)), data.draw(forms(q))
    assert (a ^ b) == (b ^ a) * R.const((-1) ** (p * q))


@settings(max_examples=30, deadline=None)
@given(forms())
def test_pullback_commutes_with_d(a):
    src = poly_ring(("u", "v", "w"))
    u, v, w = src.gens()
    # triangular automorphism: always invertible, never hits a pole
    change = CoordinateChange(1, 0, {"x": u, "y": v + u * u, "z": w - u * v}, src)
    assert pullback(exterior_derivative(a), change) == exterior_derivative(pullback(a, change))
