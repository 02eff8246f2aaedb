"""Exact Čech cocycle representatives of Chern-character-type invariants of vector bundles."""
from .catalog import cp1_degree, direct_sum, example, example_from_string, o_d_cp1, o_d_cpn, triangular_extension
from .cech import CechCochain, coboundary, component_signed, cup, cup_power, is_cocycle
from .field import QQ, Field, Scalar, factorial_inverse
from .forms import DifferentialForm, exterior_derivative, pullback, wedge
from .geometry import (
    BundlePresentation,
    CechSpace,
    Chart,
    CoordinateChange,
    Cover,
    GaugeTransformation,
    apply_gauge,
    load_bundle,
    validate_cocycle,
)
from .invariants import (
    chern_character_formal,
    flag_decompose,
    flag_refined,
    gauge_witness,
    line_fast_component,
    refined_first,
    t_component,
    t_invariant,
)
from .matform import FormMatrix, FuncMatrix, mat_inverse, mat_mul, trace
from .ratfunc import Polynomial, RationalFunction, parse_expression, poly_ring

__all__ = [
    "QQ", "Field", "Scalar", "factorial_inverse",
    "RationalFunction", "Polynomial", "parse_expression", "poly_ring",
    "DifferentialForm", "exterior_derivative", "pullback", "wedge",
    "FuncMatrix", "FormMatrix", "mat_mul", "mat_inverse", "trace",
    "Chart", "CoordinateChange", "Cover", "CechSpace", "BundlePresentation", "GaugeTransformation",
    "apply_gauge", "validate_cocycle", "load_bundle",
    "CechCochain", "coboundary", "component_signed", "cup", "cup_power", "is_cocycle",
    "t_component", "t_invariant", "refined_first", "flag_refined", "line_fast_component", "flag_decompose",
    "gauge_witness", "chern_character_formal",
    "o_d_cp1", "o_d_cpn", "direct_sum", "triangular_extension", "example", "example_from_string", "cp1_degree",
]
