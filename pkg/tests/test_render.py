import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from nonabelian_xft.render import fmt_bool, fmt_float, json_safe, matrix_to_pairs, render_svg


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(fmt_float(x)) == x


def test_special_values():
    assert fmt_float(-0.0) == "0"
    assert fmt_float(math.nan) == "nan"
    assert fmt_float(-math.inf) == "-inf"
    assert fmt_float(None) == ""
    assert fmt_bool(True) == "true" and fmt_bool(False) == "false"


def test_json_safe():
    out = json_safe({"a": np.float64(1.5), "b": [np.nan, np.int64(2)], "c": np.array([True, False])})
    assert out == {"a": 1.5, "b": [None, 2], "c": [True, False]}


def test_matrix_pairs():
    assert matrix_to_pairs([[1, 1j], [-1j, 0]]) == [[[1.0, 0.0], [0.0, 1.0]], [[0.0, -1.0], [0.0, 0.0]]]


def test_svg_breaks_lines_at_nan():
    svg = render_svg([0, 1, 2, 3], {"a": [0, 1, math.nan, 2], "b": [1, 1, 1, 1]}, "x", "t")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 3
    assert ">a</text>" in svg and ">b</text>" in svg


def test_svg_constant_series():
    svg = render_svg([0, 1], {"a": [1.0, 1.0]}, "x")
    assert svg.count("<polyline") == 1
    assert render_svg([0, 1], {"a": [1.0, 1.0]}, "x") == svg


def test_svg_escapes_labels():
    assert "a&lt;b" in render_svg([0, 1], {"a<b": [0, 1]}, "x")
