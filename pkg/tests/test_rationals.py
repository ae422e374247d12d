from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from alphammp.rationals import (
    frac_to_decimal_str,
    format_rational,
    format_vector,
    parse_rational,
    parse_vector,
)


def test_parse_forms():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-7") == Fraction(-7)
    assert parse_rational(5) == Fraction(5)
    assert parse_rational(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(ValueError):
        parse_rational(0.5)


def test_format_integers_bare():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-3, 9)) == "-1/3"


@given(st.fractions(max_denominator=10**6))
def test_parse_format_roundtrip(q):
    assert parse_rational(format_rational(q)) == q


def test_vector_helpers():
    v = parse_vector(["1/2", "-3", 4])
    assert v == (Fraction(1, 2), Fraction(-3), Fraction(4))
    assert format_vector(v) == ["1/2", "-3", "4"]


def test_decimal_rendering_basic():
    assert frac_to_decimal_str(Fraction(0)) == "0"
    assert frac_to_decimal_str(Fraction(1, 2)) == "0.5"
    assert frac_to_decimal_str(Fraction(1, 3), 6) == "0.333333"
    assert frac_to_decimal_str(Fraction(-1, 3), 6) == "-0.333333"
    assert frac_to_decimal_str(Fraction(1234567), 4) == "1.234e+6"


def test_decimal_rendering_huge_scale():
    tiny = Fraction(1, 10) ** 720
    s = frac_to_decimal_str(tiny, 6)
    assert s == "1e-720"
    big = Fraction(10) ** 500 * Fraction(31, 7)
    s = frac_to_decimal_str(big, 3)
    assert s.endswith("e+500") and s.startswith("4.42")


def test_decimal_directed_rounding():
    # outward rendering of an interval endpoint must bound the true value
    q = Fraction(1, 3)
    lo = frac_to_decimal_str(q, 6, rounding="floor")
    hi = frac_to_decimal_str(q, 6, rounding="ceil")
    assert lo == "0.333333" and hi == "0.333334"
    assert frac_to_decimal_str(-q, 6, rounding="floor") == "-0.333334"
    assert frac_to_decimal_str(-q, 6, rounding="ceil") == "-0.333333"
    # exact values don't move
    assert frac_to_decimal_str(Fraction(1, 4), 6, rounding="ceil") == "0.25"


def test_decimal_ceil_rollover():
    # 0.999999... must carry into the next decade, not truncate
    q = Fraction(999999999999, 10**12) + Fraction(1, 10**15)
    s = frac_to_decimal_str(q, 12, rounding="ceil")
    assert s == "1"


@given(st.fractions(min_value=Fraction(1, 10**9), max_value=Fraction(10**9)))
def test_decimal_directed_rounding_brackets_value(q):
    lo = Fraction(frac_to_decimal_str(q, 9, rounding="floor"))
    hi = Fraction(frac_to_decimal_str(q, 9, rounding="ceil"))
    assert lo <= q <= hi
