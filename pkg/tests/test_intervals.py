import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from alphammp.intervals import (
    RatInterval,
    floor_neg_log2,
    iv_bounds,
    log_interval,
    max_interval,
    min_interval,
)

nums = st.integers(-10**4, 10**4)
dens = st.integers(1, 64)


def make_iv(a, b):
    return RatInterval(min(a, b), max(a, b))


@st.composite
def interval_and_member(draw):
    a = Fraction(draw(nums), draw(dens))
    b = Fraction(draw(nums), draw(dens))
    t = Fraction(draw(st.integers(0, 16)), 16)
    lo, hi = min(a, b), max(a, b)
    return RatInterval(lo, hi), lo + t * (hi - lo)


def test_constructor_rejects_reversed():
    with pytest.raises(ValueError):
        RatInterval(Fraction(1), Fraction(0))


def test_point_and_width():
    p = RatInterval.point(Fraction(3, 7))
    assert p.width == 0 and p.mid == Fraction(3, 7)
    assert p.contains(Fraction(3, 7))
    iv = make_iv(Fraction(1, 2), Fraction(2))
    assert iv.width == Fraction(3, 2)
    assert iv.mid == Fraction(5, 4)


@given(interval_and_member(), interval_and_member())
def test_arithmetic_contains_pointwise(p, q):
    iv1, x = p
    iv2, y = q
    assert (iv1 + iv2).contains(x + y)
    assert (iv1 - iv2).contains(x - y)
    assert (iv1 * iv2).contains(x * y)
    assert (-iv1).contains(-x)
    assert iv1.abs().contains(abs(x))
    assert iv1.scale(Fraction(-5, 3)).contains(Fraction(-5, 3) * x)
    if iv2.lo > 0 or iv2.hi < 0:
        assert (iv1 / iv2).contains(x / y)


@given(interval_and_member(), interval_and_member())
def test_hull_min_max(p, q):
    iv1, x = p
    iv2, y = q
    hull = RatInterval.hull(iv1, iv2)
    assert hull.contains(x) and hull.contains(y)
    assert max_interval([iv1, iv2]).contains(max(x, y))
    assert min_interval([iv1, iv2]).contains(min(x, y))


def test_division_by_straddling_interval_rejected():
    iv = make_iv(Fraction(-1), Fraction(1))
    with pytest.raises(ZeroDivisionError):
        RatInterval.point(Fraction(1)) / iv


def test_is_positive():
    assert make_iv(Fraction(1, 10**9), Fraction(2)).is_positive()
    assert not make_iv(Fraction(0), Fraction(1)).is_positive()
    assert not make_iv(Fraction(-1), Fraction(1)).is_positive()


# -- transcendental enclosures -------------------------------------------


def test_log_interval_brackets_true_log():
    for q in (Fraction(2), Fraction(1, 3), Fraction(355, 113), Fraction(10**9)):
        enc = log_interval(RatInterval.point(q), prec=64)
        assert abs(float(enc.mid) - math.log(q)) < 1e-12
        assert enc.width < Fraction(1, 10**9)
        # exp of the bounds brackets q: check via strict monotone squeeze
        assert enc.lo < enc.hi


def test_log_interval_monotone_endpoints():
    iv = make_iv(Fraction(2), Fraction(8))
    enc = log_interval(iv, prec=64)
    # interior values are safely inside; endpoints up to float slack
    assert enc.contains(Fraction(math.log(3)).limit_denominator(10**9))
    assert enc.contains(Fraction(math.log(5)).limit_denominator(10**9))
    assert float(enc.lo) <= math.log(2) + 1e-9
    assert float(enc.hi) >= math.log(8) - 1e-9


def test_log_interval_requires_positive():
    with pytest.raises(ValueError):
        log_interval(make_iv(Fraction(0), Fraction(1)), prec=64)


@given(st.integers(1, 10**6), st.integers(1, 10**3), st.integers(0, 100))
def test_log_interval_width_tracks_input(n, d, padn):
    q, pad = Fraction(n, d), Fraction(padn, 10**4)
    iv = RatInterval(q, q + pad)
    enc = log_interval(iv, prec=80)
    # enclosure can exceed log(hi) - log(lo) only by rounding slack
    assert enc.lo <= enc.hi
    true_lo, true_hi = math.log(float(q)), math.log(float(q + pad))
    assert float(enc.lo) <= true_lo + 1e-9
    assert float(enc.hi) >= true_hi - 1e-9


def test_iv_bounds_brackets_mpmath_interval():
    import mpmath

    saved = mpmath.iv.prec
    try:
        mpmath.iv.prec = 64
        x = mpmath.iv.sqrt(mpmath.iv.mpf(2))
        lo, hi = iv_bounds(x)
    finally:
        mpmath.iv.prec = saved
    assert isinstance(lo, Fraction) and isinstance(hi, Fraction)
    assert lo <= hi
    assert lo * lo <= 2 <= hi * hi
    assert hi - lo < Fraction(1, 10**15)


# -- dyadic magnitude ------------------------------------------------------


def test_floor_neg_log2_exact_values():
    assert floor_neg_log2(Fraction(1)) == 0
    assert floor_neg_log2(Fraction(1, 2)) == 1
    assert floor_neg_log2(Fraction(1, 3)) == 1
    assert floor_neg_log2(Fraction(1, 4)) == 2
    assert floor_neg_log2(Fraction(3, 4)) == 0
    assert floor_neg_log2(Fraction(2)) == -1
    assert floor_neg_log2(Fraction(5, 2)) == -2
    assert floor_neg_log2(Fraction(1, 2**100)) == 100


@given(st.integers(1, 10**30), st.integers(1, 10**30))
def test_floor_neg_log2_defining_inequality(n, d):
    q = Fraction(n, d)
    k = floor_neg_log2(q)
    # 2^-(k+1) < q <= 2^-k (Fraction powers handle negative k too)
    assert Fraction(1, 2) ** (k + 1) < q <= Fraction(1, 2) ** k


def test_floor_neg_log2_rejects_nonpositive():
    with pytest.raises(ValueError):
        floor_neg_log2(Fraction(0))
    with pytest.raises(ValueError):
        floor_neg_log2(Fraction(-1))
