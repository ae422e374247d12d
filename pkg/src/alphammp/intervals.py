"""Exact rational intervals and verified logarithm enclosures.

All interval endpoints are `Fraction`s, so the arithmetic here (add, sub,
mul, div, abs, max) is exact set arithmetic: the result interval contains
every value attainable from points of the operand intervals.  Transcendental
steps (log only) go through mpmath's `iv` context at a caller-chosen
precision and come back as outward-rounded rational endpoints, so every
enclosure stays rigorous end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import libmp


@dataclass(frozen=True)
class RatInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval: [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x) -> "RatInterval":
        x = Fraction(x)
        return RatInterval(x, x)

    @staticmethod
    def hull(*parts: "RatInterval") -> "RatInterval":
        if not parts:
            raise ValueError("hull of nothing")
        return RatInterval(min(p.lo for p in parts), max(p.hi for p in parts))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __add__(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(self.lo - other.hi, self.hi - other.lo)

    def __neg__(self) -> "RatInterval":
        return RatInterval(-self.hi, -self.lo)

    def __mul__(self, other: "RatInterval") -> "RatInterval":
        cands = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return RatInterval(min(cands), max(cands))

    def __truediv__(self, other: "RatInterval") -> "RatInterval":
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        cands = (
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        )
        return RatInterval(min(cands), max(cands))

    def scale(self, c) -> "RatInterval":
        c = Fraction(c)
        if c >= 0:
            return RatInterval(self.lo * c, self.hi * c)
        return RatInterval(self.hi * c, self.lo * c)

    def abs(self) -> "RatInterval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RatInterval(Fraction(0), max(-self.lo, self.hi))

    def is_positive(self) -> bool:
        return self.lo > 0

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def max_interval(parts) -> RatInterval:
    """Interval enclosure of max(x_1, ..., x_k) with x_i in parts[i]."""
    parts = list(parts)
    if not parts:
        raise ValueError("max of nothing")
    return RatInterval(max(p.lo for p in parts), max(p.hi for p in parts))


def min_interval(parts) -> RatInterval:
    parts = list(parts)
    if not parts:
        raise ValueError("min of nothing")
    return RatInterval(min(p.lo for p in parts), min(p.hi for p in parts))


def frac_to_iv(q: Fraction):
    """Point enclosure of an exact rational in the current iv context.

    iv.mpf does not accept Fraction directly; dividing two exact integer
    enclosures gives the correctly rounded interval.
    """
    q = Fraction(q)
    return mpmath.iv.mpf(q.numerator) / mpmath.iv.mpf(q.denominator)


def iv_bounds(x) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an iv.mpf value (outward, no rounding)."""
    lo, hi = x._mpi_
    a = Fraction(*libmp.to_rational(lo))
    b = Fraction(*libmp.to_rational(hi))
    return a, b


def log_interval(x: RatInterval, prec: int = 64) -> RatInterval:
    """Rigorous enclosure of {log t : t in x}, natural log.

    Requires x.lo > 0.  log is increasing, so the outer endpoints of the
    point enclosures at the interval's ends bound the image.
    """
    if x.lo <= 0:
        raise ValueError(f"log needs a positive interval, got {x}")
    saved = mpmath.iv.prec
    try:
        mpmath.iv.prec = prec
        lo_box = mpmath.iv.log(frac_to_iv(x.lo))
        hi_box = mpmath.iv.log(frac_to_iv(x.hi))
    finally:
        mpmath.iv.prec = saved
    lo, _ = iv_bounds(lo_box)
    _, hi = iv_bounds(hi_box)
    return RatInterval(lo, hi)


def floor_neg_log2(x: Fraction) -> int:
    """floor(-log2(x)) for an exact rational 0 < x, via integer comparisons."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("positive value required")
    # floor(-log2 x) = k  <=>  2^k <= 1/x < 2^(k+1)
    num, den = x.numerator, x.denominator
    # bit lengths land within one step of the answer; correct exactly
    k = den.bit_length() - num.bit_length()

    def le_pow(kk: int) -> bool:
        # 2^kk <= den/num ?
        if kk >= 0:
            return (num << kk) <= den
        return num <= (den << (-kk))

    while not le_pow(k):
        k -= 1
    while le_pow(k + 1):
        k += 1
    return k
