"""Exact rational parsing and formatting.

All structured I/O carries rationals as strings "p/q" (or "p" for integers)
so that symbolic outputs never pass through floating point.
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(s) -> Fraction:
    """Parse "p/q", "p", or a Python int into an exact Fraction."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        txt = s.strip()
        if "/" in txt:
            num, den = txt.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(txt))
    raise ValueError(f"not an exact rational: {s!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_vector(items) -> tuple[Fraction, ...]:
    return tuple(parse_rational(x) for x in items)


def format_vector(v) -> list[str]:
    return [format_rational(x) for x in v]


def frac_to_decimal_str(q: Fraction, sig: int = 12, rounding: str = "zero") -> str:
    """Decimal rendering of a Fraction with `sig` significant digits.

    Works for arbitrarily large numerators/denominators (no float conversion,
    so 10^5000-scale values are fine).  rounding is "zero" (toward zero),
    "floor", or "ceil"; the directed modes let interval endpoints stay
    outer bounds after rendering.
    """
    q = Fraction(q)
    if q == 0:
        return "0"
    negative = q < 0
    sign = "-" if negative else ""
    round_up = (rounding == "ceil" and not negative) or (rounding == "floor" and negative)
    q = abs(q)
    # find exponent e with 10^e <= q < 10^(e+1)
    e = 0
    if q >= 1:
        n = q.numerator // q.denominator
        e = len(str(n)) - 1
    else:
        x = q
        while x < 1:
            x *= 10
            e -= 1
    scaled = q / Fraction(10) ** e  # in [1, 10)
    cells = scaled * 10 ** (sig - 1)
    digits = cells.numerator // cells.denominator
    if round_up and cells.numerator % cells.denominator:
        digits += 1
        if digits >= 10**sig:
            digits //= 10
            e += 1
    ds = str(digits)[:sig]
    if -4 <= e < sig:
        return sign + _plain(digits, sig, e)
    mantissa = ds[0] + ("." + ds[1:].rstrip("0") if ds[1:].rstrip("0") else "")
    return f"{sign}{mantissa}e{e:+d}"


def _plain(digits: int, sig: int, e: int) -> str:
    ds = str(digits)[:sig]
    if e >= 0:
        if e + 1 >= len(ds):
            return ds + "0" * (e + 1 - len(ds))
        head, tail = ds[: e + 1], ds[e + 1 :].rstrip("0")
        return head + ("." + tail if tail else "")
    tail = ("0" * (-e - 1) + ds).rstrip("0")
    return "0." + (tail if tail else "0")
