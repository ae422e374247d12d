"""Approximation targets and their verified rational enclosures.

A target is what the sampling side of the lab approximates: a rational
projective point, a real algebraic number given by an integer minimal
polynomial plus an isolating interval, or a computable real given by a
callable that produces enclosures at requested precision.  Everything a
target reports is an exact rational interval that provably contains the
value, so downstream distance and exponent computations never depend on
floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import sympy

from .intervals import RatInterval
from .rationals import parse_rational

MAX_BITS = 1 << 20


class PrecisionExhausted(RuntimeError):
    """Raised instead of silently rounding when refinement hits MAX_BITS."""


@dataclass(frozen=True)
class ProjectivePoint:
    """Integer projective coordinates, normalized: gcd one, first nonzero
    coordinate positive."""

    coords: tuple[int, ...]

    def __post_init__(self):
        raw = tuple(int(c) for c in self.coords)
        if not raw or all(c == 0 for c in raw):
            raise ValueError("projective point needs a nonzero coordinate")
        g = 0
        for c in raw:
            g = math.gcd(g, abs(c))
        raw = tuple(c // g for c in raw)
        for c in raw:
            if c != 0:
                if c < 0:
                    raw = tuple(-x for x in raw)
                break
        object.__setattr__(self, "coords", raw)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    @property
    def max_abs(self) -> int:
        return max(abs(c) for c in self.coords)

    def to_json(self) -> list[int]:
        return list(self.coords)

    def __str__(self):
        return "[" + " : ".join(str(c) for c in self.coords) + "]"


def _poly_eval(coeffs: tuple[int, ...], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class TargetPoint:
    """A point of P^1 (or P^n when rational) to be approximated.

    kind is one of "rational", "algebraic", "computable".  place is the
    string "real" or a prime p for the p-adic place; non-rational targets
    only make sense at the real place.
    """

    def __init__(
        self,
        kind: str,
        place="real",
        *,
        coords: Optional[tuple[int, ...]] = None,
        minpoly: Optional[tuple[int, ...]] = None,
        interval: Optional[RatInterval] = None,
        approx: Optional[Callable[[int], tuple[Fraction, Fraction]]] = None,
        label: str = "",
    ):
        if kind not in ("rational", "algebraic", "computable"):
            raise ValueError(f"unknown target kind {kind!r}")
        if place != "real":
            p = int(place)
            if not sympy.isprime(p):
                raise ValueError(f"p-adic place needs a prime, got {p}")
            if kind != "rational":
                raise ValueError("non-rational targets are real-place only")
            place = p
        self.kind = kind
        self.place = place
        self.label = label or kind

        if kind == "rational":
            if coords is None:
                raise ValueError("rational target needs coords")
            self.point = ProjectivePoint(tuple(coords))
            self.minpoly = None
            self._interval = None
            self._approx = None
        elif kind == "algebraic":
            if minpoly is None or interval is None:
                raise ValueError("algebraic target needs minpoly and interval")
            coeffs = tuple(int(c) for c in minpoly)
            while coeffs and coeffs[-1] == 0:
                coeffs = coeffs[:-1]
            if len(coeffs) < 3:
                raise ValueError("minimal polynomial must have degree >= 2")
            x = sympy.Symbol("x")
            poly = sympy.Poly(list(reversed(coeffs)), x)
            if not poly.is_irreducible:
                raise ValueError(
                    "minimal polynomial must be irreducible over Q "
                    "(reducible input could hide a rational value)"
                )
            flo = _poly_eval(coeffs, interval.lo)
            fhi = _poly_eval(coeffs, interval.hi)
            if flo == 0 or fhi == 0 or (flo > 0) == (fhi > 0):
                raise ValueError(
                    "isolating interval must give a strict sign change"
                )
            self.point = None
            self.minpoly = coeffs
            self._interval = interval
            self._sign_lo = flo > 0
            self._approx = None
        else:
            if approx is None:
                raise ValueError("computable target needs an enclosure callable")
            self.point = None
            self.minpoly = None
            self._interval = None
            self._approx = approx

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    # -- enclosures -------------------------------------------------------

    def affine_enclosure(self, bits: int) -> RatInterval:
        """Interval of width <= 2^-bits containing the affine value x0/x1.

        Rational targets with x1 = 0 (the point at infinity) have no affine
        value and raise.
        """
        if self.kind == "rational":
            if self.point.dim != 1:
                raise ValueError("affine value is a P^1 notion")
            a, b = self.point.coords
            if b == 0:
                raise ValueError("point at infinity has no affine value")
            return RatInterval.point(Fraction(a, b))
        if self.kind == "algebraic":
            self._refine(bits)
            return self._interval
        lo, hi = self._approx(bits)
        box = RatInterval(Fraction(lo), Fraction(hi))
        if box.width > Fraction(1, 2**bits):
            raise PrecisionExhausted(
                f"enclosure callable returned width {box.width} > 2^-{bits}"
            )
        return box

    def coords_enclosures(self, bits: int) -> tuple[RatInterval, ...]:
        """Enclosures for a full set of projective coordinates."""
        if self.kind == "rational":
            return tuple(RatInterval.point(Fraction(c)) for c in self.point.coords)
        theta = self.affine_enclosure(bits)
        return (theta, RatInterval.point(Fraction(1)))

    def _refine(self, bits: int) -> None:
        # exact bisection: the minpoly is irreducible of degree >= 2, so it
        # never vanishes at a rational midpoint and the sign test is total
        goal = Fraction(1, 2**bits)
        box = self._interval
        if box.width <= goal:
            return
        if bits > MAX_BITS:
            raise PrecisionExhausted(f"refinement beyond {MAX_BITS} bits")
        lo, hi = box.lo, box.hi
        sign_lo = self._sign_lo
        while hi - lo > goal:
            mid = (lo + hi) / 2
            if (_poly_eval(self.minpoly, mid) > 0) == sign_lo:
                lo = mid
            else:
                hi = mid
        self._interval = RatInterval(lo, hi)
        self._sign_lo = sign_lo

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rational(coords, place="real") -> "TargetPoint":
        return TargetPoint("rational", place, coords=tuple(int(c) for c in coords),
                           label="rational")

    @staticmethod
    def from_fraction(q, place="real") -> "TargetPoint":
        q = parse_rational(q)
        return TargetPoint("rational", place, coords=(q.numerator, q.denominator),
                           label=f"rational {q}")

    @staticmethod
    def sqrt(n: int) -> "TargetPoint":
        n = int(n)
        if n <= 0:
            raise ValueError("sqrt target needs a positive integer")
        r = math.isqrt(n)
        if r * r == n:
            raise ValueError(f"{n} is a perfect square; sqrt({n}) is rational")
        return TargetPoint(
            "algebraic",
            minpoly=(-n, 0, 1),
            interval=RatInterval(Fraction(r), Fraction(r + 1)),
            label=f"sqrt({n})",
        )

    @staticmethod
    def golden() -> "TargetPoint":
        return TargetPoint(
            "algebraic",
            minpoly=(-1, -1, 1),
            interval=RatInterval(Fraction(1), Fraction(2)),
            label="golden ratio",
        )

    @staticmethod
    def algebraic(minpoly, lo, hi) -> "TargetPoint":
        return TargetPoint(
            "algebraic",
            minpoly=tuple(int(c) for c in minpoly),
            interval=RatInterval(parse_rational(lo), parse_rational(hi)),
            label="algebraic",
        )

    @staticmethod
    def liouville(base: int = 10) -> "TargetPoint":
        """sum_{n>=1} base^(-n!), with the classical tail bound
        2*base^(-(N+1)!) after truncating at N terms."""
        base = int(base)
        if base < 2:
            raise ValueError("base must be at least 2")

        def enclosure(bits: int) -> tuple[Fraction, Fraction]:
            # tail after N terms: 2*base^-(N+1)!; stop once <= 2^-bits,
            # decided in exponent arithmetic (2^(bl-1) <= base < 2^bl) so
            # no million-digit power is built just to be compared
            bl = base.bit_length()
            n, fact = 1, 1
            exps = [1]
            while True:
                tail_exp = (n + 1) * fact  # (n+1)! = (n+1) * n!
                if tail_exp > 4_000_000:
                    raise PrecisionExhausted("factorial tail exponent too large")
                enough = tail_exp * (bl - 1) >= bits + 1
                if not enough and tail_exp * bl >= bits + 1:
                    enough = base**tail_exp >= 1 << (bits + 1)
                if enough:
                    s = sum(Fraction(1, base**e) for e in exps)
                    return s, s + Fraction(2, base**tail_exp)
                n += 1
                fact *= n
                exps.append(fact)

        return TargetPoint("computable", approx=enclosure, label=f"liouville base {base}")

    @staticmethod
    def from_config(cfg: dict) -> "TargetPoint":
        kind = cfg.get("kind")
        place = cfg.get("place", "real")
        if kind == "sqrt":
            t = TargetPoint.sqrt(cfg["n"])
        elif kind == "golden":
            t = TargetPoint.golden()
        elif kind == "liouville":
            t = TargetPoint.liouville(cfg.get("base", 10))
        elif kind == "rational":
            if "coords" in cfg:
                t = TargetPoint.rational([int(parse_rational(c)) for c in cfg["coords"]], place)
            else:
                t = TargetPoint.from_fraction(cfg["value"], place)
        elif kind == "algebraic":
            iv = cfg["interval"]
            t = TargetPoint.algebraic(cfg["minpoly"], iv[0], iv[1])
        else:
            raise ValueError(f"unknown target kind {kind!r}")
        return t

    def describe(self) -> str:
        place = "real" if self.place == "real" else f"{self.place}-adic"
        return f"{self.label} ({place} place)"


# -- continued fractions ---------------------------------------------------


def _cf_digits(x: Fraction, limit: int) -> list[int]:
    """Continued fraction digits of a rational, at most `limit` of them."""
    digits = []
    num, den = x.numerator, x.denominator
    while den != 0 and len(digits) < limit:
        a = num // den
        digits.append(a)
        num, den = den, num - a * den
    return digits


def _common_prefix(a: list[int], b: list[int]) -> list[int]:
    out = []
    for x, y in zip(a, b):
        if x != y:
            break
        out.append(x)
    return out


def convergents(target: TargetPoint, count: int) -> list[ProjectivePoint]:
    """First `count` continued fraction convergents of an irrational target.

    The digits are extracted from exact rational enclosures: digits shared
    by both endpoints' continued fractions, minus the last one (shared-digit
    runs can disagree with the true expansion only in their final digit),
    are provably digits of the target.  Precision doubles until enough
    digits are certified; rational targets are rejected since their
    expansion terminates and the exponent story is different.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if target.is_rational:
        raise ValueError(
            "convergents need an irrational target; rational targets "
            "terminate and carry no approximation exponent"
        )
    if target.place != "real":
        raise ValueError("continued fractions live at the real place")
    bits = 64
    while bits <= MAX_BITS:
        box = target.affine_enclosure(bits)
        lo_d = _cf_digits(box.lo, count + 2)
        hi_d = _cf_digits(box.hi, count + 2)
        certified = _common_prefix(lo_d, hi_d)[:-1]
        if len(certified) >= count:
            return _build_convergents(certified[:count])
        bits *= 2
    raise PrecisionExhausted(
        f"could not certify {count} continued fraction digits within "
        f"{MAX_BITS} bits"
    )


def _build_convergents(digits: list[int]) -> list[ProjectivePoint]:
    p_prev, q_prev = 1, 0
    p_cur, q_cur = digits[0], 1
    out = [ProjectivePoint((p_cur, q_cur))]
    for a in digits[1:]:
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
        out.append(ProjectivePoint((p_cur, q_cur)))
    return out
