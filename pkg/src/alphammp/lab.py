"""Numerical approximation lab: heights, distances, exponent estimators.

Distances follow the projective formula

    dist_v(P, x) = max_{i<j} |p_i x_j - p_j x_i|_v
                   / (max_i |p_i|_v * max_j |x_j|_v)

evaluated as an exact rational interval: exact at a p-adic place (rational
targets only) and via verified enclosures of the target's coordinates at
the real place.  The local exponent of a sample is

    gamma = d * log(height) / (-log dist),

well defined once dist < 1, and again carried as an interval.  A gamma is
only ever reported when its interval is narrower than 1/1000; precision
doubles until that holds.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .intervals import (
    RatInterval,
    floor_neg_log2,
    log_interval,
    max_interval,
)
from .rationals import frac_to_decimal_str
from .targets import MAX_BITS, PrecisionExhausted, ProjectivePoint, TargetPoint

GAMMA_GOAL = Fraction(1, 1000)
DEFAULT_WINDOW = 25
EXHAUSTIVE_LIMIT = 3000

CSV_HEADER = "height,dist_lo,dist_hi,gamma_lo,gamma_hi"


def height(x: ProjectivePoint, d: int = 1) -> int:
    """Multiplicative height (max |coordinate|)^d for degree-d polarization."""
    d = int(d)
    if d < 1:
        raise ValueError("degree must be a positive integer")
    return x.max_abs**d


def _padic_abs(r: Fraction, p: int) -> Fraction:
    if r == 0:
        return Fraction(0)
    v = 0
    num, den = r.numerator, r.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return Fraction(1, p**v) if v >= 0 else Fraction(p ** (-v))


def distance(target: TargetPoint, x: ProjectivePoint, bits: int = 64) -> RatInterval:
    """Rigorous interval around dist_v(target, x); exact when everything is
    rational."""
    tdim = target.point.dim if target.is_rational else 1
    if x.dim != tdim:
        raise ValueError(f"dimension mismatch: target P^{tdim}, point P^{x.dim}")

    if target.place != "real":
        p = target.place
        pc = target.point.coords
        num = Fraction(0)
        for i in range(len(pc)):
            for j in range(i + 1, len(pc)):
                num = max(num, _padic_abs(Fraction(pc[i] * x.coords[j] - pc[j] * x.coords[i]), p))
        den = max(_padic_abs(Fraction(c), p) for c in pc) * max(
            _padic_abs(Fraction(c), p) for c in x.coords
        )
        return RatInterval.point(num / den)

    coords = target.coords_enclosures(bits)
    minors = []
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            minors.append((coords[i].scale(x.coords[j]) - coords[j].scale(x.coords[i])).abs())
    num = max_interval(minors)
    den = max_interval(c.abs() for c in coords) * RatInterval.point(Fraction(x.max_abs))
    return num / den


@dataclass(frozen=True)
class ApproxSample:
    point: ProjectivePoint
    height: int
    dist: RatInterval
    gamma: Optional[RatInterval]  # None when dist >= 1 or the point is the target

    @property
    def exact_hit(self) -> bool:
        return self.dist.hi == 0

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "height": self.height,
            "dist": [str(self.dist.lo), str(self.dist.hi)],
            "gamma": None if self.gamma is None else [str(self.gamma.lo), str(self.gamma.hi)],
        }

    def csv_row(self) -> str:
        cells = [
            str(self.height),
            frac_to_decimal_str(self.dist.lo, rounding="floor"),
            frac_to_decimal_str(self.dist.hi, rounding="ceil"),
        ]
        if self.gamma is None:
            cells += ["", ""]
        else:
            cells += [
                frac_to_decimal_str(self.gamma.lo, rounding="floor"),
                frac_to_decimal_str(self.gamma.hi, rounding="ceil"),
            ]
        return ",".join(cells)


def _gamma_interval(h: int, dist: RatInterval, prec: int) -> RatInterval:
    num = log_interval(RatInterval.point(Fraction(h)), prec)
    den = -log_interval(dist, prec)
    return num / den


def sample_point(
    target: TargetPoint,
    x: ProjectivePoint,
    d: int = 1,
    goal: Fraction = GAMMA_GOAL,
    start_bits: int = 64,
) -> ApproxSample:
    """Distance plus (when defined) a gamma interval narrower than `goal`."""
    h = height(x, d)
    bits = start_bits
    while bits <= MAX_BITS:
        dist = distance(target, x, bits)
        if dist.hi == 0:
            return ApproxSample(x, h, dist, None)
        if dist.lo <= 0:
            bits *= 2
            continue
        if dist.lo >= 1:
            return ApproxSample(x, h, dist, None)
        if dist.hi >= 1:
            if dist.width == 0:
                return ApproxSample(x, h, dist, None)
            bits *= 2
            continue
        g = _gamma_interval(h, dist, max(bits, 64))
        if g.width < goal:
            return ApproxSample(x, h, dist, g)
        bits *= 2
    raise PrecisionExhausted(f"gamma for {x} did not stabilize within {MAX_BITS} bits")


# -- enumeration -------------------------------------------------------------


def enumerate_p1(bound: int) -> Iterator[ProjectivePoint]:
    """All points of P^1(Q) with max |coordinate| <= bound, in deterministic
    shell order (shell n holds the points of height exactly n; shell n has
    4*phi(n) points, counting the four degenerate ones into shell 1)."""
    bound = int(bound)
    if bound < 1:
        raise ValueError("bound must be at least 1")
    yield ProjectivePoint((1, 0))
    yield ProjectivePoint((0, 1))
    yield ProjectivePoint((1, 1))
    yield ProjectivePoint((1, -1))
    for n in range(2, bound + 1):
        for k in range(1, n):
            if math.gcd(k, n) == 1:
                yield ProjectivePoint((n, k))
                yield ProjectivePoint((n, -k))
                yield ProjectivePoint((k, n))
                yield ProjectivePoint((k, -n))


# -- sequence estimator -------------------------------------------------------


@dataclass(frozen=True)
class SequenceEstimate:
    samples: tuple[ApproxSample, ...]
    window: int
    converged: bool
    verdict: str  # "estimate" or "nonconvergent"
    alpha_hat: Optional[RatInterval]

    @property
    def alpha_hat_mid(self) -> Optional[Fraction]:
        return None if self.alpha_hat is None else self.alpha_hat.mid

    def to_json(self) -> dict:
        return {
            "kind": "sequence_estimate",
            "window": self.window,
            "converged": self.converged,
            "verdict": self.verdict,
            "alpha_hat": (
                "inf"
                if self.alpha_hat is None
                else [str(self.alpha_hat.lo), str(self.alpha_hat.hi)]
            ),
            "samples": [s.to_json() for s in self.samples],
        }

    def csv_lines(self) -> list[str]:
        return [CSV_HEADER] + [s.csv_row() for s in self.samples]


def estimate_alpha_sequence(
    target: TargetPoint,
    points: list[ProjectivePoint],
    d: int = 1,
    window: int = DEFAULT_WINDOW,
    goal: Fraction = GAMMA_GOAL,
) -> SequenceEstimate:
    """Window-max exponent estimate along a user-supplied point sequence.

    The sequence is declared convergent when its record-low distance is
    achieved inside the trailing window; otherwise the approximation
    exponent along it is infinite (verdict "nonconvergent") and no finite
    alpha_hat is reported.
    """
    if window < 1:
        raise ValueError("window must be positive")
    if len(points) < 2:
        raise ValueError("need at least two sample points")
    if len(set(p.coords for p in points)) != len(points):
        raise ValueError("sample points must be distinct")

    samples = tuple(sample_point(target, x, d, goal) for x in points)

    live = [s for s in samples if not s.exact_hit]
    if not live:
        raise ValueError("every sample point equals the target")
    lows = [s.dist.hi for s in live]
    best = min(lows)
    last_argmin = max(i for i, v in enumerate(lows) if v == best)
    w = min(window, len(live))
    converged = last_argmin >= len(live) - w

    if not converged:
        return SequenceEstimate(samples, window, False, "nonconvergent", None)

    tail = [s.gamma for s in live[-w:] if s.gamma is not None]
    if not tail:
        raise ValueError("no usable gamma in the trailing window (all dist >= 1)")
    alpha_hat = RatInterval(max(g.lo for g in tail), max(g.hi for g in tail))
    return SequenceEstimate(samples, window, True, "estimate", alpha_hat)


# -- point estimator ----------------------------------------------------------


@dataclass(frozen=True)
class BinRecord:
    index: int  # floor(-log2 dist) depth of the bin
    representative: ApproxSample  # minimal-gamma frontier sample of the bin
    population: int

    def to_json(self) -> dict:
        return {
            "bin": self.index,
            "population": self.population,
            "representative": self.representative.to_json(),
        }


@dataclass(frozen=True)
class PointEstimate:
    target: str
    height_bound: int
    degree: int
    bins: tuple[BinRecord, ...]
    trend: Optional[RatInterval]
    scanned: int
    verdict: str  # "estimate" or "insufficient-depth"

    @property
    def trend_mid(self) -> Optional[Fraction]:
        return None if self.trend is None else self.trend.mid

    def to_json(self) -> dict:
        return {
            "kind": "point_estimate",
            "target": self.target,
            "height_bound": self.height_bound,
            "degree": self.degree,
            "scanned": self.scanned,
            "verdict": self.verdict,
            "trend": None if self.trend is None else [str(self.trend.lo), str(self.trend.hi)],
            "bins": [b.to_json() for b in self.bins],
        }

    def csv_lines(self) -> list[str]:
        return [CSV_HEADER] + [b.representative.csv_row() for b in self.bins]


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ALPHAMMP_THREADS", "1")))
    except ValueError:
        return 1


def _chunked(seq, size):
    for i in range(0, len(seq), size):
        yield seq[i : i + size]


def _candidate_points(target: TargetPoint, bound: int, bits: int) -> list[ProjectivePoint]:
    """Candidate best approximants.

    Real-place P^1 targets admit the classical shortcut: for each
    denominator q only the integers adjacent to q*theta can be closest, so
    the scan is linear in the bound.  Anything else falls back to full
    enumeration, which is only allowed for small bounds.
    """
    if target.place == "real":
        theta = target.affine_enclosure(bits)
        seen = set()
        out = []
        for q in range(1, bound + 1):
            lo = math.floor(theta.lo * q)
            hi = math.floor(theta.hi * q)
            for p in range(lo, hi + 2):
                if abs(p) > bound:
                    continue
                pt = ProjectivePoint((p, q))
                if pt.coords not in seen:
                    seen.add(pt.coords)
                    out.append(pt)
        return out
    if bound > EXHAUSTIVE_LIMIT:
        raise ValueError(
            f"exhaustive enumeration capped at height {EXHAUSTIVE_LIMIT} "
            "(the adjacent-integer shortcut needs the real place)"
        )
    return list(enumerate_p1(bound))


def estimate_alpha_point(
    target: TargetPoint,
    height_bound: int,
    d: int = 1,
    goal: Fraction = GAMMA_GOAL,
    enclosure_bits: int = 192,
) -> PointEstimate:
    """Binned exponent scan below a height bound.

    Samples are grouped into unit-width bins of -log2(dist).  Within each
    bin only the height/distance Pareto frontier can matter, so gammas are
    computed for frontier members alone; the bin's representative is its
    smallest gamma.  The headline `trend` is the least-squares slope of
    d*log(height) against -log(dist) over the representatives of the
    deepest half of the bins, as an interval.
    """
    if height_bound < 1:
        raise ValueError("height bound must be at least 1")
    if not target.is_rational and target.place != "real":
        raise ValueError("non-rational targets live at the real place")
    tdim = target.point.dim if target.is_rational else 1
    if tdim != 1:
        raise ValueError("the point estimator works on P^1")

    cands = _candidate_points(target, height_bound, enclosure_bits)

    def scan(chunk):
        rows = []
        for x in chunk:
            dist = distance(target, x, enclosure_bits)
            if dist.hi == 0 or dist.lo <= 0 or dist.hi >= 1:
                continue
            rows.append((x, height(x, d), dist))
        return rows

    threads = _thread_count()
    if threads > 1 and len(cands) > 4 * threads:
        size = (len(cands) + threads - 1) // threads
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(scan, list(_chunked(cands, size))))
        rows = [r for part in parts for r in part]
    else:
        rows = scan(cands)

    bins: dict[int, list] = {}
    for x, h, dist in rows:
        bins.setdefault(floor_neg_log2(dist.hi), []).append((x, h, dist))

    records = []
    for idx in sorted(bins):
        group = sorted(bins[idx], key=lambda r: (r[1], r[2].hi, r[0].coords))
        frontier = []
        best = None
        for x, h, dist in group:
            if best is None or dist.hi < best:
                frontier.append((x, h, dist))
                best = dist.hi
        reps = [
            ApproxSample(x, h, dist, _adaptive_gamma(target, x, h, dist, goal))
            for x, h, dist in frontier
        ]
        reps = [r for r in reps if r.gamma is not None]
        if not reps:
            continue
        rep = min(reps, key=lambda s: (s.gamma.hi, s.gamma.lo, s.point.coords))
        records.append(BinRecord(idx, rep, len(group)))

    trend = None
    verdict = "insufficient-depth"
    if len(records) >= 2:
        deep = records[len(records) // 2 :]
        if len(deep) >= 2:
            trend = _trend_slope(deep, prec=256)
            verdict = "estimate"
    return PointEstimate(
        target.describe(), height_bound, d, tuple(records), trend, len(cands), verdict
    )


def _adaptive_gamma(
    target: TargetPoint, x: ProjectivePoint, h: int, dist: RatInterval, goal: Fraction
) -> Optional[RatInterval]:
    bits = 64
    while bits <= MAX_BITS:
        if dist.lo <= 0 or dist.hi >= 1:
            return None
        g = _gamma_interval(h, dist, bits)
        if g.width < goal:
            return g
        bits *= 2
        if dist.width > 0:
            dist = distance(target, x, bits)
    raise PrecisionExhausted(f"gamma for {x} did not stabilize")


def _trend_slope(records: list[BinRecord], prec: int) -> RatInterval:
    ys = []
    zs = []
    for rec in records:
        s = rec.representative
        ys.append(log_interval(RatInterval.point(Fraction(s.height)), prec))
        zs.append(-log_interval(s.dist, prec))
    n = len(records)
    inv = Fraction(1, n)
    ybar = _isum(ys).scale(inv)
    zbar = _isum(zs).scale(inv)
    cov = _isum([(z - zbar) * (y - ybar) for y, z in zip(ys, zs)])
    var = _isum([(z - zbar) * (z - zbar) for z in zs])
    if not var.is_positive():
        raise ValueError("trend undefined: bin depths do not separate")
    return cov / var


def _isum(parts: list[RatInterval]) -> RatInterval:
    acc = RatInterval.point(Fraction(0))
    for p in parts:
        acc = acc + p
    return acc
