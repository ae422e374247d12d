import json
import math
import os
import subprocess
import sys
from fractions import Fraction

import pytest

import oracles
from alphammp.intervals import floor_neg_log2
from alphammp.lab import (
    CSV_HEADER,
    GAMMA_GOAL,
    ApproxSample,
    distance,
    enumerate_p1,
    estimate_alpha_point,
    estimate_alpha_sequence,
    height,
    sample_point,
)
from alphammp.targets import (
    PrecisionExhausted,
    ProjectivePoint,
    TargetPoint,
    convergents,
)


# -- heights and distances --------------------------------------------------


def test_height_degrees():
    p = ProjectivePoint((3, -5))
    assert height(p) == 5
    assert height(p, 2) == 25
    with pytest.raises(ValueError):
        height(p, 0)


def test_distance_real_rational_examples():
    inf = TargetPoint.rational((1, 0))
    d = distance(inf, ProjectivePoint((1, 1)))
    assert d.lo == d.hi == 1

    two = TargetPoint.from_fraction("2/1")
    d = distance(two, ProjectivePoint((81, 40)))
    assert d.lo == d.hi == Fraction(1, 162)

    d0 = distance(two, ProjectivePoint((2, 1)))
    assert d0.lo == d0.hi == 0


def test_distance_padic_example():
    t = TargetPoint.rational((1, 0), place=7)
    d = distance(t, ProjectivePoint((50, 49)))
    assert d.lo == d.hi == Fraction(1, 49)
    # p-adic scale invariance: the same point scaled by p
    d2 = distance(t, ProjectivePoint((50 * 7, 49 * 7)))
    assert d2.lo == Fraction(1, 49)


def test_distance_padic_matches_direct_formula():
    t = TargetPoint.from_fraction("3/4", place=5)
    x = ProjectivePoint((7, 9))
    d = distance(t, x)
    cross = oracles.padic_abs(Fraction(3 * 9 - 4 * 7), 5)
    den = max(oracles.padic_abs(Fraction(3), 5), oracles.padic_abs(Fraction(4), 5)) * max(
        oracles.padic_abs(Fraction(7), 5), oracles.padic_abs(Fraction(9), 5))
    assert d.lo == cross / den


def test_distance_algebraic_brackets_float():
    t = TargetPoint.sqrt(2)
    x = ProjectivePoint((7, 5))
    d = distance(t, x, bits=80)
    true = abs(math.sqrt(2) * 5 - 7) / (math.sqrt(2) * 7)
    assert d.lo <= Fraction(true).limit_denominator(10**10) + Fraction(1, 10**9)
    assert d.hi >= Fraction(true).limit_denominator(10**10) - Fraction(1, 10**9)
    assert d.width < Fraction(1, 2**60)


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        distance(TargetPoint.rational((1, 2, 3)), ProjectivePoint((1, 1)))


def test_distance_is_at_most_two_on_samples():
    # |p_i x_j - p_j x_i| <= 2 max|p| max|x| gives the global bound
    t = TargetPoint.sqrt(2)
    for x in enumerate_p1(12):
        d = distance(t, x, bits=96)
        assert d.lo <= 2


# -- single samples ------------------------------------------------------


def test_sample_point_exact_hit():
    t = TargetPoint.from_fraction("2/5")
    s = sample_point(t, ProjectivePoint((2, 5)))
    assert s.exact_hit and s.gamma is None


def test_sample_point_gamma_matches_logs():
    t = TargetPoint.rational((1, 3))
    s = sample_point(t, ProjectivePoint((1, 2)))
    assert s.dist.lo == s.dist.hi == Fraction(1, 6)
    assert s.gamma is not None and s.gamma.width < GAMMA_GOAL
    want = math.log(2) / math.log(6)
    assert abs(float(s.gamma.mid) - want) < 1e-6


def test_sample_point_far_point_has_no_gamma():
    t = TargetPoint.rational((1, 0))
    s = sample_point(t, ProjectivePoint((0, 1)))
    assert s.dist.lo >= 1 and s.gamma is None


def test_sample_point_raises_on_unresolvable_tie():
    # a computable target equal to 1/3: the distance to (1, 3) straddles 0
    # at every precision and no gamma can ever certify
    def approx(bits):
        pad = Fraction(1, 2 ** (bits + 1))
        return Fraction(1, 3) - pad, Fraction(1, 3) + pad

    t = TargetPoint("computable", approx=approx)
    with pytest.raises(PrecisionExhausted):
        sample_point(t, ProjectivePoint((1, 3)))


def test_enclosure_contract_enforced():
    t = TargetPoint("computable", approx=lambda bits: (Fraction(0), Fraction(1, 2)))
    with pytest.raises(PrecisionExhausted, match="width"):
        t.affine_enclosure(10)


def test_csv_row_shape():
    t = TargetPoint.rational((1, 3))
    s = sample_point(t, ProjectivePoint((1, 2)))
    row = s.csv_row().split(",")
    assert len(row) == len(CSV_HEADER.split(","))
    assert row[0] == "2"
    assert float(row[1]) <= 1 / 6 <= float(row[2])
    assert float(row[3]) <= float(row[4])


# -- enumeration ------------------------------------------------------------


def test_enumerate_p1_first_shell_order():
    got = list(enumerate_p1(1))
    assert [p.coords for p in got] == [(1, 0), (0, 1), (1, 1), (1, -1)]


def test_enumerate_p1_matches_brute_force():
    for bound in (1, 2, 3, 10, 25):
        got = [p.coords for p in enumerate_p1(bound)]
        assert len(got) == len(set(got)), "duplicates"
        assert set(got) == oracles.p1_points_brute(bound)


def test_enumerate_p1_shell_sizes():
    def phi(n):
        return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)

    total = len(list(enumerate_p1(30)))
    assert total == 4 + sum(4 * phi(n) for n in range(2, 31))


# -- sequence estimator ----------------------------------------------------


def test_sequence_estimate_sqrt2_convergents():
    t = TargetPoint.sqrt(2)
    est = estimate_alpha_sequence(t, convergents(t, 15), window=10)
    assert est.verdict == "estimate" and est.converged
    assert Fraction(2, 5) < est.alpha_hat_mid < Fraction(3, 5)
    assert est.alpha_hat.width < GAMMA_GOAL * 2


def test_sequence_estimate_liouville_partial_sum_gammas():
    t = TargetPoint.liouville(10)
    pts = []
    s = Fraction(0)
    for n in range(1, 6):
        s += Fraction(1, 10**math.factorial(n))
        pts.append(ProjectivePoint((s.numerator, s.denominator)))
    est = estimate_alpha_sequence(t, pts, window=3)
    gammas = [x.gamma for x in est.samples]
    assert all(g is not None for g in gammas)
    for n, g in enumerate(gammas, start=1):
        assert abs(float(g.mid) - 1 / (n + 1)) < 0.01


def test_sequence_estimate_nonconvergent():
    # fill the whole trailing window with bad points so the record low
    # falls outside it
    t = TargetPoint.sqrt(2)
    bad = [ProjectivePoint((n, 1)) for n in (3, 4, 5, 7)]
    pts = convergents(t, 8) + bad
    est = estimate_alpha_sequence(t, pts, window=4)
    assert not est.converged
    assert est.verdict == "nonconvergent"
    assert est.alpha_hat is None
    assert est.to_json()["alpha_hat"] == "inf"


def test_sequence_estimate_empty_rejected():
    with pytest.raises(ValueError):
        estimate_alpha_sequence(TargetPoint.sqrt(2), [])


# -- point estimator -------------------------------------------------------


def test_point_estimate_rational_trend_near_one():
    est = estimate_alpha_point(TargetPoint.from_fraction("2/1"), 400)
    assert est.verdict == "estimate"
    assert est.trend is not None and est.trend.contains(Fraction(1))
    assert est.trend.width < Fraction(1, 10**6)


def test_point_estimate_sqrt2_structure():
    est = estimate_alpha_point(TargetPoint.sqrt(2), 200)
    assert est.verdict == "estimate"
    assert Fraction(3, 10) < est.trend_mid < Fraction(3, 5)
    indices = [b.index for b in est.bins]
    assert indices == sorted(indices) and len(set(indices)) == len(indices)
    for b in est.bins:
        assert floor_neg_log2(b.representative.dist.hi) == b.index
        assert b.population >= 1
    # representatives are record-setters: deeper bin, smaller distance
    reps = [b.representative.dist.hi for b in est.bins]
    assert all(y < x for x, y in zip(reps, reps[1:]))


def test_point_estimate_insufficient_depth():
    est = estimate_alpha_point(TargetPoint.sqrt(2), 1)
    assert est.verdict == "insufficient-depth"
    assert est.trend is None


def test_point_estimate_rejects_higher_dim_targets():
    with pytest.raises(ValueError):
        estimate_alpha_point(TargetPoint.rational((1, 2, 3)), 50)


def test_point_estimate_thread_determinism():
    script = (
        "import json\n"
        "from alphammp.lab import estimate_alpha_point\n"
        "from alphammp.targets import TargetPoint\n"
        "est = estimate_alpha_point(TargetPoint.sqrt(2), 120)\n"
        "print(json.dumps(est.to_json(), sort_keys=True))\n"
    )
    outs = []
    for threads in ("1", "4"):
        env = dict(os.environ, ALPHAMMP_THREADS=threads)
        r = subprocess.run([sys.executable, "-c", script], env=env,
                           capture_output=True, text=True, check=True)
        outs.append(r.stdout)
    assert outs[0] == outs[1]


def test_point_estimate_json_round():
    est = estimate_alpha_point(TargetPoint.from_fraction("2/1"), 60)
    j = est.to_json()
    assert j["kind"] == "point_estimate"
    assert j["height_bound"] == 60
    json.dumps(j)  # serializable
    lines = est.csv_lines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == len(est.bins) + 1
