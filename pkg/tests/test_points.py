from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from alphammp.lattice import DivisorClass
from alphammp.points import INFINITY, BranchData, ExtendedRational, PointRecord


def test_extended_rational_basic():
    two = ExtendedRational.of(2)
    half = ExtendedRational.of("1/2")
    assert (two + half).value == Fraction(5, 2)
    assert two.scale(Fraction(1, 3)).value == Fraction(2, 3)
    assert not two.is_infinite
    assert INFINITY.is_infinite
    with pytest.raises(ValueError):
        _ = INFINITY.value


def test_infinity_absorbs():
    assert (INFINITY + ExtendedRational.of(7)).is_infinite
    assert INFINITY.scale(5).is_infinite
    assert ExtendedRational.of(3) < INFINITY
    assert not (INFINITY < INFINITY)
    assert INFINITY <= INFINITY


def test_extended_rational_format_parse():
    assert ExtendedRational.of("5/3").format() == "5/3"
    assert INFINITY.format() == "inf"
    assert ExtendedRational.parse("inf").is_infinite
    assert ExtendedRational.parse("-2/7").value == Fraction(-2, 7)


@given(st.fractions(), st.fractions())
def test_extended_rational_order_matches_fraction(p, q):
    a, b = ExtendedRational.of(p), ExtendedRational.of(q)
    assert (a < b) == (p < q)
    assert (a <= b) == (p <= q)


def test_branch_data_validation():
    b = BranchData(((0, 1), (2, 3)))
    assert b.branches == ((0, 1), (2, 3))
    with pytest.raises(ValueError):
        BranchData(((3, 1),))  # branch type outside {0, 1, 2}
    with pytest.raises(ValueError):
        BranchData(((1, 0),))  # nonpositive multiplicity
    with pytest.raises(ValueError):
        BranchData(())  # a present point has at least one branch


def test_point_record_defaults_and_lookup():
    p = PointRecord()
    assert p.incidences == ()
    assert not p.essentially_bounded
    assert p.v_adic_limit  # adelic-limit hypothesis is the default
    c = DivisorClass((1, -1))
    rec = PointRecord(incidences=((c, BranchData(((1, 2),))),))
    assert rec.branch_for(c).branches == ((1, 2),)
    assert rec.branch_for(DivisorClass((0, 1))) is None
    assert rec.classes() == (c,)


def test_point_record_json_roundtrip():
    c = DivisorClass((2, -1, 0))
    rec = PointRecord(
        incidences=((c, BranchData(((0, 1), (2, 1)))),),
        essentially_bounded=True,
        v_adic_limit=False,
    )
    again = PointRecord.from_json(rec.to_json())
    assert again.essentially_bounded == rec.essentially_bounded
    assert again.v_adic_limit == rec.v_adic_limit
    assert again.classes() == rec.classes()
    assert again.branch_for(c).branches == ((0, 1), (2, 1))


def test_point_record_rejects_duplicate_classes():
    c = DivisorClass((0, 1))
    with pytest.raises(ValueError):
        PointRecord(incidences=((c, BranchData(((0, 1),))),
                                (c, BranchData(((1, 1),)))))
