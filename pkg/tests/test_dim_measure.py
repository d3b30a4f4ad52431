from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from defreg.counting import definable_set
from defreg.dim_measure import (
    classify_parameters,
    estimate_dim_measure,
    group_count_signatures,
    simplest_in_interval,
    snap_rational,
)
from defreg.errors import DefregError, EstimationError
from defreg.field import make_field

FIELDS = [make_field(p) for p in (11, 13, 17, 19)]


def test_snap_examples():
    assert snap_rational(0.5002, 64) == Fraction(1, 2)
    assert snap_rational(0.3333, 64) == Fraction(1, 3)
    assert snap_rational(0.2498, 4) == Fraction(1, 4)


@given(st.integers(1, 64).flatmap(lambda d: st.tuples(st.integers(0, 3 * d), st.just(d))))
def test_snap_idempotent_on_small_rationals(nd):
    n, d = nd
    mu = Fraction(n, d)
    assert snap_rational(mu, 64) == mu


def test_snap_tie_breaks_to_smaller_denominator():
    # 5/12 is equidistant from 1/3 and 1/2; the tie goes to the smaller denominator
    assert snap_rational(Fraction(5, 12), 3) == Fraction(1, 3)


def brute_simplest(lo: Fraction, hi: Fraction, max_den: int):
    for den in range(1, max_den + 1):
        for num in range(int(lo * den) - 1, int(hi * den) + 2):
            v = Fraction(num, den)
            if lo <= v <= hi:
                return v
    return None


@given(
    st.fractions(min_value=0, max_value=4, max_denominator=200),
    st.fractions(min_value=0, max_value=2, max_denominator=200),
    st.integers(1, 32),
)
def test_simplest_in_interval_matches_enumeration(lo, width, max_den):
    hi = lo + width
    assert simplest_in_interval(lo, hi, max_den) == brute_simplest(lo, hi, max_den)


def test_estimate_exact_line():
    dm = estimate_dim_measure([(11, 11), (13, 13), (17, 17), (19, 19)], n_max=2)
    assert (dm.dim, dm.measure) == (1, Fraction(1))
    assert dm.fit_residual == 0.0
    assert dm.field_count == 4


def test_estimate_half_measure():
    dm = estimate_dim_measure([(11, 6), (13, 7), (17, 9), (19, 10)], n_max=1)
    assert (dm.dim, dm.measure) == (1, Fraction(1, 2))
    assert dm.fit_residual <= 1.0


def test_estimate_empty_marker():
    dm = estimate_dim_measure([(11, 0), (13, 0), (17, 0)], n_max=1)
    assert dm.is_empty
    assert dm.measure is None


def test_estimate_requires_three_fields():
    with pytest.raises(EstimationError):
        estimate_dim_measure([(11, 5), (13, 6)], n_max=1)


def test_estimate_rejects_inconsistent_counts():
    with pytest.raises(EstimationError):
        estimate_dim_measure([(11, 1), (13, 80), (17, 2)], n_max=1)


def test_estimate_constant_count():
    dm = estimate_dim_measure([(11, 1), (13, 1), (17, 1)], n_max=1)
    assert (dm.dim, dm.measure) == (0, Fraction(1))


def test_scaling_sanity_larger_family_keeps_invariant():
    base = [(q, (q + 1) // 2) for q in (11, 13, 17, 19)]
    more = base + [(q, (q + 1) // 2) for q in (23, 29, 31, 37, 41)]
    a = estimate_dim_measure(base, n_max=1)
    b = estimate_dim_measure(more, n_max=1)
    assert (a.dim, a.measure) == (b.dim, b.measure) == (1, Fraction(1, 2))


def test_group_signatures_separates_paley_diagonal():
    sigs = [(13, 2), (13, 3), (13, 6), (17, 3), (17, 4), (17, 8), (29, 6), (29, 7), (29, 14)]
    groups = group_count_signatures(sigs, n_max=1)
    by_label = {g.invariant.label(): set(g.signatures) for g in groups}
    assert by_label["(1, 1/4)"] == {(13, 2), (13, 3), (17, 3), (17, 4), (29, 6), (29, 7)}
    assert by_label["(1, 1/2)"] == {(13, 6), (17, 8), (29, 14)}


def test_group_signatures_zero_class():
    groups = group_count_signatures([(11, 0), (13, 0), (11, 5)], n_max=1)
    assert any(g.invariant.is_empty and g.signatures == [(11, 0), (13, 0)] for g in groups)


def test_classify_square_class_fiber():
    S = definable_set("E z. (z*z = x*y & !(x*y = 0))", ["x"], ["y"])
    classes = classify_parameters(S, FIELDS)
    assert len(classes) == 2
    big, empty = classes
    assert big.invariant.label() == "(1, 1/2)"
    assert empty.invariant.is_empty
    for F in FIELDS:
        fd = F.descriptor()
        assert big.size(fd) == F.q - 1  # both square classes merge
        assert empty.members[fd] == [(0,)]
    assert big.uniform and empty.uniform


def test_classify_reciprocal():
    S = definable_set("y*x = 1", ["x"], ["y"])
    classes = classify_parameters(S, FIELDS)
    assert [c.invariant.label() for c in classes] == ["(0, 1)", "empty"]
    for F in FIELDS:
        assert classes[0].size(F.descriptor()) == F.q - 1


def test_classify_is_partition():
    S = definable_set("E z. (z*z = x*y & !(x*y = 0))", ["x"], ["y"])
    classes = classify_parameters(S, FIELDS)
    for F in FIELDS:
        fd = F.descriptor()
        seen = [t for c in classes for t in c.members.get(fd, [])]
        assert len(seen) == len(set(seen)) == F.q


def test_classify_requires_parameters():
    S = definable_set("x = x", ["x"])
    with pytest.raises(DefregError):
        classify_parameters(S, FIELDS)


def test_classify_flags_nonuniform_classes():
    # solvable iff -1 is a square: parameters behave differently by p mod 4
    S = definable_set("x*x = 0 - 1 & y = y", ["x"], ["y"])
    fields = [make_field(p) for p in (11, 13, 17, 19)]
    classes = classify_parameters(S, fields)
    assert any(not c.uniform for c in classes)
