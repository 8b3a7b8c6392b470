import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqlab.errors import (CannotSampleError, MalformedIntervalError,
                          UndefinedDensityError)
from dqlab.intervals import (Interval, IntervalSet, complement_in, density,
                             density_profile, difference, fat_cantor,
                             intersect, minus_points, normalize, rat, rat_str,
                             sample_points, union)

UNIT = Interval(F(0), F(1))


def iset(*pairs):
    return normalize([Interval(rat(a), rat(b)) for a, b in pairs])


# -- canonical form ----------------------------------------------------------


def test_normalize_merges_overlaps_and_adjacency():
    s = iset((0, "1/2"), ("1/4", "2/3"))
    assert [(iv.lo, iv.hi) for iv in s.intervals] == [(F(0), F(2, 3))]
    t = iset((0, "1/2"), ("1/2", 1))
    assert [(iv.lo, iv.hi) for iv in t.intervals] == [(F(0), F(1))]


def test_normalize_drops_degenerate_intervals():
    s = normalize([Interval(F(1, 3), F(1, 3)), Interval(F(0), F(1, 4))])
    assert s.measure() == F(1, 4)


def test_normalize_is_idempotent():
    s = iset((0, "1/3"), ("1/2", "3/4"))
    assert normalize(list(s.intervals)) == s


def test_malformed_interval_reports_index():
    bad = object.__new__(Interval)
    object.__setattr__(bad, "lo", F(3, 4))
    object.__setattr__(bad, "hi", F(1, 2))
    with pytest.raises(MalformedIntervalError) as ei:
        normalize([Interval(F(0), F(1)), bad])
    assert ei.value.index == 1


# -- measure and algebra -----------------------------------------------------


def test_measure_is_sum_of_lengths():
    assert iset((0, "1/4"), ("1/2", 1)).measure() == F(3, 4)


def test_union_intersect_complement_small_cases():
    a = iset((0, "1/2"))
    b = iset(("1/4", "3/4"))
    assert union(a, b).measure() == F(3, 4)
    assert intersect(a, b).measure() == F(1, 4)
    assert complement_in(a, UNIT).measure() == F(1, 2)
    assert difference(a, b).measure() == F(1, 4)


def test_complement_is_involutive_on_measure():
    a = iset((0, "1/3"), ("2/5", "9/10"))
    c = complement_in(complement_in(a, UNIT), UNIT)
    assert c.measure() == a.measure()
    assert c.intervals == a.intervals


rational = st.fractions(min_value=0, max_value=1, max_denominator=64)


@st.composite
def interval_sets(draw):
    pts = sorted(draw(st.lists(rational, min_size=2, max_size=8)))
    ivs = [Interval(a, b) for a, b in zip(pts[::2], pts[1::2]) if a < b]
    return normalize(ivs) if ivs else iset((0, "1/8"))


@given(interval_sets(), interval_sets())
@settings(max_examples=200, deadline=None)
def test_inclusion_exclusion_exact(a, b):
    assert (union(a, b).measure() + intersect(a, b).measure()
            == a.measure() + b.measure())


@given(interval_sets(), interval_sets())
@settings(max_examples=200, deadline=None)
def test_union_and_intersection_commute(a, b):
    assert union(a, b) == union(b, a)
    assert intersect(a, b) == intersect(b, a)


@given(interval_sets())
@settings(max_examples=200, deadline=None)
def test_de_morgan_on_measure(a):
    comp = complement_in(a, UNIT)
    clipped = intersect(a, IntervalSet((UNIT,)))
    assert comp.measure() + clipped.measure() == 1


@given(interval_sets(), interval_sets())
@settings(max_examples=200, deadline=None)
def test_difference_measure_law(a, b):
    assert difference(a, b).measure() == a.measure() - intersect(a, b).measure()


# -- fat Cantor set ----------------------------------------------------------


@pytest.mark.parametrize("depth,measure", [
    (0, F(1)),
    (1, F(3, 4)),
    (2, F(5, 8)),
    (10, F(1, 2) + F(1, 2**11)),
])
def test_fat_cantor_measure(depth, measure):
    assert fat_cantor(depth).measure() == measure


def test_fat_cantor_is_nowhere_dense_like():
    s = fat_cantor(4)
    assert len(s.intervals) == 16
    assert all(iv.width == s.intervals[0].width for iv in s.intervals)
    assert s.hull() == UNIT


# -- density -----------------------------------------------------------------


def test_density_values():
    a = iset((0, "1/2"))
    assert density(a, IntervalSet((UNIT,))) == F(1, 2)
    with pytest.raises(UndefinedDensityError):
        density(a, IntervalSet(()))


def test_density_profile_clips_to_unit_and_decreases_radii():
    s = fat_cantor(6)
    x = s.intervals[0].mid
    radii = [F(1, 2**k) for k in range(4, 11)]
    prof = density_profile(s, x, radii)
    assert prof.final_density == 1
    assert list(prof.radii) == radii
    with pytest.raises(ValueError):
        density_profile(s, x, [F(1, 4), F(1, 2)])


# -- sampling and punctures --------------------------------------------------


def test_sample_points_deterministic_and_inside():
    s = fat_cantor(5)
    p1 = sample_points(s, 50, seed=9)
    p2 = sample_points(s, 50, seed=9)
    assert p1 == p2
    assert all(s.contains(x) for x in p1)
    assert p1 != sample_points(s, 50, seed=10)


def test_sampling_null_set_fails():
    with pytest.raises(CannotSampleError):
        sample_points(IntervalSet(()), 3, seed=0)


def test_minus_points_keeps_measure_and_membership():
    s = iset((0, 1))
    t = minus_points(s, [F(1, 3), F(1, 2), F(7)])
    assert t.measure() == 1
    assert not t.contains(F(1, 3))
    assert t.contains(F(1, 4))
    resampled = sample_points(t, 200, seed=4)
    assert F(1, 3) not in resampled


def test_complement_drops_punctures():
    s = minus_points(iset((0, "1/2")), [F(1, 4)])
    c = complement_in(s, UNIT)
    assert c.measure() == F(1, 2)
    assert not c.contains(F(1, 4))


# -- parsing and serialization -----------------------------------------------


def test_rat_parses_strings_and_refuses_floats():
    assert rat("3/7") == F(3, 7)
    assert rat(2) == F(2)
    assert rat_str(F(-1, 3)) == "-1/3"
    with pytest.raises(TypeError):
        rat(0.5)


def test_json_roundtrip():
    s = minus_points(iset((0, "1/3"), ("1/2", 1)), [F(2, 3)])
    blob = json.dumps(s.to_json())
    back = IntervalSet.from_json(json.loads(blob))
    assert back == s
