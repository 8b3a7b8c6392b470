from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqlab.enclosure import (PI_HI, PI_LO, Enclosure, cos_pi, pi_enclosure,
                             sin_cos_pi, sin_cos_scaled, sin_pi, tan_of)

rational = st.fractions(min_value=-4, max_value=4, max_denominator=256)


def encl(lo, hi):
    return Enclosure(F(lo), F(hi))


def test_exact_enclosure_properties():
    e = Enclosure.exact(F(2, 3))
    assert e.is_exact and e.width == 0 and e.mid == F(2, 3)
    assert e.contains(F(2, 3)) and not e.contains(F(1, 3))


def test_ordering_validated():
    with pytest.raises(ValueError):
        encl(1, 0)


@given(rational, rational, rational, rational)
@settings(max_examples=300, deadline=None)
def test_arithmetic_containment(a, b, c, d):
    lo1, hi1 = min(a, b), max(a, b)
    lo2, hi2 = min(c, d), max(c, d)
    e1, e2 = encl(lo1, hi1), encl(lo2, hi2)
    x, y = (lo1 + hi1) / 2, (lo2 + hi2) / 2
    assert (e1 + e2).contains(x + y)
    assert (e1 - e2).contains(x - y)
    assert (e1 * e2).contains(x * y)
    if not e2.contains(F(0)):
        assert (e1 / e2).contains(x / y)
    assert e1.abs().contains(abs(x))
    assert (-e1).contains(-x)


def test_distance_and_disjointness():
    a, b = encl(0, 1), encl(2, 3)
    assert a.disjoint_from(b)
    assert a.distance_to(b) == 1
    assert a.distance_to(encl("1/2", 2)) == 0


def test_pi_bounds_are_tight_and_ordered():
    assert PI_LO < PI_HI
    assert F(31415926, 10**7) < PI_LO and PI_HI < F(31415927, 10**7)
    assert PI_HI - PI_LO < F(1, 2**300)
    p = pi_enclosure(96)
    assert p.lo <= PI_LO and PI_HI <= p.hi or p.width < F(1, 2**100)


@pytest.mark.parametrize("q,sin_v,cos_v", [
    (F(0), F(0), F(1)),
    (F(1, 2), F(1), F(0)),
    (F(1), F(0), F(-1)),
    (F(-1, 2), F(-1), F(0)),
    (F(5, 2), F(1), F(0)),
    (F(2), F(0), F(1)),
])
def test_trig_exact_at_quarter_periods(q, sin_v, cos_v):
    assert sin_pi(q).is_exact and sin_pi(q).lo == sin_v
    assert cos_pi(q).is_exact and cos_pi(q).lo == cos_v


def test_trig_known_values_within_pad():
    # sin(pi/6) = 1/2, cos(pi/3) = 1/2
    assert sin_pi(F(1, 6), 96).contains(F(1, 2))
    assert cos_pi(F(1, 3), 96).contains(F(1, 2))
    assert sin_pi(F(1, 6), 96).width <= F(1, 2**110)


@given(st.fractions(min_value=-3, max_value=3, max_denominator=997))
@settings(max_examples=150, deadline=None)
def test_sin_cos_pair_matches_single_calls(q):
    s, c = sin_cos_pi(q, 80)
    assert not s.disjoint_from(sin_pi(q, 80))
    assert not c.disjoint_from(cos_pi(q, 80))
    # pythagorean identity up to enclosure width
    total = s * s + c * c
    assert total.contains(F(1))


@given(st.fractions(min_value=-3, max_value=3, max_denominator=997))
@settings(max_examples=150, deadline=None)
def test_scaled_trig_brackets_enclosures(q):
    qb = 96
    slo, shi, clo, chi = sin_cos_scaled(q, 80, qb)
    s, c = sin_cos_pi(q, 80)
    assert F(slo, 2**qb) <= s.lo and s.hi <= F(shi, 2**qb)
    assert F(clo, 2**qb) <= c.lo and c.hi <= F(chi, 2**qb)


def test_tan_enclosure():
    t = tan_of(F(1, 4), 96)
    # tan(1/4) = 0.25534192122...
    assert abs(t.mid - F(25534192122103627, 10**17)) < F(1, 10**12)
    assert t.width <= F(1, 2**110)
    assert tan_of(0).is_exact and tan_of(0).lo == 0
    with pytest.raises(ValueError):
        tan_of(F(3, 2))


def test_widening():
    e = encl(0, 1).widened(F(1, 8))
    assert e.lo == F(-1, 8) and e.hi == F(9, 8)
