import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqlab.enclosure import Enclosure
from dqlab.errors import (AmbiguousDerivativeError, DiagonalError,
                          DomainError, SplitRequiredError)
from dqlab.intervals import Interval, IntervalSet, fat_cantor, normalize
from dqlab.piecewise import (CurveShape, Piece, PiecewiseFn, affine_conjugate,
                             classify_properties, deriv, dq, evaluate,
                             image_measure_bounds, is_c1, preimage,
                             slope_bounds, value_and_deriv)


def sin_unit():
    return PiecewiseFn((Piece.sin_half(0, 1, 0, 1),))


def two_arc():
    return PiecewiseFn((
        Piece.sin_half(0, "1/2", 0, "1/4"),
        Piece.sin_half("1/2", 1, "1/4", 1),
    ))


# -- construction guards -----------------------------------------------------


def test_contiguity_and_continuity_enforced():
    with pytest.raises(ValueError):
        PiecewiseFn((Piece.affine(0, 1, 0, 1), Piece.affine(2, 3, 1, 0)))
    with pytest.raises(ValueError):
        PiecewiseFn((Piece.affine(0, 1, 0, 1), Piece.affine(1, 2, "1/2", 0)))


def test_cos_full_endpoint_constraint():
    with pytest.raises(ValueError):
        Piece(Interval(F(0), F(1)), F(0), F(1), CurveShape.COS_FULL,
              height=F(1, 2), tilt=F(0))
    p = Piece.cos_full(0, 1, 0, "1/4")
    assert p.y_end == 0 and p.height == F(1, 4)


# -- evaluation --------------------------------------------------------------


def test_endpoint_values_exact():
    f = sin_unit()
    assert evaluate(f, 0).is_exact and evaluate(f, 0).lo == 0
    assert evaluate(f, 1).is_exact and evaluate(f, 1).lo == 1
    assert evaluate(f, F(1, 2)).is_exact and evaluate(f, F(1, 2)).lo == F(1, 2)


def test_value_monotone_on_sin_arc():
    f = sin_unit()
    xs = [F(k, 16) for k in range(17)]
    vals = [evaluate(f, x).mid for x in xs]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_domain_guard():
    with pytest.raises(DomainError):
        evaluate(sin_unit(), F(3, 2))


def test_deriv_exact_at_joins_and_ambiguity():
    assert deriv(two_arc(), F(1, 2)).is_exact
    assert deriv(two_arc(), F(1, 2)).lo == 0
    kinked = PiecewiseFn((Piece.affine(0, "1/2", 0, "1/4"),
                          Piece.affine("1/2", 1, "1/4", 1)))
    with pytest.raises(AmbiguousDerivativeError):
        deriv(kinked, F(1, 2))
    assert not is_c1(kinked)
    assert is_c1(two_arc())


def test_value_and_deriv_agrees_with_separate_calls():
    f = two_arc()
    for x in (F(1, 7), F(3, 8), F(1, 2), F(9, 11)):
        v, d = value_and_deriv(f, x)
        assert not v.disjoint_from(evaluate(f, x))
        assert not d.disjoint_from(deriv(f, x))


# -- difference quotients and the mean value theorem --------------------------


def test_dq_rejects_diagonal():
    with pytest.raises(DiagonalError):
        dq(sin_unit(), F(1, 3), F(1, 3))


def test_dq_symmetry():
    f = sin_unit()
    a = dq(f, F(1, 5), F(4, 5))
    b = dq(f, F(4, 5), F(1, 5))
    assert a.lo == b.lo and a.hi == b.hi


def test_mvt_containment_sampled():
    f = two_arc()
    region = normalize([f.domain])
    lo, hi = slope_bounds(f, region)
    rng = random.Random(5)
    for _ in range(300):
        x1 = F(rng.getrandbits(30), 2**30)
        x2 = F(rng.getrandbits(30), 2**30)
        if x1 == x2:
            continue
        q = dq(f, x1, x2)
        assert lo <= q.hi and q.lo <= hi


def test_slope_bounds_tight_for_pure_arc():
    f = sin_unit()
    lo, hi = slope_bounds(f, normalize([f.domain]))
    # slope peaks at pi/2 in the middle, vanishes at the ends
    assert lo <= 0 <= hi
    assert F(157, 100) < hi < F(158, 100)


# -- image measure -----------------------------------------------------------


def test_affine_image_is_exact():
    f = PiecewiseFn((Piece.affine(0, 1, 0, "1/2"),))
    s = fat_cantor(4)
    lo, hi = image_measure_bounds(f, s)
    assert lo == hi == s.measure() / 2


def test_monotone_arc_image_bracket():
    f = sin_unit()
    s = normalize([Interval(F(1, 4), F(1, 2))])
    lo, hi = image_measure_bounds(f, s)
    true = evaluate(f, F(1, 2)).mid - evaluate(f, F(1, 4)).mid
    assert lo <= true <= hi and lo > 0


def test_interior_extremum_requires_split():
    f = PiecewiseFn((Piece.cos_full(0, 1, 0, "1/4"),))
    with pytest.raises(SplitRequiredError):
        image_measure_bounds(f, normalize([Interval(F(1, 4), F(3, 4))]))


# -- preimage ----------------------------------------------------------------


def test_preimage_of_monotone_arc():
    pts, plat = preimage(sin_unit(), F(1, 2))
    assert plat.measure() == 0
    assert len(pts) == 1 and pts[0].is_exact and pts[0].lo == F(1, 2)


def test_preimage_finds_plateaus():
    f = PiecewiseFn((Piece.sin_half(0, "1/2", 0, "1/4"),
                     Piece.affine("1/2", "3/4", "1/4", "1/4"),
                     Piece.sin_half("3/4", 1, "1/4", 1)))
    pts, plat = preimage(f, F(1, 4))
    assert plat.measure() == F(1, 4)
    pts2, plat2 = preimage(f, F(1, 8))
    assert plat2.measure() == 0 and len(pts2) == 1
    x = pts2[0]
    v = evaluate(f, x.mid, 120)
    assert abs(v.mid - F(1, 8)) < F(1, 2**55)


def test_preimage_of_bump_finds_both_crossings():
    f = PiecewiseFn((Piece.cos_full(0, 1, 0, "1/4"),))
    pts, _ = preimage(f, F(1, 8))
    assert len(pts) == 2
    assert pts[0].hi < F(1, 2) < pts[1].lo


# -- classification ----------------------------------------------------------


def test_property_flags():
    flags = classify_properties(sin_unit())
    assert flags.A and flags.B and flags.C and flags.D
    with_plateau = PiecewiseFn((Piece.sin_half(0, "1/2", 0, "1/4"),
                                Piece.affine("1/2", 1, "1/4", "1/4")))
    flags = classify_properties(with_plateau)
    assert not flags.A and not flags.B and not flags.C and not flags.D
    sloped = PiecewiseFn((Piece.affine(0, 1, 0, 1),))
    flags = classify_properties(sloped)
    assert not flags.A and flags.B and not flags.C and flags.D


def test_implications_hold_on_random_mixes():
    rng = random.Random(11)
    shapes = ["affine", "plateau", "sin", "cos"]
    for _ in range(200):
        pieces = []
        x = F(0)
        y = F(0)
        for _ in range(rng.randint(1, 4)):
            w = F(rng.randint(1, 4), 4)
            kind = rng.choice(shapes)
            if kind == "plateau":
                pieces.append(Piece.affine(x, x + w, y, y))
            elif kind == "affine":
                y2 = y + F(rng.randint(1, 3), 3)
                pieces.append(Piece.affine(x, x + w, y, y2))
                y = y2
            elif kind == "sin":
                y2 = y + F(rng.randint(1, 3), 3)
                pieces.append(Piece.sin_half(x, x + w, y, y2))
                y = y2
            else:
                pieces.append(Piece.cos_full(x, x + w, y, F(1, 4)))
            x += w
        flags = classify_properties(PiecewiseFn(tuple(pieces)))
        assert (not flags.A or flags.B) and (not flags.B or flags.D)
        assert (not flags.A or flags.C) and (not flags.C or flags.D)


# -- affine conjugation ------------------------------------------------------


@given(st.fractions(min_value=-2, max_value=2, max_denominator=16).filter(lambda a: a != 0),
       st.fractions(min_value=-1, max_value=1, max_denominator=16),
       st.fractions(min_value=-2, max_value=2, max_denominator=16),
       st.fractions(min_value=-1, max_value=1, max_denominator=16))
@settings(max_examples=100, deadline=None)
def test_conjugation_evaluation_law(a, b, c, d):
    f = two_arc()
    g = affine_conjugate(f, a, b, c, d)
    for u in (F(1, 7), F(2, 5), F(18, 23)):
        # keep a*u + b inside f's domain
        x = a * u + b
        if not (0 <= x <= 1):
            continue
        left = evaluate(g, u)
        right = evaluate(f, x) + Enclosure.exact(c * u + d)
        assert not left.disjoint_from(right)


@given(st.fractions(min_value=-2, max_value=2, max_denominator=16).filter(lambda a: a != 0),
       st.fractions(min_value=-1, max_value=1, max_denominator=16),
       st.fractions(min_value=-2, max_value=2, max_denominator=16))
@settings(max_examples=100, deadline=None)
def test_dq_transform_law(a, b, c):
    f = two_arc()
    g = affine_conjugate(f, a, b, c, 0)
    u, v = F(1, 9), F(5, 8)
    x1, x2 = a * u + b, a * v + b
    if not (0 <= x1 <= 1 and 0 <= x2 <= 1) or x1 == x2:
        return
    left = dq(g, u, v)
    right = dq(f, x1, x2) * Enclosure.exact(a) + Enclosure.exact(c)
    assert not left.disjoint_from(right)


def test_conjugation_preserves_c1():
    g = affine_conjugate(two_arc(), F(-1, 2), F(1, 2), F(1, 3), F(2))
    assert is_c1(g)
    assert g.domain.lo == -1 and g.domain.hi == 1


# -- serialization -----------------------------------------------------------


def test_piecewise_json_roundtrip():
    f = PiecewiseFn((Piece.sin_half(0, "1/2", 0, "1/4", tilt="1/8"),
                     Piece.cos_full("1/2", 1, "1/4", "1/16", tilt=0)))
    back = PiecewiseFn.from_json(json.loads(json.dumps(f.to_json())))
    assert back == f
