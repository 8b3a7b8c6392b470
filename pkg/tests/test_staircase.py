import json
from fractions import Fraction as F

import pytest

from dqlab.enclosure import PI_HI
from dqlab.errors import DqlabError
from dqlab.intervals import Interval, IntervalSet, normalize
from dqlab.piecewise import deriv, evaluate, is_c1, preimage
from dqlab.staircase import (GapConvention, build_ledger, build_template,
                             choose_h, default_v, deriv_g_bound, eval_g,
                             level_set_check, refine)


@pytest.fixture(scope="module")
def led():
    return build_ledger(10, GapConvention.PAPER_LEDGER)


@pytest.fixture(scope="module")
def led_lit():
    return build_ledger(10, GapConvention.LITERAL_AFFINE)


# -- template and schedule ---------------------------------------------------


def test_default_gap_schedule():
    assert default_v(0) == F(1, 8)
    assert default_v(1) == F(1, 32)
    assert default_v(5) == F(1, 2**13)


def test_template_guards():
    with pytest.raises(ValueError):
        build_template(F(1, 6))
    with pytest.raises(ValueError):
        build_template(F(0))
    t = build_template(F(1, 8))
    assert len(t.rects) == 2 and len(t.connectors) == 3


def test_choose_h_is_dyadic_and_small():
    h = choose_h(0, F(1), F(1, 3), F(1, 8))
    assert h <= F(1, 2)
    assert h.numerator == 1 and (h.denominator & (h.denominator - 1)) == 0
    # the driving bound: worst connector slope stays under 1/(k+1)
    assert 2 * PI_HI * h * F(1, 3) / (3 * F(1) * F(1, 8)) < 1


# -- ledger measures ---------------------------------------------------------


def test_x_measures_paper_ledger(led):
    assert led.x_measures[0] == F(3, 4)
    for k in range(11):
        assert led.x_measures[k] == F(1, 4) + F(1, 2 ** (k + 1))


def test_x_measure_limit_bounds_paper(led):
    lo, hi = led.literal_limit_bounds()
    assert lo == F(1, 4) and hi == led.x_measures[-1]


def test_y_bounds_collapse(led):
    for k in range(11):
        assert led.y_measure_bounds[k] <= F(2 ** (k + 1), 3 ** (k + 1))


def test_x_sets_nest(led):
    for k in range(1, 6):
        outer, inner = led.x_set(k - 1), led.x_set(k)
        assert outer.contains_set(inner)
        assert inner.measure() == led.x_measures[k]


def test_literal_affine_partial_products(led_lit):
    assert led_lit.x_measures[0] == F(3, 4)
    assert led_lit.x_measures[1] == F(9, 16)
    assert led_lit.x_measures[2] == F(135, 256)
    lo, hi = led_lit.literal_limit_bounds()
    assert 0 < lo and lo > F(1, 4)  # the limit provably differs from 1/4


def test_refine_guard_rejects_oversized_gap():
    led = build_ledger(0, GapConvention.PAPER_LEDGER)
    with pytest.raises(DqlabError):
        refine(led.levels[0], GapConvention.PAPER_LEDGER, v_budget=F(1, 2))


# -- the function itself -----------------------------------------------------


def test_truncations_are_c1(led):
    for d in (0, 2, 4):
        tr = led.truncation(d)
        assert is_c1(tr)
        assert tr.domain == Interval(F(0), F(1))


def test_eval_g_exact_anchor_values(led):
    assert eval_g(led, F(0), 6).is_exact and eval_g(led, F(0), 6).lo == 0
    assert eval_g(led, F(1, 2), 6).is_exact and eval_g(led, F(1, 2), 6).lo == F(1, 3)
    assert eval_g(led, F(1), 6).is_exact and eval_g(led, F(1), 6).lo == 0


def test_eval_g_matches_truncation_within_tail(led):
    d = 4
    tr = led.truncation(d)
    tail = led.levels[d].t
    for x in (F(1, 7), F(2, 5), F(13, 17), F(31, 32)):
        a = eval_g(led, x, d)
        b = evaluate(tr, x)
        assert abs(a.mid - b.mid) <= tail + a.width + b.width


def test_deriv_bound_tamps_down(led):
    for k in range(1, 9):
        bound = deriv_g_bound(led, led.x_set(k), k)
        assert bound < F(1, k)


def test_deriv_small_on_deep_set_sampled(led):
    tr = led.truncation(6)
    x6 = led.x_set(6)
    for iv in x6.intervals[:8]:
        d = deriv(tr, iv.mid)
        assert d.abs().hi < F(1, 6)


def test_level_set_extent_bound(led):
    d = 6
    tr = led.truncation(d)
    s_d = level_set_check(led, F(1, 2), d)
    assert s_d == led.levels[d].s
    for t in (F(1, 9), F(4, 9), F(17, 27)):
        extent = preimage(tr, t, precision_bits=60)[1].measure()
        assert extent <= s_d
    assert level_set_check(led, F(3, 2), d) == 0


# -- serialization -----------------------------------------------------------


def test_ledger_json_and_csv(led):
    blob = led.to_json()
    assert blob["gap_convention"] == "paper-ledger"
    assert len(blob["levels"]) == 11
    assert blob["levels"][0]["x_measure"] == "3/4"
    json.dumps(blob)  # must be serializable
    csv_text = led.geometry_csv()
    assert csv_text.splitlines()[0] == "level,x_lo,x_hi,y_lo,y_hi"
    assert len(csv_text.splitlines()) == 1 + sum(2 ** (k + 1) for k in range(11))
