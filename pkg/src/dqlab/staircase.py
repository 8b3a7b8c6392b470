"""The recursive staircase counterexample.

A two-rectangle template (with three sinusoid connectors) is scaled into
each rectangle of the previous stage, with a tamping factor h that squashes
the copy vertically.  The horizontal shadows X_k keep measure >= 1/4 while
the vertical shadows Y_k collapse geometrically, so the limit function maps
a positive-mass set onto a null set while every connector slope is tamped
below 1/k.

Two gap conventions are supported.  PAPER_LEDGER rescales the template gaps
to absolute width, so the k-th refinement removes exactly 2^(k+1) * v_k of
horizontal measure and the ledger reaches the limit 1/4.  LITERAL_AFFINE
applies the template verbatim (gaps relative to rectangle width), giving
lambda(X_{k+1}) = lambda(X_k) * (1 - 2 v_k) and a different positive limit.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .enclosure import PI_HI, Enclosure
from .errors import DqlabError
from .intervals import Interval, IntervalSet, normalize, rat, rat_str
from .piecewise import Piece, PiecewiseFn

DEFAULT_DEPTH_CAP = 16


class GapConvention(Enum):
    PAPER_LEDGER = "paper-ledger"
    LITERAL_AFFINE = "literal-affine"


def default_v(k: int) -> Fraction:
    """Gap-budget sequence 1 / 2^(2k+3)."""
    return Fraction(1, 2 ** (2 * k + 3))


@dataclass(frozen=True)
class Rect:
    x: Interval
    y: Interval

    def __post_init__(self):
        if self.x.width <= 0 or self.y.width <= 0:
            raise ValueError("rectangle must have positive width and height")

    def contains(self, other: "Rect") -> bool:
        return self.x.contains_interval(other.x) and self.y.contains_interval(other.y)


@dataclass(frozen=True)
class Template:
    """The unit-square template: two rectangles plus three connectors.

    Connector 1 is a full-cosine bump of height 1/6 between (0,0) and
    (v/2, 0); connector 2 a half-sine joining the rectangles' near corners;
    connector 3 a half-cosine returning to (1, 0).  All junctions have zero
    slope, so the assembled function is C1 wherever plateaus meet connectors.
    """

    v: Fraction
    rects: tuple
    connectors: tuple

    @staticmethod
    def build(v, v_max=Fraction(1, 3)) -> "Template":
        v = rat(v)
        if not 0 < v < v_max:
            raise ValueError(f"template parameter v={v} outside (0, {v_max})")
        half = v / 2
        r1 = Rect(Interval(half, Fraction(1, 2) - half), Interval(Fraction(0), Fraction(1, 3)))
        r2 = Rect(Interval(Fraction(1, 2) + half, 1 - half), Interval(Fraction(2, 3), Fraction(1)))
        c1 = Piece.cos_full(0, half, 0, Fraction(1, 6))
        c2 = Piece.sin_half(Fraction(1, 2) - half, Fraction(1, 2) + half, 0, Fraction(2, 3))
        c3 = Piece.cos_half(1 - half, 1, Fraction(2, 3), 0)
        return Template(v, (r1, r2), (c1, c2, c3))


def build_template(v) -> Template:
    """Public template constructor; the gap parameter must lie in (0, 1/6)."""
    v = rat(v)
    if not 0 < v < Fraction(1, 6):
        raise ValueError(f"v={v} outside (0, 1/6)")
    return Template.build(v, v_max=Fraction(1, 6))


@dataclass(frozen=True)
class Level:
    k: int
    rects: tuple
    connectors: tuple  # connectors created at this level only
    v: Fraction  # gap budget consumed to create this level
    h: Fraction  # tamping factor applied at this level (1 for level 0)
    s: Fraction  # common rectangle width
    t: Fraction  # common rectangle height

    def x_set(self) -> IntervalSet:
        return normalize([r.x for r in self.rects])

    def y_set(self) -> IntervalSet:
        return normalize([r.y for r in self.rects])


def choose_h(k: int, s, t, v) -> Fraction:
    """Largest power of 1/2 (<= 1/2) tamping the next refinement's connector
    slopes strictly below 1/(k+1).

    The worst connector is the trailing half-cosine: width s*v/2, vertical
    extent 2*h*t/3, max slope 2*pi*h*t/(3*s*v).  A valid h always exists
    because the slope scales linearly in h.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    s, t, v = rat(s), rat(t), rat(v)
    if s <= 0 or t <= 0 or v <= 0:
        raise ValueError("s, t, v must all be positive")
    bound = 3 * s * v / (2 * PI_HI * t * (k + 1))
    n = 1
    while Fraction(1, 2**n) >= bound:
        n += 1
    return Fraction(1, 2**n)


def _map_piece(p: Piece, ax, bx, ay, by) -> Piece:
    """Axis-aligned image of a tilt-free piece under (x, y) -> (ax*x + bx, ay*y + by)."""
    return Piece(
        Interval(ax * p.lo + bx, ax * p.hi + bx),
        ay * p.y_start + by,
        ay * p.y_end + by,
        p.shape,
        height=ay * p.height,
    )


def refine(level: Level, gap_convention: GapConvention,
           v_budget: Fraction | None = None) -> Level:
    """Replace every rectangle of `level` by a tamped template copy.

    Under PAPER_LEDGER the template gap parameter is rescaled to v/(2s) so
    each rectangle loses absolute x-width v exactly; under LITERAL_AFFINE the
    affine map is applied verbatim and gaps are relative.
    """
    k = level.k
    v = default_v(k) if v_budget is None else rat(v_budget)
    if gap_convention is GapConvention.PAPER_LEDGER:
        v_eff = v / (2 * level.s)
    else:
        v_eff = v
    if v_eff >= Fraction(1, 3):
        raise DqlabError(
            f"gap parameter {v_eff} at level {k} would exceed rectangle width"
        )
    h = choose_h(k, level.s, level.t, v_eff)
    tpl = Template.build(v_eff)
    rects = []
    connectors = []
    for r in level.rects:
        ax, bx = r.x.width, r.x.lo
        ay, by = h * r.y.width, r.y.lo
        for tr in tpl.rects:
            rects.append(Rect(
                Interval(ax * tr.x.lo + bx, ax * tr.x.hi + bx),
                Interval(ay * tr.y.lo + by, ay * tr.y.hi + by),
            ))
        for tc in tpl.connectors:
            connectors.append(_map_piece(tc, ax, bx, ay, by))
    new_s = rects[0].x.width
    new_t = rects[0].y.width
    return Level(k + 1, tuple(rects), tuple(connectors), v, h, new_s, new_t)


@dataclass(frozen=True)
class StaircaseLedger:
    levels: tuple
    x_measures: tuple
    y_measure_bounds: tuple
    gap_convention: GapConvention

    @property
    def depth(self) -> int:
        return self.levels[-1].k

    def x_set(self, k: int) -> IntervalSet:
        return self.levels[k].x_set()

    def y_set(self, k: int) -> IntervalSet:
        return self.levels[k].y_set()

    def connectors_up_to(self, depth: int) -> list:
        out = []
        for lev in self.levels[: depth + 1]:
            out.extend(lev.connectors)
        return out

    def truncation(self, depth: int) -> PiecewiseFn:
        """The depth-truncated staircase as a piecewise function: every
        connector built so far, plus a horizontal plateau along the bottom
        edge of each depth-level rectangle."""
        pieces = list(self.connectors_up_to(depth))
        for r in self.levels[depth].rects:
            pieces.append(Piece.affine(r.x.lo, r.x.hi, r.y.lo, r.y.lo))
        pieces.sort(key=lambda p: p.lo)
        return PiecewiseFn(tuple(pieces))

    def literal_limit_bounds(self) -> tuple:
        """Rational bounds [lo, hi] on the limit of the x-measure ledger.

        hi is the exact measure at the built depth; lo discounts the whole
        unbuilt tail of gap removals, so the true limit lies in [lo, hi].
        """
        depth = self.depth
        current = self.x_measures[-1]
        if self.gap_convention is GapConvention.PAPER_LEDGER:
            # remaining removals sum to exactly 2^-(depth+1)
            return (current - Fraction(1, 2 ** (depth + 1)), current)
        # product lower bound: Prod(1 - 2 v_k) >= 1 - Sum 2 v_k over the tail,
        # and Sum_{k>=depth} 2 v_k = 4^-depth / 3 exactly
        tail = Fraction(1, 3 * 4**depth)
        return (current * (1 - tail), current)

    def to_json(self) -> dict:
        return {
            "gap_convention": self.gap_convention.value,
            "levels": [
                {
                    "k": lev.k,
                    "v": rat_str(lev.v),
                    "h": rat_str(lev.h),
                    "s": rat_str(lev.s),
                    "t": rat_str(lev.t),
                    "rects": [
                        [rat_str(r.x.lo), rat_str(r.x.hi), rat_str(r.y.lo), rat_str(r.y.hi)]
                        for r in lev.rects
                    ],
                    "connectors": [c.to_json() for c in lev.connectors],
                    "x_measure": rat_str(self.x_measures[lev.k]),
                    "y_bound": rat_str(self.y_measure_bounds[lev.k]),
                }
                for lev in self.levels
            ],
        }

    def geometry_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["level", "x_lo", "x_hi", "y_lo", "y_hi"])
        for lev in self.levels:
            for r in lev.rects:
                w.writerow([lev.k, rat_str(r.x.lo), rat_str(r.x.hi),
                            rat_str(r.y.lo), rat_str(r.y.hi)])
        return buf.getvalue()


def build_ledger(depth: int,
                 gap_convention: GapConvention = GapConvention.PAPER_LEDGER,
                 depth_cap: int = DEFAULT_DEPTH_CAP) -> StaircaseLedger:
    """Levels 0..depth with exact x-measures and y-measure bounds."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth > depth_cap:
        raise ValueError(f"depth {depth} exceeds cap {depth_cap}")
    v0 = default_v(0)
    tpl = build_template(v0)
    level0 = Level(
        0,
        tpl.rects,
        tpl.connectors,
        v0,
        Fraction(1),
        tpl.rects[0].x.width,
        tpl.rects[0].y.width,
    )
    levels = [level0]
    for _ in range(depth):
        levels.append(refine(levels[-1], gap_convention))
    x_measures = tuple(lev.x_set().measure() for lev in levels)
    y_bounds = tuple(2 ** (lev.k + 1) * lev.t for lev in levels)
    return StaircaseLedger(tuple(levels), x_measures, y_bounds, gap_convention)


def eval_g(ledger: StaircaseLedger, x, depth: int, precision_bits: int = 96) -> Enclosure:
    """Enclosure of the staircase limit function at x using the structure up
    to `depth`: exact connector formulas where x lies under a connector,
    otherwise the y-extent of the containing depth-level rectangle (width
    t_depth, which bounds the total error)."""
    x = rat(x)
    if not (0 <= x <= 1):
        raise ValueError("x must lie in [0, 1]")
    if depth > ledger.depth:
        raise ValueError("depth exceeds the ledger's built depth")
    for lev in ledger.levels[: depth + 1]:
        for c in lev.connectors:
            if c.lo <= x <= c.hi:
                return c.value(x, precision_bits)
    for r in ledger.levels[depth].rects:
        if r.x.contains(x):
            return Enclosure(r.y.lo, r.y.hi)
    raise DqlabError(f"x={x} not covered by connectors or rectangles")  # unreachable


def deriv_g_bound(ledger: StaircaseLedger, region: IntervalSet, depth: int) -> Fraction:
    """Exact rational upper bound on |g'| over the region at the given depth.

    Connector slopes come from their closed forms; rectangle interiors at the
    deepest built level inherit the bound 1/(depth+1) that the tamping
    schedule enforces on every further refinement.
    """
    if depth > ledger.depth:
        raise ValueError("depth exceeds the ledger's built depth")
    best = Fraction(0)
    for lev in ledger.levels[: depth + 1]:
        for c in lev.connectors:
            for comp in region.intervals:
                if max(comp.lo, c.lo) < min(comp.hi, c.hi):
                    best = max(best, c.max_abs_slope())
                    break
    deepest = ledger.levels[depth]
    for r in deepest.rects:
        if any(max(comp.lo, r.x.lo) < min(comp.hi, r.x.hi) for comp in region.intervals):
            best = max(best, Fraction(1, depth + 1))
            break
    return best


def level_set_check(ledger: StaircaseLedger, t, depth: int) -> Fraction:
    """Upper bound on the horizontal extent of the level set {g = t} visible
    at this depth: one rectangle shadow plus null connector crossings."""
    t = rat(t)
    if depth > ledger.depth:
        raise ValueError("depth exceeds the ledger's built depth")
    if t < 0 or t > 1:
        return Fraction(0)
    return ledger.levels[depth].s
