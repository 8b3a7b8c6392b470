"""Continuous piecewise functions built from affine pieces and affinely
mapped sinusoid arcs.

The shape vocabulary is deliberately small: AFFINE segments, the sin arc on
[-pi/2, pi/2], the cos arc on [0, pi], and the full cos arc on [-pi, pi].
Every piece additionally carries a rational `tilt`, a linear term added on
top of the pure reference arc.  Pure pieces have tilt 0; tilt is what keeps
the class closed under g(x) = f(ax+b) + cx + d.

Evaluation returns rational enclosures (see :mod:`dqlab.enclosure`): values
at piece endpoints are exact, sinusoid values at generic rational points are
transcendental and come back as width <= 2^-precision_bits intervals.
"""

from __future__ import annotations

import bisect
import functools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .enclosure import (PI_HI, PI_LO, Enclosure, cos_pi, pi_enclosure,
                        sin_cos_pi, sin_pi)
from .errors import (
    AmbiguousDerivativeError,
    DegenerateMapError,
    DiagonalError,
    DomainError,
    DqlabError,
    SplitRequiredError,
)
from .intervals import Interval, IntervalSet, Rat, intersect, normalize, rat, rat_str

DEFAULT_PRECISION = 96


class CurveShape(Enum):
    AFFINE = "AFFINE"
    SIN_HALF = "SIN_HALF"
    COS_HALF = "COS_HALF"
    COS_FULL = "COS_FULL"


@dataclass(frozen=True)
class Piece:
    domain: Interval
    y_start: Fraction
    y_end: Fraction
    shape: CurveShape
    height: Fraction = Fraction(0)  # COS_FULL bump amplitude (signed)
    tilt: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "y_start", rat(self.y_start))
        object.__setattr__(self, "y_end", rat(self.y_end))
        object.__setattr__(self, "height", rat(self.height))
        object.__setattr__(self, "tilt", rat(self.tilt))
        if self.width <= 0:
            raise ValueError("piece must have positive width")
        if self.shape is CurveShape.COS_FULL:
            if self.y_end - self.y_start != self.tilt * self.width:
                raise ValueError(
                    "COS_FULL endpoints must differ by exactly tilt * width"
                )
            if self.height == 0:
                raise ValueError("COS_FULL piece needs a non-zero bump height")
        if self.shape is CurveShape.AFFINE and self.tilt != 0:
            raise ValueError("AFFINE pieces express their slope directly, not via tilt")
        # per-instance memo for evaluation coefficients (hot path)
        object.__setattr__(self, "_memo", {})

    # -- constructors ------------------------------------------------------

    @staticmethod
    def affine(lo, hi, y_start, y_end) -> "Piece":
        return Piece(Interval(rat(lo), rat(hi)), rat(y_start), rat(y_end), CurveShape.AFFINE)

    @staticmethod
    def sin_half(lo, hi, y_start, y_end, tilt=0) -> "Piece":
        return Piece(Interval(rat(lo), rat(hi)), rat(y_start), rat(y_end),
                     CurveShape.SIN_HALF, tilt=rat(tilt))

    @staticmethod
    def cos_half(lo, hi, y_start, y_end, tilt=0) -> "Piece":
        return Piece(Interval(rat(lo), rat(hi)), rat(y_start), rat(y_end),
                     CurveShape.COS_HALF, tilt=rat(tilt))

    @staticmethod
    def cos_full(lo, hi, y_start, bump, tilt=0) -> "Piece":
        lo, hi, y_start, bump, tilt = map(rat, (lo, hi, y_start, bump, tilt))
        return Piece(Interval(lo, hi), y_start, y_start + tilt * (hi - lo),
                     CurveShape.COS_FULL, height=bump, tilt=tilt)

    # -- geometry ----------------------------------------------------------

    @property
    def lo(self) -> Fraction:
        return self.domain.lo

    @property
    def hi(self) -> Fraction:
        return self.domain.hi

    @property
    def width(self) -> Fraction:
        return self.domain.width

    @property
    def affine_slope(self) -> Fraction:
        return (self.y_end - self.y_start) / self.width

    @property
    def pure_delta(self) -> Fraction:
        """Vertical extent of the reference arc after mapping, net of tilt."""
        if self.shape is CurveShape.COS_FULL:
            return self.height
        return self.y_end - self.y_start - self.tilt * self.width

    @property
    def box_height(self) -> Fraction:
        return abs(self.pure_delta)

    def _chord(self, x: Fraction) -> Fraction:
        return self.y_start + self.tilt * (x - self.lo)

    def _coeffs(self, prec: int):
        """Cached (half_delta, deriv_amplitude) for the hot evaluation path."""
        memo = self._memo
        got = memo.get(prec)
        if got is None:
            if self.shape is CurveShape.COS_FULL:
                half = Fraction(self.height, 2)
                amp = pi_enclosure(prec) * Fraction(-self.height, self.width)
            else:
                half = Fraction(self.pure_delta, 2)
                amp = pi_enclosure(prec) * Fraction(self.pure_delta, 2 * self.width)
            got = memo[prec] = (half, amp)
        return got

    def value(self, x, prec: int = DEFAULT_PRECISION) -> Enclosure:
        x = rat(x)
        if not self.domain.contains(x):
            raise DomainError(f"x={x} outside piece domain [{self.lo}, {self.hi}]")
        s = (x - self.lo) / self.width
        if self.shape is CurveShape.AFFINE:
            return Enclosure.exact(self.y_start + (self.y_end - self.y_start) * s)
        chord = Enclosure.exact(self._chord(x))
        half, _ = self._coeffs(prec)
        if self.shape is CurveShape.SIN_HALF:
            return chord + (sin_pi(s - Fraction(1, 2), prec) + 1) * half
        if self.shape is CurveShape.COS_HALF:
            return chord + (1 - cos_pi(s, prec)) * half
        # COS_FULL: endpoints at chord level, interior extremum at chord + height
        return chord + (cos_pi(2 * s - 1, prec) + 1) * half

    def deriv(self, x, prec: int = DEFAULT_PRECISION) -> Enclosure:
        x = rat(x)
        if not self.domain.contains(x):
            raise DomainError(f"x={x} outside piece domain [{self.lo}, {self.hi}]")
        if self.shape is CurveShape.AFFINE:
            return Enclosure.exact(self.affine_slope)
        s = (x - self.lo) / self.width
        _, amp = self._coeffs(prec)
        tilt = Enclosure.exact(self.tilt)
        if self.shape is CurveShape.SIN_HALF:
            return tilt + amp * cos_pi(s - Fraction(1, 2), prec)
        if self.shape is CurveShape.COS_HALF:
            return tilt + amp * sin_pi(s, prec)
        return tilt + amp * sin_pi(2 * s - 1, prec)

    def value_deriv(self, x, prec: int = DEFAULT_PRECISION) -> tuple:
        """(value, derivative) enclosures sharing one trig evaluation."""
        x = rat(x)
        if not self.domain.contains(x):
            raise DomainError(f"x={x} outside piece domain [{self.lo}, {self.hi}]")
        if self.shape is CurveShape.AFFINE:
            return (Enclosure.exact(self.y_start + self.affine_slope * (x - self.lo)),
                    Enclosure.exact(self.affine_slope))
        s = (x - self.lo) / self.width
        half, amp = self._coeffs(prec)
        chord = Enclosure.exact(self._chord(x))
        tilt = Enclosure.exact(self.tilt)
        if self.shape is CurveShape.SIN_HALF:
            sin_e, cos_e = sin_cos_pi(s - Fraction(1, 2), prec)
            return chord + (sin_e + 1) * half, tilt + amp * cos_e
        if self.shape is CurveShape.COS_HALF:
            sin_e, cos_e = sin_cos_pi(s, prec)
            return chord + (1 - cos_e) * half, tilt + amp * sin_e
        sin_e, cos_e = sin_cos_pi(2 * s - 1, prec)
        return chord + (cos_e + 1) * half, tilt + amp * sin_e

    @property
    def endpoint_slope(self) -> Fraction:
        """One-sided slope at either endpoint; exact.  Sinusoid arcs have
        zero endpoint tangency, so only the tilt survives."""
        if self.shape is CurveShape.AFFINE:
            return self.affine_slope
        return self.tilt

    def slope_range(self, a=None, b=None) -> tuple:
        """Rational outer bounds on the derivative over [a, b] (defaults to
        the full domain); every true derivative value lies inside."""
        a = self.lo if a is None else max(rat(a), self.lo)
        b = self.hi if b is None else min(rat(b), self.hi)
        if a > b:
            raise ValueError("empty slope-range query")
        if self.shape is CurveShape.AFFINE:
            m = self.affine_slope
            return (m, m)
        sa = (a - self.lo) / self.width
        sb = (b - self.lo) / self.width
        if self.shape is CurveShape.SIN_HALF:
            amp = Enclosure.exact(Fraction(self.pure_delta, 2 * self.width)) * Enclosure(PI_LO, PI_HI)
            trig = _cos_pi_range(sa - Fraction(1, 2), sb - Fraction(1, 2))
        elif self.shape is CurveShape.COS_HALF:
            amp = Enclosure.exact(Fraction(self.pure_delta, 2 * self.width)) * Enclosure(PI_LO, PI_HI)
            trig = _sin_pi_range(sa, sb)
        else:
            amp = Enclosure.exact(Fraction(-self.height, self.width)) * Enclosure(PI_LO, PI_HI)
            trig = _sin_pi_range(2 * sa - 1, 2 * sb - 1)
        total = amp * trig + Enclosure.exact(self.tilt)
        return (total.lo, total.hi)

    def max_abs_slope(self) -> Fraction:
        """Closed-form rational upper bound on |slope| over the whole piece."""
        if self.shape is CurveShape.AFFINE:
            return abs(self.affine_slope)
        if self.shape is CurveShape.COS_FULL:
            return abs(self.tilt) + abs(self.height) * PI_HI / self.width
        return abs(self.tilt) + self.box_height * PI_HI / (2 * self.width)

    def value_range(self, a=None, b=None, prec: int = DEFAULT_PRECISION) -> Enclosure:
        """Rational outer bounds on the value over [a, b], assuming the piece
        is monotone there (callers check via slope_range)."""
        a = self.lo if a is None else max(rat(a), self.lo)
        b = self.hi if b is None else min(rat(b), self.hi)
        va, vb = self.value(a, prec), self.value(b, prec)
        return Enclosure(min(va.lo, vb.lo), max(va.hi, vb.hi))

    def to_json(self) -> dict:
        return {
            "domain": [rat_str(self.lo), rat_str(self.hi)],
            "y_start": rat_str(self.y_start),
            "y_end": rat_str(self.y_end),
            "shape": self.shape.value,
            "height": rat_str(self.height),
            "tilt": rat_str(self.tilt),
        }

    @staticmethod
    def from_json(d: dict) -> "Piece":
        return Piece(
            Interval(rat(d["domain"][0]), rat(d["domain"][1])),
            rat(d["y_start"]),
            rat(d["y_end"]),
            CurveShape(d["shape"]),
            height=rat(d.get("height", 0)),
            tilt=rat(d.get("tilt", 0)),
        )


def _trig_range(lo_u: Fraction, hi_u: Fraction, fn, extrema: dict) -> Enclosure:
    """Outer range of fn(pi*u) over u in [lo_u, hi_u], given the locations
    (mod 2) of fn's interior extrema and their values."""
    cands = [fn(lo_u, 64), fn(hi_u, 64)]
    los = [c.lo for c in cands]
    his = [c.hi for c in cands]
    for loc, val in extrema.items():
        # all shifts of loc by 2k that land inside [lo_u, hi_u]
        k0 = (lo_u - loc) / 2
        k = k0.numerator // k0.denominator
        for kk in (k, k + 1, k + 2):
            u = loc + 2 * kk
            if lo_u <= u <= hi_u:
                los.append(val)
                his.append(val)
    return Enclosure(min(los), max(his))


def _sin_pi_range(lo_u, hi_u) -> Enclosure:
    return _trig_range(lo_u, hi_u, sin_pi,
                       {Fraction(1, 2): Fraction(1), Fraction(-1, 2): Fraction(-1)})


def _cos_pi_range(lo_u, hi_u) -> Enclosure:
    return _trig_range(lo_u, hi_u, cos_pi,
                       {Fraction(0): Fraction(1), Fraction(1): Fraction(-1),
                        Fraction(-1): Fraction(-1)})


@dataclass(frozen=True)
class PiecewiseFn:
    pieces: tuple

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise ValueError("a piecewise function needs at least one piece")
        for p, q in zip(self.pieces, self.pieces[1:]):
            if p.hi != q.lo:
                raise ValueError(f"domain gap between {p.hi} and {q.lo}")
            if p.y_end != q.y_start:
                raise ValueError(
                    f"discontinuity at x={p.hi}: {p.y_end} != {q.y_start}"
                )
        object.__setattr__(self, "_lows", [p.lo for p in self.pieces])

    @property
    def domain(self) -> Interval:
        return Interval(self.pieces[0].lo, self.pieces[-1].hi)

    def piece_index_at(self, x, prefer_left: bool = True) -> int:
        x = rat(x)
        if not self.domain.contains(x):
            raise DomainError(f"x={x} outside domain {self.domain}")
        i = bisect.bisect_right(self._lows, x) - 1
        if prefer_left and i > 0 and x == self._lows[i]:
            return i - 1
        return min(i, len(self.pieces) - 1) if i >= 0 else 0

    def joins(self) -> list:
        """(x, left_slope, right_slope) at each interior join; slopes exact."""
        out = []
        for p, q in zip(self.pieces, self.pieces[1:]):
            out.append((p.hi, p.endpoint_slope, q.endpoint_slope))
        return out

    def to_json(self) -> dict:
        return {"pieces": [p.to_json() for p in self.pieces]}

    @staticmethod
    def from_json(d: dict) -> "PiecewiseFn":
        return PiecewiseFn(tuple(Piece.from_json(p) for p in d["pieces"]))


def is_c1(f: PiecewiseFn) -> bool:
    """Exact check that one-sided slopes agree at every join."""
    return all(ls == rs for _, ls, rs in f.joins())


def evaluate(f: PiecewiseFn, x, precision_bits: int = DEFAULT_PRECISION) -> Enclosure:
    x = rat(x)
    return f.pieces[f.piece_index_at(x)].value(x, precision_bits)


def deriv(f: PiecewiseFn, x, precision_bits: int = DEFAULT_PRECISION) -> Enclosure:
    x = rat(x)
    i = f.piece_index_at(x)
    p = f.pieces[i]
    if p.lo < x < p.hi:
        return p.deriv(x, precision_bits)
    # at a join or a domain endpoint: use the exact one-sided slopes
    left = p.endpoint_slope if x == p.hi or x == p.lo else None
    if x == p.hi and i + 1 < len(f.pieces):
        right = f.pieces[i + 1].endpoint_slope
        if left != right:
            raise AmbiguousDerivativeError(x, left, right)
    return Enclosure.exact(left)


def value_and_deriv(f: PiecewiseFn, x,
                    precision_bits: int = DEFAULT_PRECISION) -> tuple:
    """(f(x), f'(x)) enclosures; one trig evaluation at interior points.
    Falls back to the join-aware paths at piece boundaries."""
    x = rat(x)
    i = f.piece_index_at(x)
    p = f.pieces[i]
    if p.lo < x < p.hi:
        return p.value_deriv(x, precision_bits)
    return p.value(x, precision_bits), deriv(f, x, precision_bits)


def dq(f: PiecewiseFn, x1, x2, precision_bits: int = DEFAULT_PRECISION) -> Enclosure:
    """Difference quotient (f(x2) - f(x1)) / (x2 - x1); symmetric in its
    arguments, exact when both evaluations are exact."""
    x1, x2 = rat(x1), rat(x2)
    if x1 == x2:
        raise DiagonalError("difference quotient excludes the diagonal")
    v1 = evaluate(f, x1, precision_bits)
    v2 = evaluate(f, x2, precision_bits)
    return (v2 - v1) / Enclosure.exact(x2 - x1)


def slope_bounds(f: PiecewiseFn, region: IntervalSet) -> tuple:
    """Exact rational lower/upper bounds on f' over the region.  Every
    difference quotient over any interval inside the region lies within
    these bounds (mean value theorem)."""
    if region.measure() == 0:
        raise ValueError("slope bounds over an empty region")
    lo = hi = None
    for comp in region.intervals:
        for p in f.pieces:
            a, b = max(comp.lo, p.lo), min(comp.hi, p.hi)
            if a >= b:
                continue
            plo, phi = p.slope_range(a, b)
            lo = plo if lo is None else min(lo, plo)
            hi = phi if hi is None else max(hi, phi)
    if lo is None:
        raise ValueError("region does not meet the function's domain")
    return (lo, hi)


def image_measure_bounds(f: PiecewiseFn, s: IntervalSet,
                         precision_bits: int = DEFAULT_PRECISION) -> tuple:
    """Exact rational enclosure [lo, hi] of the measure of f(s).

    Per strictly monotone piece P and T = s /\\ dom(P):
    m_P * measure(T) <= measure(f(T)) <= M_P * measure(T) with (m_P, M_P)
    the absolute slope bounds over the hull of T.  Affine pieces push
    forward exactly; mixed aggregates use exact y-range disjointness to
    decide whether lower bounds may be added.
    """
    contributions = []  # (lo, hi, y_range Enclosure, exact_images or None)
    for p in f.pieces:
        T = intersect(s, IntervalSet((p.domain,)))
        mT = T.measure()
        if mT == 0:
            continue
        hull_lo, hull_hi = T.intervals[0].lo, T.intervals[-1].hi
        slo, shi = p.slope_range(hull_lo, hull_hi)
        if p.shape is CurveShape.AFFINE:
            m = p.affine_slope
            if m == 0:
                contributions.append((Fraction(0), Fraction(0),
                                      Enclosure.exact(p.y_start), []))
                continue
            images = [
                Interval(min(_affine_y(p, c.lo), _affine_y(p, c.hi)),
                         max(_affine_y(p, c.lo), _affine_y(p, c.hi)))
                for c in T.intervals
            ]
            ex = normalize(images)
            contributions.append((ex.measure(), ex.measure(),
                                  Enclosure(ex.hull().lo, ex.hull().hi), images))
            continue
        if slo < 0 < shi:
            # zero endpoint tangency with one-signed interior is still fine
            interior = p.slope_range(
                hull_lo + (hull_hi - hull_lo) / 1000,
                hull_hi - (hull_hi - hull_lo) / 1000,
            )
            if interior[0] < 0 < interior[1]:
                raise SplitRequiredError(
                    f"piece on [{p.lo},{p.hi}] changes slope sign inside the region;"
                    " split at the extremum"
                )
        alo, ahi = _abs_bounds(slo, shi)
        yr = p.value_range(hull_lo, hull_hi, precision_bits)
        contributions.append((alo * mT, ahi * mT, yr, None))
    if not contributions:
        return (Fraction(0), Fraction(0))
    if all(c[3] is not None for c in contributions):
        allimages = [iv for c in contributions for iv in c[3]]
        ex = normalize(allimages)
        return (ex.measure(), ex.measure())
    upper = sum(c[1] for c in contributions)
    ranges = [c[2] for c in contributions]
    disjoint = all(
        ranges[i].disjoint_from(ranges[j]) or ranges[i].distance_to(ranges[j]) == 0
        and _touch_only(ranges[i], ranges[j])
        for i in range(len(ranges))
        for j in range(i + 1, len(ranges))
    )
    if disjoint:
        lower = sum(c[0] for c in contributions)
    else:
        lower = max(c[0] for c in contributions)
    return (lower, upper)


def _touch_only(a: Enclosure, b: Enclosure) -> bool:
    return a.hi == b.lo or b.hi == a.lo


def _abs_bounds(slo: Fraction, shi: Fraction) -> tuple:
    if slo >= 0:
        return (slo, shi)
    if shi <= 0:
        return (-shi, -slo)
    return (Fraction(0), max(-slo, shi))


def _affine_y(p: Piece, x: Fraction) -> Fraction:
    return p.y_start + p.affine_slope * (x - p.lo)


def preimage(f: PiecewiseFn, y, precision_bits: int = 60) -> tuple:
    """All solutions of f(x) = y: (isolated crossings as enclosures,
    plateau domains as an IntervalSet).

    Plateaus are the zero-slope affine pieces at height exactly y.  Each
    strictly monotone segment whose closed value range contains y
    contributes one crossing, located by bisection to the requested width.
    """
    y = rat(y)
    points = []
    plateaus = []
    for p in f.pieces:
        if p.shape is CurveShape.AFFINE:
            m = p.affine_slope
            if m == 0:
                if p.y_start == y:
                    plateaus.append(p.domain)
                continue
            if min(p.y_start, p.y_end) <= y <= max(p.y_start, p.y_end):
                points.append(Enclosure.exact(p.lo + (y - p.y_start) / m))
            continue
        exact_segs = _exact_segments(p)
        if exact_segs is not None:
            for a, b, va, vb in exact_segs:
                if va == y:
                    points.append(Enclosure.exact(a))
                elif vb == y:
                    points.append(Enclosure.exact(b))
                elif min(va, vb) < y < max(va, vb):
                    points.append(_bisect_crossing(p, a, b, y, precision_bits))
            continue
        for a, b in _monotone_segments(p):
            va = p.value(a, precision_bits + 16)
            vb = p.value(b, precision_bits + 16)
            if va.contains(y) and va.is_exact:
                points.append(Enclosure.exact(a))
                continue
            if vb.contains(y) and vb.is_exact:
                points.append(Enclosure.exact(b))
                continue
            lo_v, hi_v = (va, vb) if va.hi < vb.lo else (vb, va)
            if lo_v.hi < y < hi_v.lo:
                points.append(_bisect_crossing(p, a, b, y, precision_bits))
    # dedupe crossings that coincide exactly (shared piece endpoints)
    deduped = []
    for e in sorted(points, key=lambda e: (e.lo, e.hi)):
        if deduped and e.is_exact and deduped[-1].is_exact and e.lo == deduped[-1].lo:
            continue
        deduped.append(e)
    return deduped, IntervalSet(tuple(plateaus))


def _exact_segments(p: Piece):
    """Monotone segments with exact rational endpoint values, available for
    pure (untilted) arcs; None when enclosure evaluation is needed."""
    if p.tilt != 0:
        return None
    if p.shape is CurveShape.COS_FULL:
        mid = p.domain.mid
        peak = p.y_start + p.height
        return [(p.lo, mid, p.y_start, peak), (mid, p.hi, peak, p.y_end)]
    return [(p.lo, p.hi, p.y_start, p.y_end)]


def _monotone_segments(p: Piece) -> list:
    if p.shape is CurveShape.COS_FULL:
        if p.tilt == 0:
            return [(p.lo, p.domain.mid), (p.domain.mid, p.hi)]
        slo, shi = p.slope_range()
        if slo >= 0 or shi <= 0:
            return [(p.lo, p.hi)]
        raise DqlabError(
            "preimage on a tilted non-monotone COS_FULL piece is not supported"
        )
    if p.tilt == 0:
        return [(p.lo, p.hi)]  # pure half arcs are strictly monotone
    slo, shi = p.slope_range()
    if slo >= 0 or shi <= 0:
        return [(p.lo, p.hi)]
    raise DqlabError("preimage on a tilted non-monotone piece is not supported")


def _bisect_crossing(p: Piece, a: Fraction, b: Fraction, y: Fraction,
                     precision_bits: int) -> Enclosure:
    """Shrink [a, b] (monotone segment with a sign change of f - y) until its
    width is below 2^-precision_bits; the crossing stays bracketed."""
    target = Fraction(1, 2**precision_bits)
    prec = precision_bits + 16
    sign_a = p.value(a, prec) - Enclosure.exact(y)
    increasing = sign_a.hi < 0
    while b - a > target:
        mid = (a + b) / 2
        vm = p.value(mid, prec) - Enclosure.exact(y)
        if vm.lo > 0:
            a, b = (a, mid) if increasing else (mid, b)
        elif vm.hi < 0:
            a, b = (mid, b) if increasing else (a, mid)
        elif vm.is_exact:
            return Enclosure.exact(mid)  # landed on the root exactly
        else:
            # ambiguous sign: the crossing is within vm's width of mid
            prec *= 2
            if prec > 16 * precision_bits + 512:
                return Enclosure(a, b)
    return Enclosure(a, b)


@dataclass(frozen=True)
class PropertyFlags:
    A: bool  # every derivative level set is null
    B: bool  # the zero level set of the derivative is null
    C: bool  # not affine on any positive-mass set (conservative)
    D: bool  # not constant on any positive-mass set


def classify_properties(f: PiecewiseFn) -> PropertyFlags:
    """Decide the four derivative-level-set properties on the piece class.

    Sinusoid pieces (tilted or not) have finite derivative level sets, so a
    derivative value is attained on positive measure iff some affine piece
    has exactly that slope.  The not-affine-on-positive-mass property is
    decided conservatively as "no affine piece at all": cross-piece
    coincidences with a single affine map cannot occur among the instances
    this package constructs.
    """
    affine_slopes = [p.affine_slope for p in f.pieces if p.shape is CurveShape.AFFINE]
    a_flag = not affine_slopes
    b_flag = all(m != 0 for m in affine_slopes)
    return PropertyFlags(A=a_flag, B=b_flag, C=a_flag, D=b_flag)


def affine_conjugate(f: PiecewiseFn, a, b, c, d) -> PiecewiseFn:
    """The function g(x) = f(ax + b) + cx + d, represented exactly.

    Difference quotients transform as dq(g, u1, u2) = a * dq(f, T1 u1, T1 u2) + c.
    """
    a, b, c, d = map(rat, (a, b, c, d))
    if a == 0:
        raise DegenerateMapError("affine conjugation requires a != 0")
    new_pieces = []
    for p in f.pieces:
        u_lo = (p.lo - b) / a
        u_hi = (p.hi - b) / a
        u_lo, u_hi = (u_lo, u_hi) if a > 0 else (u_hi, u_lo)
        # endpoint values of g on the new domain
        ys = (p.y_start if a > 0 else p.y_end) + c * u_lo + d
        ye = (p.y_end if a > 0 else p.y_start) + c * u_hi + d
        new_pieces.append(
            Piece(Interval(u_lo, u_hi), ys, ye, p.shape,
                  height=p.height, tilt=a * p.tilt + c)
        )
    if a < 0:
        new_pieces.reverse()
    return PiecewiseFn(tuple(new_pieces))
