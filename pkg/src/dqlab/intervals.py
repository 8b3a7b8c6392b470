"""Exact arithmetic on canonical finite unions of closed intervals.

Everything here is a pure function over immutable values; all endpoints and
measures are ``fractions.Fraction`` and no rounding ever occurs.  Open/closed
distinctions are null and are not tracked by the set algebra; the only
boundary bookkeeping is the finite puncture list maintained by
:func:`minus_points`, which removes single points without changing measure.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CannotSampleError, MalformedIntervalError, UndefinedDensityError

Rat = Fraction


def rat(v) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to an exact rational."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        raise TypeError("refusing to coerce a float; pass an exact rational")
    return Fraction(v)


def rat_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", rat(self.lo))
        object.__setattr__(self, "hi", rat(self.hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint, non-adjacent, non-degenerate closed
    intervals, plus a finite list of punctured points."""

    intervals: tuple = ()
    punctures: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        object.__setattr__(self, "punctures", tuple(sorted(set(self.punctures))))

    # -- queries ---------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def measure(self) -> Fraction:
        return sum((iv.width for iv in self.intervals), Fraction(0))

    def contains(self, x) -> bool:
        x = rat(x)
        if x in self.punctures:
            return False
        return any(iv.contains(x) for iv in self.intervals)

    def covers(self, x) -> bool:
        """Membership in the closed interval part, ignoring punctures."""
        x = rat(x)
        return any(iv.contains(x) for iv in self.intervals)

    def component_containing(self, x) -> Interval | None:
        x = rat(x)
        for iv in self.intervals:
            if iv.contains(x):
                return iv
        return None

    def contains_set(self, other: "IntervalSet") -> bool:
        return difference(other, self).measure() == 0

    def hull(self) -> Interval:
        if self.is_empty:
            raise ValueError("hull of an empty set")
        return Interval(self.intervals[0].lo, self.intervals[-1].hi)

    def split_intervals(self) -> list:
        """The interval list with each puncture realized as a split point."""
        out = []
        for iv in self.intervals:
            cuts = [p for p in self.punctures if iv.lo < p < iv.hi]
            lo = iv.lo
            for p in cuts:
                out.append(Interval(lo, p))
                lo = p
            out.append(Interval(lo, iv.hi))
        return out

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "intervals": [[rat_str(iv.lo), rat_str(iv.hi)] for iv in self.intervals],
            "punctures": [rat_str(p) for p in self.punctures],
        }

    @staticmethod
    def from_json(data: dict) -> "IntervalSet":
        raw = [Interval(rat(lo), rat(hi)) for lo, hi in data["intervals"]]
        s = normalize(raw)
        punct = [rat(p) for p in data.get("punctures", [])]
        return minus_points(s, punct)

    def __repr__(self):
        parts = ",".join(f"[{iv.lo},{iv.hi}]" for iv in self.intervals)
        if self.punctures:
            return f"IntervalSet({parts} \\ {set(self.punctures)})"
        return f"IntervalSet({parts})"


@dataclass(frozen=True)
class DensityProfile:
    point: Fraction
    radii: tuple
    densities: tuple

    @property
    def final_density(self) -> Fraction:
        return self.densities[-1]


def normalize(raw) -> IntervalSet:
    """Canonicalize a list of Interval (or (lo, hi) pairs): drop degenerates,
    sort, merge overlapping and adjacent intervals.  Idempotent."""
    ivs = []
    for i, item in enumerate(raw):
        iv = item if isinstance(item, Interval) else Interval(rat(item[0]), rat(item[1]))
        if iv.lo > iv.hi:
            raise MalformedIntervalError(i, iv.lo, iv.hi)
        if iv.lo < iv.hi:
            ivs.append(iv)
    ivs.sort()
    merged = []
    for iv in ivs:
        if merged and iv.lo <= merged[-1].hi:
            if iv.hi > merged[-1].hi:
                merged[-1] = Interval(merged[-1].lo, iv.hi)
        else:
            merged.append(iv)
    return IntervalSet(tuple(merged))


def _restrict_punctures(result_intervals: IntervalSet, candidates, member_fn) -> IntervalSet:
    """Re-attach candidate punctures that are covered by the interval part but
    excluded by the true pointwise membership predicate."""
    keep = [p for p in candidates if result_intervals.covers(p) and not member_fn(p)]
    return IntervalSet(result_intervals.intervals, tuple(keep))


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    part = normalize(list(a.intervals) + list(b.intervals))
    cands = set(a.punctures) | set(b.punctures)
    return _restrict_punctures(part, cands, lambda p: a.contains(p) or b.contains(p))


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    out = []
    i = j = 0
    ai, bi = a.intervals, b.intervals
    while i < len(ai) and j < len(bi):
        lo = max(ai[i].lo, bi[j].lo)
        hi = min(ai[i].hi, bi[j].hi)
        if lo < hi:
            out.append(Interval(lo, hi))
        if ai[i].hi < bi[j].hi:
            i += 1
        else:
            j += 1
    part = IntervalSet(tuple(out))
    cands = set(a.punctures) | set(b.punctures)
    return _restrict_punctures(part, cands, lambda p: a.contains(p) and b.contains(p))


def complement_in(a: IntervalSet, universe: Interval) -> IntervalSet:
    """Complement of the interval part within a universe interval.

    Punctures of `a` are isolated points of the true complement and are null;
    they are dropped (the result is the measure-theoretic complement).
    """
    out = []
    lo = universe.lo
    for iv in a.intervals:
        s, e = max(iv.lo, universe.lo), min(iv.hi, universe.hi)
        if s >= e:
            continue
        if lo < s:
            out.append(Interval(lo, s))
        lo = max(lo, e)
    if lo < universe.hi:
        out.append(Interval(lo, universe.hi))
    return IntervalSet(tuple(out))


def difference(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    if a.is_empty:
        return IntervalSet()
    universe = a.hull()
    part = intersect(a, complement_in(b, universe))
    cands = set(a.punctures) | set(b.punctures)
    return _restrict_punctures(
        IntervalSet(part.intervals),
        cands,
        lambda p: a.contains(p) and not b.contains(p),
    )


def measure(s: IntervalSet) -> Fraction:
    return s.measure()


def density(f: IntervalSet, g: IntervalSet) -> Fraction:
    """Exact density of f in g: measure(f & g) / measure(g)."""
    mg = g.measure()
    if mg == 0:
        raise UndefinedDensityError("density against a null set is undefined")
    return intersect(f, g).measure() / mg


UNIT = Interval(Fraction(0), Fraction(1))


def density_profile(f: IntervalSet, x, radii) -> DensityProfile:
    """Exact densities of f in symmetric windows around x, clipped to [0,1].

    This is finite numerical evidence of density-point status; no limit is
    taken anywhere.
    """
    x = rat(x)
    radii = [rat(r) for r in radii]
    if not radii:
        raise ValueError("radii list must be non-empty")
    for r, r2 in zip(radii, radii[1:]):
        if r2 >= r:
            raise ValueError("radii must be strictly decreasing")
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    densities = []
    for r in radii:
        window = IntervalSet((Interval(max(x - r, UNIT.lo), min(x + r, UNIT.hi)),))
        densities.append(density(f, window))
    return DensityProfile(x, tuple(radii), tuple(densities))


def window_density(f: IntervalSet, center, radius) -> Fraction:
    """Density of f in the unclipped window [center-radius, center+radius]."""
    center, radius = rat(center), rat(radius)
    return density(f, IntervalSet((Interval(center - radius, center + radius),)))


def fat_cantor(depth: int) -> IntervalSet:
    """Smith-Volterra-Cantor set at finite depth.

    At step j (1-based) an open middle interval of length 4^-j is removed
    from each of the 2^(j-1) surviving intervals; the depth-d set has measure
    exactly 1/2 + 2^-(d+1).
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    ivs = [Interval(Fraction(0), Fraction(1))]
    for j in range(1, depth + 1):
        gap = Fraction(1, 4**j)
        nxt = []
        for iv in ivs:
            m = iv.mid
            nxt.append(Interval(iv.lo, m - gap / 2))
            nxt.append(Interval(m + gap / 2, iv.hi))
        ivs = nxt
    return IntervalSet(tuple(ivs))


def sample_points(s: IntervalSet, n: int, seed: int) -> list:
    """n reproducible points of s via inverse-measure transform of a seeded
    64-bit dyadic stream.  All points are exact rationals."""
    total = s.measure()
    if total == 0:
        raise CannotSampleError("cannot sample from a null set")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    # cumulative widths once; float keys locate the cell, exact arithmetic
    # confirms and places the point
    cum = [Fraction(0)]
    for iv in s.intervals:
        cum.append(cum[-1] + iv.width)
    cum_f = [float(c) for c in cum]
    last = len(cum) - 1
    punctures = set(s.punctures)
    points = []
    while len(points) < n:
        u = Fraction(rng.getrandbits(64), 2**64)
        target = u * total
        i = bisect.bisect_left(cum_f, float(target), 1, last)
        while i > 1 and cum[i - 1] >= target:
            i -= 1
        while i < last and cum[i] < target:
            i += 1
        p = s.intervals[i - 1].lo + (target - cum[i - 1])
        if p in punctures:
            continue
        points.append(p)
    return points


def minus_points(s: IntervalSet, pts) -> IntervalSet:
    """Remove finitely many points from s without changing its measure.

    The canonical interval list is kept un-merged; removed points live in the
    tagged puncture list.  Points outside s are ignored.
    """
    new = [rat(p) for p in pts if s.contains(rat(p))]
    if not new:
        return s
    return IntervalSet(s.intervals, s.punctures + tuple(new))
