"""Theorem-verification pipelines over difference quotient sets.

The central objects are secant slopes DQ(x1, x2) = (f(x2) - f(x1)) / (x2 - x1)
over pairs from a positive-measure set.  The pipelines here certify, at desk
scale and with exact rationals plus rigorous enclosures:

* positive image measure for C1 functions with a null zero-derivative set;
* the rotation scan: a family of secant witnesses with slopes tan(-theta)
  over a symmetric angle grid, certifying an open interval inside the DQ set;
* the secant-vs-derivative separation ("porcupine") property, statistically;
* the dense-omission construction: a full-measure set whose image misses a
  dense sequence of rationals.

Certificates are immutable and re-verifiable: each witness records a pair
and a residual bound that independent re-evaluation must reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .enclosure import Enclosure, sin_cos_scaled, tan_of
from .errors import (
    DensityTooLowError,
    DiagonalError,
    DqlabError,
    PairDegenerateError,
    PreconditionError,
    SearchFailureError,
    ThetaTooLargeError,
)
from .intervals import (
    Interval,
    IntervalSet,
    density,
    density_profile,
    fat_cantor,
    intersect,
    minus_points,
    normalize,
    rat,
    rat_str,
    sample_points,
)
from .piecewise import (
    CurveShape,
    PiecewiseFn,
    classify_properties,
    deriv,
    dq,
    evaluate,
    image_measure_bounds,
    is_c1,
    preimage,
    slope_bounds,
    value_and_deriv,
)

DEFAULT_RADII = tuple(Fraction(1, 2**k) for k in range(4, 21))
DEFAULT_DENSITY_THRESHOLD = 1 - Fraction(1, 64)
RESIDUAL_BITS = 60
ZERO_ANCHOR_BITS = 90  # |g(+-1)| must be below 2^-ZERO_ANCHOR_BITS


# ---------------------------------------------------------------------------
# samples and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DQSample:
    x1: Fraction
    x2: Fraction
    dq_value: Enclosure
    d1: Enclosure
    d2: Enclosure


@dataclass(frozen=True)
class PositiveImageReport:
    x0: Fraction
    m: Fraction
    window: Interval
    lower_bound: Fraction
    image_bounds: tuple
    profile: object


@dataclass(frozen=True)
class PorcupineReport:
    pairs: int
    equality_hits: int
    tolerance: Fraction
    note: str = (
        "statistical evidence only: the almost-every statement has no "
        "finite-data certificate"
    )


@dataclass(frozen=True)
class OmissionReport:
    plateau_heights: tuple
    omitted: tuple
    survivor_set: IntervalSet
    samples: int
    violations: int


@dataclass(frozen=True)
class RotationFrame:
    theta: Fraction
    i_minus: Interval
    i_plus: Interval
    f_minus: IntervalSet
    f_plus: IntervalSet
    m: Fraction
    M: Fraction


@dataclass(frozen=True)
class Witness:
    theta: Fraction
    x_minus: Fraction
    x_plus: Fraction
    residual_bound: Fraction


@dataclass(frozen=True)
class DQCertificate:
    center_pair: tuple
    certified_interval: tuple  # open (lo, hi), exact rationals
    witnesses: tuple
    frame: RotationFrame
    transform: tuple | None = None  # (a, b, c, d) when produced by dq_interior

    def to_json(self) -> dict:
        return {
            "center_pair": [rat_str(self.center_pair[0]), rat_str(self.center_pair[1])],
            "certified_interval": [rat_str(self.certified_interval[0]),
                                   rat_str(self.certified_interval[1])],
            "witnesses": [
                {
                    "theta": rat_str(w.theta),
                    "x_minus": rat_str(w.x_minus),
                    "x_plus": rat_str(w.x_plus),
                    "residual_bound": rat_str(w.residual_bound),
                }
                for w in self.witnesses
            ],
            "transform": None if self.transform is None else
                         [rat_str(t) for t in self.transform],
            "frame": {
                "i_minus": [rat_str(self.frame.i_minus.lo), rat_str(self.frame.i_minus.hi)],
                "i_plus": [rat_str(self.frame.i_plus.lo), rat_str(self.frame.i_plus.hi)],
                "m": rat_str(self.frame.m),
                "M": rat_str(self.frame.M),
            },
        }


# ---------------------------------------------------------------------------
# Luzin-type bound and positive image measure
# ---------------------------------------------------------------------------


def luzin_bound(f: PiecewiseFn, e: IntervalSet) -> Fraction:
    """sup|f'| * measure(e): a quantitative Luzin-type upper bound on the
    image measure, exact as a rational."""
    if not is_c1(f):
        raise PreconditionError("luzin_bound requires a C1 function")
    me = e.measure()
    if me == 0:
        return Fraction(0)
    lo, hi = slope_bounds(f, normalize([f.domain]))
    sup = max(abs(lo), abs(hi))
    return sup * me


def verify_positive_image(f: PiecewiseFn, e: IntervalSet,
                          radii=DEFAULT_RADII,
                          density_threshold: Fraction = DEFAULT_DENSITY_THRESHOLD,
                          seed: int = 0) -> PositiveImageReport:
    """Certify a positive lower bound on measure(f(e)).

    Finds a point x0 of e with a high density profile and non-zero
    derivative, an interval I around x0 where |f'| stays above half of
    |f'(x0)| with one sign, and returns (m/2) * measure(e & I) > 0, bracketed
    by the exact image-measure enclosure.
    """
    if e.measure() == 0:
        raise PreconditionError("e must have positive measure")
    flags = classify_properties(f)
    if not flags.B:
        raise PreconditionError("function has a zero-slope plateau (property B fails)")
    if not is_c1(f):
        raise PreconditionError("verify_positive_image requires a C1 function")
    radii = tuple(rat(r) for r in radii)
    candidates = [iv.mid for iv in sorted(e.intervals, key=lambda iv: -iv.width)[:64]]
    candidates += sample_points(e, 32, seed)
    for x0 in candidates:
        if not f.domain.contains(x0):
            continue
        profile = density_profile(e, x0, radii)
        if profile.final_density < density_threshold:
            continue
        try:
            d0 = deriv(f, x0).abs()
        except DqlabError:
            continue
        if d0.lo <= 0:
            continue
        m = d0.lo
        window = _slope_window(f, x0, m)
        if window is None:
            continue
        region = intersect(e, IntervalSet((window,)))
        if region.measure() == 0:
            continue
        lower = m / 2 * region.measure()
        image_bounds = image_measure_bounds(f, region)
        return PositiveImageReport(x0, m, window, lower, image_bounds, profile)
    raise SearchFailureError(radii)


def _slope_window(f: PiecewiseFn, x0: Fraction, m: Fraction) -> Interval | None:
    """Largest window from a halving schedule on which |f'| >= m/2 with a
    single sign."""
    r = Fraction(1, 4)
    for _ in range(40):
        lo = max(f.domain.lo, x0 - r)
        hi = min(f.domain.hi, x0 + r)
        if lo < hi:
            slo, shi = slope_bounds(f, IntervalSet((Interval(lo, hi),)))
            if slo >= m / 2 or shi <= -m / 2:
                return Interval(lo, hi)
        r /= 2
        if r < Fraction(1, 2**40):
            break
    return None


# ---------------------------------------------------------------------------
# sampling-based evidence: DQ clouds and the porcupine property
# ---------------------------------------------------------------------------


def _sample_pairs(f: PiecewiseFn, e: IntervalSet, n: int, seed: int,
                  precision_bits: int):
    """n off-diagonal pairs from e x e with dq and derivative enclosures;
    pairs hitting ambiguous-derivative joins are skipped and redrawn."""
    pts = sample_points(e, 2 * n + 64, seed)
    out = []
    i = 0
    exact = Enclosure.exact
    while len(out) < n and i + 1 < len(pts):
        x1, x2 = pts[i], pts[i + 1]
        i += 2
        if x1 == x2:
            continue
        try:
            v1, d1 = value_and_deriv(f, x1, precision_bits)
            v2, d2 = value_and_deriv(f, x2, precision_bits)
        except DqlabError:
            continue
        dq_e = (v2 - v1) / exact(x2 - x1)
        out.append(DQSample(x1, x2, dq_e, d1, d2))
    return out


def dq_cloud(f: PiecewiseFn, e: IntervalSet, n: int, seed: int,
             precision_bits: int = 96):
    """n difference-quotient samples over e plus a summary of the empirical
    range and the largest interior gap of the sorted values."""
    if n < 1 or e.measure() == 0:
        raise PreconditionError("need n >= 1 and a positive-measure set")
    samples = _sample_pairs(f, e, n, seed, precision_bits)
    mids = sorted(s.dq_value.mid for s in samples)
    gaps = [b - a for a, b in zip(mids, mids[1:])]
    hull_bounds = slope_bounds(f, normalize([e.hull()]))
    summary = {
        "min": mids[0],
        "max": mids[-1],
        "largest_gap": max(gaps) if gaps else Fraction(0),
        "slope_bounds": hull_bounds,
        "outside_mvt": sum(
            1 for s in samples
            if s.dq_value.lo < hull_bounds[0] or s.dq_value.hi > hull_bounds[1]
        ),
    }
    return samples, summary


def _c_holds_on(f: PiecewiseFn, e: IntervalSet) -> bool:
    """Property C for f restricted to e: no affine piece meets e on positive
    measure (the restriction is then nowhere affine on positive mass)."""
    for p in f.pieces:
        if p.shape is CurveShape.AFFINE:
            if intersect(e, IntervalSet((p.domain,))).measure() > 0:
                return False
    return True


# The porcupine loop runs on outward-rounded scaled-integer intervals
# ([lo, hi] * 2^-q_bits); each directed rounding widens by one ulp, so rigor
# is preserved while skipping per-pair Fraction normalization.


def _scale_down(x: Fraction, q_bits: int) -> int:
    return (x.numerator << q_bits) // x.denominator


def _scale_up(x: Fraction, q_bits: int) -> int:
    return -((-x.numerator << q_bits) // x.denominator)


def _ival_mul_frac(lo: int, hi: int, fr: Fraction) -> tuple:
    n, d = fr.numerator, fr.denominator
    if n < 0:
        lo, hi = hi, lo
    return (lo * n) // d, -((hi * -n) // d)


def _ival_mul(a_lo, a_hi, b_lo, b_hi, q_bits):
    ps = (a_lo * b_lo, a_lo * b_hi, a_hi * b_lo, a_hi * b_hi)
    return min(ps) >> q_bits, -((-max(ps)) >> q_bits)


def _scaled_value_deriv(f: PiecewiseFn, x: Fraction, prec: int, q_bits: int):
    """(v_lo, v_hi, d_lo, d_hi) ints scaled by 2^-q_bits, or None when x is
    not interior to a pure sinusoid piece (caller falls back to enclosures)."""
    i = f.piece_index_at(x)
    p = f.pieces[i]
    if not (p.lo < x < p.hi) or p.shape is CurveShape.AFFINE:
        return None
    memo = p._memo
    key = ("scaled", prec, q_bits)
    got = memo.get(key)
    if got is None:
        half, amp = p._coeffs(prec)
        got = memo[key] = (half, _scale_down(amp.lo, q_bits),
                           _scale_up(amp.hi, q_bits),
                           _scale_down(p.tilt, q_bits), _scale_up(p.tilt, q_bits))
    half, amp_lo, amp_hi, t_lo, t_hi = got
    s = (x - p.lo) / p.width
    one = 1 << q_bits
    if p.shape is CurveShape.SIN_HALF:
        s_lo, s_hi, c_lo, c_hi = sin_cos_scaled(s - Fraction(1, 2), prec, q_bits)
        arc_lo, arc_hi = _ival_mul_frac(s_lo + one, s_hi + one, half)
        d_lo, d_hi = _ival_mul(amp_lo, amp_hi, c_lo, c_hi, q_bits)
    elif p.shape is CurveShape.COS_HALF:
        s_lo, s_hi, c_lo, c_hi = sin_cos_scaled(s, prec, q_bits)
        arc_lo, arc_hi = _ival_mul_frac(one - c_hi, one - c_lo, half)
        d_lo, d_hi = _ival_mul(amp_lo, amp_hi, s_lo, s_hi, q_bits)
    else:
        s_lo, s_hi, c_lo, c_hi = sin_cos_scaled(2 * s - 1, prec, q_bits)
        arc_lo, arc_hi = _ival_mul_frac(c_lo + one, c_hi + one, half)
        d_lo, d_hi = _ival_mul(amp_lo, amp_hi, s_lo, s_hi, q_bits)
    chord = p.y_start + p.tilt * (x - p.lo) if p.tilt else p.y_start
    return (_scale_down(chord, q_bits) + arc_lo,
            _scale_up(chord, q_bits) + arc_hi,
            t_lo + d_lo, t_hi + d_hi)


def porcupine_check(f: PiecewiseFn, e: IntervalSet, n: int, seed: int,
                    tolerance: Fraction = Fraction(1, 2**80),
                    precision_bits: int = 96) -> PorcupineReport:
    """Count sampled pairs whose secant slope is indistinguishable from the
    derivative at either endpoint at the given tolerance.  Expected to be
    zero whenever the restriction of f to e is nowhere affine."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if not _c_holds_on(f, e):
        raise PreconditionError(
            "f is affine on a positive-measure part of e (property C fails there)"
        )
    prec = precision_bits
    q_bits = prec + 16
    pts = sample_points(e, 2 * n + 64, seed)
    pairs = hits = 0
    i = 0
    while pairs < n and i + 1 < len(pts):
        x1, x2 = pts[i], pts[i + 1]
        i += 2
        if x1 == x2:
            continue
        if x2 < x1:
            x1, x2 = x2, x1
        r1 = _scaled_value_deriv(f, x1, prec, q_bits)
        r2 = _scaled_value_deriv(f, x2, prec, q_bits)
        if r1 is None or r2 is None:
            if not _pair_hit_slow(f, x1, x2, tolerance, prec):
                pairs += 1
                continue
            pairs += 1
            hits += 1
            continue
        v1_lo, v1_hi, d1_lo, d1_hi = r1
        v2_lo, v2_hi, d2_lo, d2_hi = r2
        dx = x2 - x1
        # dq interval, still scaled by 2^-q_bits
        dq_lo = ((v2_lo - v1_hi) * dx.denominator) // dx.numerator
        dq_hi = -(((v1_lo - v2_hi) * dx.denominator) // dx.numerator)
        tol = _scale_up(tolerance, q_bits) + 2
        sep1 = dq_lo - d1_hi > tol or d1_lo - dq_hi > tol
        sep2 = dq_lo - d2_hi > tol or d2_lo - dq_hi > tol
        pairs += 1
        if not (sep1 and sep2):
            # ambiguous at kernel width: settle with full enclosures
            if _pair_hit_slow(f, x1, x2, tolerance, prec):
                hits += 1
    return PorcupineReport(pairs=pairs, equality_hits=hits, tolerance=tolerance)


def _pair_hit_slow(f, x1, x2, tolerance, prec) -> bool:
    try:
        _, d1 = value_and_deriv(f, x1, prec)
        _, d2 = value_and_deriv(f, x2, prec)
        q = dq(f, x1, x2, prec)
    except DqlabError:
        return False
    return q.distance_to(d1) <= tolerance or q.distance_to(d2) <= tolerance


# ---------------------------------------------------------------------------
# rotation scan
# ---------------------------------------------------------------------------


def _value_range(g: PiecewiseFn, iv: Interval, prec: int) -> tuple:
    """(outer, inner) enclosure pair of g's range over iv, assuming g is
    monotone there (guaranteed by the slope checks before use)."""
    va = evaluate(g, iv.lo, prec)
    vb = evaluate(g, iv.hi, prec)
    lo_e, hi_e = (va, vb) if va.mid <= vb.mid else (vb, va)
    outer = (lo_e.lo, hi_e.hi)
    inner = (lo_e.hi, hi_e.lo)
    return outer, inner


def _window_schedule(limit: Fraction):
    r = Fraction(1, 4)
    while r >= limit:
        yield r
        r /= 2


def _select_windows(g, f_set, m, M, prec):
    """Closed windows around -1 and 1 satisfying the scan's side conditions:
    containment in (-3/2,-1/2) and (1/2,3/2), slope bounds strictly inside
    (m, M) in absolute value, and f_set density above 1 - m/4M."""
    required = 1 - m / (4 * M)
    best_density = Fraction(0)
    for r in _window_schedule(Fraction(1, 2**20)):
        windows = []
        ok = True
        for center in (Fraction(-1), Fraction(1)):
            lo = max(g.domain.lo, center - r)
            hi = min(g.domain.hi, center + r)
            if not (lo <= center <= hi) or lo >= hi:
                ok = False
                break
            if abs(center) == 1 and not (abs(lo) > Fraction(1, 2) and abs(hi) < Fraction(3, 2)):
                ok = False
                break
            slo, shi = slope_bounds(g, IntervalSet((Interval(lo, hi),)))
            if not (slo > m or shi < -m):
                ok = False
                break
            if max(abs(slo), abs(shi)) >= M:
                ok = False
                break
            windows.append(Interval(lo, hi))
        if not ok:
            continue
        i_minus, i_plus = windows
        d_minus = density(f_set, IntervalSet((i_minus,)))
        d_plus = density(f_set, IntervalSet((i_plus,)))
        best_density = max(best_density, min(d_minus, d_plus))
        if d_minus > required and d_plus > required:
            return _align_ranges(g, i_minus, i_plus, f_set, required, prec)
    raise DensityTooLowError(best_density, required)


def _align_ranges(g, i_minus, i_plus, f_set, required, prec):
    """Shrink the window with the wider value range so both ranges nearly
    coincide (the exact-equality condition of the underlying argument),
    via monotone-inverse bisection on enclosures."""
    for _ in range(4):
        (om, im), (op, ip) = _value_range(g, i_minus, prec), _value_range(g, i_plus, prec)
        # common inner range
        c_lo, c_hi = max(im[0], ip[0]), min(im[1], ip[1])
        if c_lo >= c_hi:
            raise DqlabError("value ranges of the two windows do not overlap")
        shrunk = False
        if om[0] < c_lo - (c_hi - c_lo) or om[1] > c_hi + (c_hi - c_lo):
            i_minus = _inverse_window(g, i_minus, c_lo, c_hi, prec)
            shrunk = True
        if op[0] < c_lo - (c_hi - c_lo) or op[1] > c_hi + (c_hi - c_lo):
            i_plus = _inverse_window(g, i_plus, c_lo, c_hi, prec)
            shrunk = True
        if not shrunk:
            break
    for iv in (i_minus, i_plus):
        d = density(f_set, IntervalSet((iv,)))
        if d <= required:
            raise DensityTooLowError(d, required)
    return i_minus, i_plus


def _inverse_window(g, iv: Interval, y_lo, y_hi, prec) -> Interval:
    """Conservative inner pullback of [y_lo, y_hi] under monotone g|iv."""
    lo, hi = iv.lo, iv.hi
    increasing = evaluate(g, lo, prec).mid < evaluate(g, hi, prec).mid
    lo_target, hi_target = (y_lo, y_hi) if increasing else (y_hi, y_lo)
    new_lo = _monotone_inverse(g, lo, hi, lo_target, prec, pick_upper=increasing)
    new_hi = _monotone_inverse(g, lo, hi, hi_target, prec, pick_upper=not increasing)
    if new_lo >= new_hi:
        raise DqlabError("window collapsed while aligning value ranges")
    return Interval(new_lo, new_hi)


def _monotone_inverse(g, a, b, y, prec, pick_upper: bool, steps: int = 80) -> Fraction:
    """Bisection solve g(x) = y on [a, b] (monotone); returns the bracket
    endpoint on the side selected by pick_upper (conservative inner)."""
    va = evaluate(g, a, prec)
    if not Enclosure.exact(y).disjoint_from(va):
        return a
    vb = evaluate(g, b, prec)
    if not Enclosure.exact(y).disjoint_from(vb):
        return b
    increasing = va.mid < vb.mid
    below = va.hi < y if increasing else va.lo > y
    if not below:
        return a  # y outside range on this side; degenerate, keep endpoint
    for _ in range(steps):
        mid = (a + b) / 2
        vm = evaluate(g, mid, prec)
        if vm.hi < y if increasing else vm.lo > y:
            a = mid
        elif vm.lo > y if increasing else vm.hi < y:
            b = mid
        else:
            return mid
    return b if pick_upper else a


def _candidate_points(f_comp: IntervalSet, cap: int = 48):
    comps = sorted(f_comp.intervals, key=lambda iv: -iv.width)
    out = []
    for frac_num, frac_den in ((1, 2), (1, 4), (3, 4), (3, 8), (5, 8)):
        for iv in comps:
            out.append(iv.lo + iv.width * Fraction(frac_num, frac_den))
            if len(out) >= cap:
                return out
    return out


def _find_witness(g, theta, f_minus, f_plus, i_plus, m,
                  residual_bits=RESIDUAL_BITS, prec=None):
    """A secant witness at angle theta: u in F-, v in F+ whose chord slope is
    tan(-theta) up to the residual bound.  Returns None on failure."""
    prec = prec or residual_bits + 48
    s = tan_of(-theta, prec)
    if s.abs().hi >= m:
        return None
    target_res = Fraction(1, 2**residual_bits)

    def w(x):
        return evaluate(g, x, prec) - s * Enclosure.exact(x)

    wp, wq = w(i_plus.lo), w(i_plus.hi)
    w_inner_lo = min(wp.hi, wq.hi)
    w_inner_hi = max(wp.lo, wq.lo)
    if w_inner_lo >= w_inner_hi:
        return None
    for u in _candidate_points(f_minus):
        t = w(u)
        if not (w_inner_lo < t.lo and t.hi < w_inner_hi):
            continue
        hit = _bracket_crossing(g, w, t, i_plus, f_plus, target_res, prec)
        if hit is None:
            continue
        v = hit
        h = (evaluate(g, v, prec) - evaluate(g, u, prec)
             - s * Enclosure.exact(v - u))
        residual = h.abs().hi
        if residual <= target_res:
            return Witness(theta, u, v, residual)
    return None


def _bracket_crossing(g, w, target: Enclosure, i_plus: Interval,
                      f_plus: IntervalSet, target_res: Fraction, prec: int):
    """Bisect w(v) = target over i_plus; succeed when the residual enclosure
    is small enough and the final bracket sits inside one component of F+."""
    a, b = i_plus.lo, i_plus.hi
    da = w(a) - target
    db = w(b) - target
    if not (da.hi < 0 < db.lo or db.hi < 0 < da.lo):
        return None
    a_neg = da.hi < 0
    floor_width = target_res / 2**16
    while True:
        mid = (a + b) / 2
        dm = w(mid) - target
        if dm.lo > 0:
            # mid is on the positive side of the crossing
            a, b = (a, mid) if a_neg else (mid, b)
        elif dm.hi < 0:
            a, b = (mid, b) if a_neg else (a, mid)
        else:
            # ambiguous sign: w(mid) is within enclosure width of the target
            if dm.abs().hi <= target_res:
                comp = f_plus.component_containing(mid)
                if comp is not None and comp.lo <= a and b <= comp.hi:
                    return mid
                if comp is not None and comp.contains(mid):
                    # bracket spans a gap edge but mid itself is interior
                    return mid
                return None
            return None
        if b - a <= floor_width:
            mid = (a + b) / 2
            comp = f_plus.component_containing(mid)
            if comp is None or not (comp.lo <= a and b <= comp.hi):
                return None
            return mid


def rotation_scan(g: PiecewiseFn, f_set: IntervalSet,
                  theta_max: Fraction | None = None, grid: int = 21,
                  precision_bits: int = 120,
                  residual_bits: int = RESIDUAL_BITS) -> DQCertificate:
    """Certify an open slope interval inside the DQ set of g over f_set.

    g must (numerically) vanish at -1 and 1 with non-zero derivative there.
    For each angle theta in a symmetric grid, finds u in f_set near -1 and
    v in f_set near 1 whose secant slope equals tan(-theta) within the
    residual bound, i.e. the rotated graph pair crosses a common level.
    """
    prec = precision_bits
    for x in (Fraction(-1), Fraction(1)):
        if not g.domain.contains(x):
            raise PreconditionError("g must be defined near -1 and 1")
        if evaluate(g, x, prec).abs().hi > Fraction(1, 2**ZERO_ANCHOR_BITS):
            raise PreconditionError(f"|g({x})| is not within 2^-{ZERO_ANCHOR_BITS} of 0")
    d_m = deriv(g, Fraction(-1), prec).abs()
    d_p = deriv(g, Fraction(1), prec).abs()
    if d_m.lo <= 0 or d_p.lo <= 0:
        raise PreconditionError("derivative enclosures at +-1 must exclude 0")
    m = min(d_m.lo, d_p.lo) / 2
    M = 2 * max(d_m.hi, d_p.hi)
    i_minus, i_plus = _select_windows(g, f_set, m, M, prec)
    f_minus = intersect(f_set, IntervalSet((i_minus,)))
    f_plus = intersect(f_set, IntervalSet((i_plus,)))

    def witness_at(theta):
        return _find_witness(g, theta, f_minus, f_plus, i_plus, m,
                             residual_bits, prec)

    if theta_max is None:
        theta_max = _admissible_theta(witness_at) / 2
        if theta_max <= 0:
            raise ThetaTooLargeError(Fraction(0), Fraction(0))
    theta_max = rat(theta_max)
    witnesses = []
    for i in range(grid):
        theta = theta_max * Fraction(2 * i - (grid - 1), grid - 1) if grid > 1 else Fraction(0)
        wit = witness_at(theta)
        if wit is None:
            raise ThetaTooLargeError(theta, _admissible_theta(witness_at))
        witnesses.append(wit)
    t_lo = tan_of(theta_max, prec).lo
    frame = RotationFrame(Fraction(0), i_minus, i_plus, f_minus, f_plus, m, M)
    return DQCertificate(
        center_pair=(Fraction(-1), Fraction(1)),
        certified_interval=(-t_lo, t_lo),
        witnesses=tuple(witnesses),
        frame=frame,
    )


def _admissible_theta(witness_at, floor: Fraction = Fraction(1, 2**40)) -> Fraction:
    """Supremum (by bisection, 16 refinement steps) of angles at which both
    +theta and -theta admit witnesses."""
    theta = Fraction(1, 2)
    while theta >= floor:
        if witness_at(theta) is not None and witness_at(-theta) is not None:
            break
        theta /= 2
    else:
        return Fraction(0)
    lo, hi = theta, theta * 2
    for _ in range(16):
        mid = (lo + hi) / 2
        if witness_at(mid) is not None and witness_at(-mid) is not None:
            lo = mid
        else:
            hi = mid
    return lo


def verify_witness(g: PiecewiseFn, w: Witness, precision_bits: int = 160) -> bool:
    """Independently re-evaluate a witness: the chord residual at higher
    precision must stay within the recorded bound."""
    s = tan_of(-w.theta, precision_bits)
    h = (evaluate(g, w.x_plus, precision_bits)
         - evaluate(g, w.x_minus, precision_bits)
         - s * Enclosure.exact(w.x_plus - w.x_minus))
    return h.abs().hi <= w.residual_bound + Fraction(1, 2**(precision_bits - 16))


# ---------------------------------------------------------------------------
# Theorem-2-part-2 composition
# ---------------------------------------------------------------------------


def _pullback_set(e: IntervalSet, a: Fraction, b: Fraction) -> IntervalSet:
    """Exact preimage of e under x -> a*x + b."""
    ivs = []
    for iv in e.intervals:
        u, v = (iv.lo - b) / a, (iv.hi - b) / a
        ivs.append(Interval(min(u, v), max(u, v)))
    return normalize(ivs)


def _round_to_bits(x: Fraction, bits: int) -> Fraction:
    q = 2**bits
    return Fraction(round(x * q), q)


def dq_interior(f: PiecewiseFn, e: IntervalSet, pair,
                grid: int = 21, radii=None,
                density_threshold: Fraction = DEFAULT_DENSITY_THRESHOLD,
                precision_bits: int = 120) -> DQCertificate:
    """Certify that the secant slope of f at the given pair lies in the
    interior of the DQ set of f over e.

    Builds the normalizing maps T1 (sending -1, 1 to the pair) and T2
    (cancelling the endpoint values), pulls e back through T1, runs the
    rotation scan on g = f(T1(x)) + T2(x), and maps the certified slope
    interval back by the dilation-translation law.
    """
    x1, x2 = rat(pair[0]), rat(pair[1])
    if x1 == x2:
        raise DiagonalError("pair must be off-diagonal")
    from .piecewise import affine_conjugate  # local to avoid cycle noise

    radii = tuple(rat(r) for r in (radii or DEFAULT_RADII[:7]))
    for x in (x1, x2):
        prof = density_profile(e, x, radii)
        if prof.final_density < density_threshold:
            raise PreconditionError(
                f"point {x} has density {prof.final_density} < {density_threshold}"
            )
    d1 = deriv(f, x1, precision_bits)
    d2 = deriv(f, x2, precision_bits)
    q = dq(f, x1, x2, precision_bits)
    if not (q.disjoint_from(d1) and q.disjoint_from(d2)):
        raise PairDegenerateError(
            "secant slope is not separated from the endpoint derivatives"
        )
    a = (x2 - x1) / 2
    b = (x1 + x2) / 2
    f1 = evaluate(f, x1, precision_bits + 40)
    f2 = evaluate(f, x2, precision_bits + 40)
    c = _round_to_bits((f1 - f2).mid / 2, precision_bits + 16)
    d = _round_to_bits((-(f1 + f2)).mid / 2, precision_bits + 16)
    g = affine_conjugate(f, a, b, c, d)
    big_f = _pullback_set(e, a, b)
    cert = rotation_scan(g, big_f, grid=grid, precision_bits=precision_bits)
    s_lo, s_hi = cert.certified_interval
    # containment: a * dq(f) + c = dq(g, -1, 1) must sit strictly inside
    qg = q * Fraction(a) + Fraction(c)
    if not (s_lo < qg.lo and qg.hi < s_hi):
        raise DqlabError("certified interval failed to cover the center pair")
    ends = sorted(((s_lo - c) / a, (s_hi - c) / a))
    return DQCertificate(
        center_pair=(x1, x2),
        certified_interval=(ends[0], ends[1]),
        witnesses=cert.witnesses,
        frame=cert.frame,
        transform=(a, b, c, d),
    )


def find_admissible_pair(f: PiecewiseFn, e: IntervalSet, seed: int = 1,
                         radii=None,
                         density_threshold: Fraction = DEFAULT_DENSITY_THRESHOLD,
                         precision_bits: int = 96) -> tuple:
    """A seeded search for a pair satisfying dq_interior's preconditions."""
    radii = tuple(rat(r) for r in (radii or DEFAULT_RADII[:7]))
    # stride through components by position so candidates spread over hull
    comps = sorted(e.intervals, key=lambda iv: iv.lo)
    stride = max(1, len(comps) // 12)
    pts = [iv.mid for iv in comps[::stride]]
    pts += sample_points(e, 16, seed)
    good = []
    for x in pts:
        if not f.domain.contains(x):
            continue
        if density_profile(e, x, radii).final_density >= density_threshold:
            good.append(x)
        if len(good) >= 16:
            break
    degenerate_only = False
    for i in range(len(good)):
        for j in range(i + 1, len(good)):
            x1, x2 = sorted((good[i], good[j]))
            if x2 - x1 < Fraction(1, 8):
                continue
            try:
                d1 = deriv(f, x1, precision_bits)
                d2 = deriv(f, x2, precision_bits)
                q = dq(f, x1, x2, precision_bits)
            except DqlabError:
                continue
            if q.disjoint_from(d1) and q.disjoint_from(d2):
                return (x1, x2)
            degenerate_only = True
    if degenerate_only:
        raise PairDegenerateError(
            "every candidate pair has its secant slope meeting an endpoint "
            "derivative (f is affine-like on the sampled region)"
        )
    raise SearchFailureError(radii, "no admissible pair found")


# ---------------------------------------------------------------------------
# dense omission
# ---------------------------------------------------------------------------


def _calkin_wilf():
    q = Fraction(1)
    while True:
        yield q
        q = 1 / (2 * (q.numerator // q.denominator) - q + 1)


def dense_sequence(count: int, skip=()) -> list:
    """First `count` members of the Calkin-Wilf enumeration restricted to
    [0, 1], skipping the given values.  Deterministic and dense."""
    skip = set(rat(s) for s in skip)
    out = []
    for q in _calkin_wilf():
        if q <= 1 and q not in skip:
            out.append(q)
            if len(out) == count:
                return out


def no_interval_image(f: PiecewiseFn, count: int, samples: int = 100,
                      seed: int = 0, precision_bits: int = 96) -> OmissionReport:
    """Build a full-measure subset of [0,1] whose image under f avoids a
    dense rational sequence.

    The positive-measure level sets of f are exactly the plateau heights of
    its zero-slope affine pieces; the dense sequence skips them, so every
    preimage is a finite point set and removing those points keeps measure 1.
    Sampled image enclosures are then checked against every omitted value.
    """
    if count < 1:
        raise PreconditionError("count must be >= 1")
    heights = sorted({p.y_start for p in f.pieces
                      if p.shape is CurveShape.AFFINE and p.affine_slope == 0})
    b_values = dense_sequence(count, skip=heights)
    survivor = normalize([Interval(Fraction(0), Fraction(1))])
    for b in b_values:
        points, plateaus = preimage(f, b, precision_bits=80)
        if plateaus.measure() > 0:
            raise DqlabError("dense sequence unexpectedly hit a plateau height")
        survivor = minus_points(survivor, [p.mid for p in points
                                           if Fraction(0) <= p.mid <= Fraction(1)])
    violations = 0
    for x in sample_points(survivor, samples, seed):
        v = evaluate(f, x, precision_bits)
        for b in b_values:
            if v.contains(b):
                v2 = evaluate(f, x, 4 * precision_bits)
                if v2.contains(b):
                    violations += 1
    return OmissionReport(
        plateau_heights=tuple(heights),
        omitted=tuple(b_values),
        survivor_set=survivor,
        samples=samples,
        violations=violations,
    )
