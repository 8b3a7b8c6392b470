"""Rational enclosures of real values.

An :class:`Enclosure` is a pair of exact rationals [lo, hi] guaranteed to
contain the real value under discussion.  All arithmetic is outward-rounded
interval arithmetic over ``fractions.Fraction``, so enclosures stay rigorous
under composition.  Transcendental endpoints (sin, cos, tan at rational
arguments) come from MPFR via gmpy2 with a generous error pad: we compute at
``prec + GUARD_BITS`` bits and widen by 2^-(prec+16), which dominates the
accumulated rounding error by a margin of about 2^10.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

GUARD_BITS = 32
PAD_BITS = 16

Rat = Fraction


def _mpfr_to_fraction(x) -> Fraction:
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def _pi_bounds(prec: int) -> tuple[Fraction, Fraction]:
    with gmpy2.context(precision=prec, round=gmpy2.RoundDown):
        lo = gmpy2.const_pi()
    with gmpy2.context(precision=prec, round=gmpy2.RoundUp):
        hi = gmpy2.const_pi()
    return _mpfr_to_fraction(lo), _mpfr_to_fraction(hi)


#: Rational bounds on pi, used by every closed-form slope bound.
PI_LO, PI_HI = _pi_bounds(320)


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure: [{self.lo}, {self.hi}]")

    @staticmethod
    def exact(v) -> "Enclosure":
        v = Fraction(v)
        return Enclosure(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, v) -> bool:
        return self.lo <= v <= self.hi

    def strictly_positive(self) -> bool:
        return self.lo > 0

    def strictly_negative(self) -> bool:
        return self.hi < 0

    def disjoint_from(self, other: "Enclosure") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def distance_to(self, other: "Enclosure") -> Fraction:
        """Smallest |a - b| over a in self, b in other (0 when they overlap)."""
        if self.hi < other.lo:
            return other.lo - self.hi
        if other.hi < self.lo:
            return self.lo - other.hi
        return Fraction(0)

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __add__(self, other) -> "Enclosure":
        other = _coerce(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other) -> "Enclosure":
        other = _coerce(other)
        return Enclosure(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other) -> "Enclosure":
        return _coerce(other) - self

    def __mul__(self, other) -> "Enclosure":
        other = _coerce(other)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Enclosure(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Enclosure":
        other = _coerce(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("division by an enclosure containing zero")
        quotients = (
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        )
        return Enclosure(min(quotients), max(quotients))

    def __rtruediv__(self, other) -> "Enclosure":
        return _coerce(other) / self

    def abs(self) -> "Enclosure":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enclosure(Fraction(0), max(-self.lo, self.hi))

    def widened(self, eps: Fraction) -> "Enclosure":
        return Enclosure(self.lo - eps, self.hi + eps)

    def __repr__(self):
        if self.is_exact:
            return f"Enclosure({self.lo})"
        return f"Enclosure[{self.lo}, {self.hi}]"


def _coerce(v) -> Enclosure:
    if isinstance(v, Enclosure):
        return v
    return Enclosure.exact(v)


def _mpfr_point(fn, args_num: Fraction, prec: int, times_pi: bool) -> Enclosure:
    """Evaluate fn at args_num (optionally times pi) with a rigorous pad."""
    work = prec + GUARD_BITS
    with gmpy2.context(precision=work):
        x = gmpy2.mpfr(args_num.numerator) / gmpy2.mpfr(args_num.denominator)
        if times_pi:
            x = x * gmpy2.const_pi()
        v = _mpfr_to_fraction(fn(x))
    pad = _pad(prec)
    return Enclosure(v - pad, v + pad)


@functools.lru_cache(maxsize=None)
def _pad(prec: int) -> Fraction:
    return Fraction(1, 2 ** (prec + PAD_BITS))


def _reduce_mod_2(q: Fraction) -> Fraction:
    """Reduce q into [-1, 1] modulo 2 (argument in units of pi)."""
    n = q.numerator // (2 * q.denominator)
    r = q - 2 * n
    if r > 1:
        r -= 2
    return r


# Exact values of sin(pi*q) / cos(pi*q) at quarter-period arguments.
_SIN_EXACT = {
    Fraction(0): Fraction(0),
    Fraction(1, 2): Fraction(1),
    Fraction(-1, 2): Fraction(-1),
    Fraction(1): Fraction(0),
    Fraction(-1): Fraction(0),
}
_COS_EXACT = {
    Fraction(0): Fraction(1),
    Fraction(1, 2): Fraction(0),
    Fraction(-1, 2): Fraction(0),
    Fraction(1): Fraction(-1),
    Fraction(-1): Fraction(-1),
}


def sin_pi(q, prec: int = 96) -> Enclosure:
    """Enclosure of sin(pi * q) for rational q; exact at quarter periods."""
    r = _reduce_mod_2(Fraction(q))
    if r in _SIN_EXACT:
        return Enclosure.exact(_SIN_EXACT[r])
    return _mpfr_point(gmpy2.sin, r, prec, times_pi=True)


def cos_pi(q, prec: int = 96) -> Enclosure:
    """Enclosure of cos(pi * q) for rational q; exact at quarter periods."""
    r = _reduce_mod_2(Fraction(q))
    if r in _COS_EXACT:
        return Enclosure.exact(_COS_EXACT[r])
    return _mpfr_point(gmpy2.cos, r, prec, times_pi=True)


def sin_cos_pi(q, prec: int = 96) -> tuple:
    """(sin, cos) enclosures of pi * q from a single MPFR evaluation."""
    r = _reduce_mod_2(Fraction(q))
    if r in _SIN_EXACT:
        return Enclosure.exact(_SIN_EXACT[r]), Enclosure.exact(_COS_EXACT[r])
    with gmpy2.context(precision=prec + GUARD_BITS):
        x = gmpy2.mpfr(r.numerator) / gmpy2.mpfr(r.denominator) * gmpy2.const_pi()
        s, c = gmpy2.sin_cos(x)
        vs, vc = _mpfr_to_fraction(s), _mpfr_to_fraction(c)
    pad = _pad(prec)
    return Enclosure(vs - pad, vs + pad), Enclosure(vc - pad, vc + pad)


def sin_cos_scaled(q: Fraction, prec: int, q_bits: int) -> tuple:
    """(sin, cos) of pi * q as outward-rounded integer intervals scaled by
    2^-q_bits: returns (slo, shi, clo, chi) with e.g. sin in
    [slo, shi] * 2^-q_bits.  Bulk-sampling fast path; same error model as
    sin_cos_pi (pad 2^-(prec+PAD_BITS), plus one ulp for the rescale)."""
    r = _reduce_mod_2(q)
    one = 1 << q_bits
    if r in _SIN_EXACT:
        s = int(_SIN_EXACT[r]) * one
        c = int(_COS_EXACT[r]) * one
        return (s, s, c, c)
    with gmpy2.context(precision=prec + GUARD_BITS):
        x = gmpy2.mpfr(r.numerator) / gmpy2.mpfr(r.denominator) * gmpy2.const_pi()
        s, c = gmpy2.sin_cos(x)
    pad = 1 << max(0, q_bits - prec - PAD_BITS)
    out = []
    for v in (s, c):
        n, d = v.as_integer_ratio()
        lo = (int(n) << q_bits) // int(d)
        out.extend((lo - pad, lo + 1 + pad))
    return tuple(out)


def tan_of(theta, prec: int = 96) -> Enclosure:
    """Enclosure of tan(theta) for rational theta (radians, |theta| < 1.2)."""
    theta = Fraction(theta)
    if abs(theta) >= Fraction(12, 10):
        raise ValueError("tan enclosure only supported for |theta| < 1.2")
    if theta == 0:
        return Enclosure.exact(0)
    return _mpfr_point(gmpy2.tan, theta, prec, times_pi=False)


@functools.lru_cache(maxsize=None)
def pi_enclosure(prec: int = 96) -> Enclosure:
    lo, hi = _pi_bounds(prec + GUARD_BITS)
    return Enclosure(lo, hi)
