"""Outward-rounded interval arithmetic on MPFR endpoints.

``PrecReal`` is the carrier for every non-rational quantity in the toolkit:
each value is a pair of MPFR numbers ``lo <= hi`` enclosing the true real,
and every operation rounds the lower endpoint down and the upper endpoint up,
so enclosures are preserved unconditionally.  ``ComplexBox`` is the rectangle
analogue used for conjugate roots.

Endpoint arithmetic relies on MPFR's correctly-rounded operations with
explicit ``RoundDown`` / ``RoundUp`` contexts; results carry the working
precision of the widest operand unless overridden.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import DomainError, FloorAmbiguityError, PoleError, PrecisionError

Numeric = Union[int, float, Fraction, "PrecReal"]

_CTX_DOWN: dict[int, object] = {}
_CTX_UP: dict[int, object] = {}


def _down(prec: int):
    ctx = _CTX_DOWN.get(prec)
    if ctx is None:
        ctx = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
        _CTX_DOWN[prec] = ctx
    return ctx


def _up(prec: int):
    ctx = _CTX_UP.get(prec)
    if ctx is None:
        ctx = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
        _CTX_UP[prec] = ctx
    return ctx


def _fraction_of(x: mpfr) -> Fraction:
    q = mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


def _floor_exact(x: mpfr) -> int:
    q = mpq(x)
    return int(q.numerator) // int(q.denominator)


class PrecReal:
    """A certified enclosure ``[lo, hi]`` of a real number."""

    __slots__ = ("lo", "hi", "prec_bits")

    def __init__(self, lo: mpfr, hi: mpfr, prec_bits: int):
        if not lo <= hi:
            raise PrecisionError(f"inverted interval endpoints: {lo} > {hi}")
        self.lo = lo
        self.hi = hi
        self.prec_bits = prec_bits

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_int(cls, n: int, prec_bits: int) -> "PrecReal":
        bits = max(n.bit_length(), 1)
        if bits <= prec_bits:
            x = gmpy2.mpfr(n, prec_bits)
            return cls(x, x, prec_bits)
        return cls(
            gmpy2.mpfr(n, prec_bits, _down(prec_bits)),
            gmpy2.mpfr(n, prec_bits, _up(prec_bits)),
            prec_bits,
        )

    @classmethod
    def from_fraction(cls, fr: Fraction, prec_bits: int) -> "PrecReal":
        q = mpq(fr.numerator, fr.denominator)
        return cls(
            gmpy2.mpfr(q, prec_bits, _down(prec_bits)),
            gmpy2.mpfr(q, prec_bits, _up(prec_bits)),
            prec_bits,
        )

    @classmethod
    def from_float(cls, x: float, prec_bits: int) -> "PrecReal":
        if not math.isfinite(x):
            raise DomainError(f"non-finite float {x!r}")
        return cls.from_fraction(Fraction(x), prec_bits)

    @classmethod
    def from_fraction_pair(cls, lo: Fraction, hi: Fraction, prec_bits: int) -> "PrecReal":
        """Enclosure of ``[lo, hi]`` given exact rational endpoints."""
        qlo = mpq(lo.numerator, lo.denominator)
        qhi = mpq(hi.numerator, hi.denominator)
        return cls(
            gmpy2.mpfr(qlo, prec_bits, _down(prec_bits)),
            gmpy2.mpfr(qhi, prec_bits, _up(prec_bits)),
            prec_bits,
        )

    @classmethod
    def number(cls, v: Numeric, prec_bits: int) -> "PrecReal":
        """Coerce an int/float/Fraction (or pass through a PrecReal)."""
        if isinstance(v, PrecReal):
            return v
        if isinstance(v, int):
            return cls.from_int(v, prec_bits)
        if isinstance(v, Fraction):
            return cls.from_fraction(v, prec_bits)
        if isinstance(v, float):
            return cls.from_float(v, prec_bits)
        raise DomainError(f"cannot coerce {type(v).__name__} to PrecReal")

    @classmethod
    def zero(cls, prec_bits: int) -> "PrecReal":
        return cls.from_int(0, prec_bits)

    # -- queries ----------------------------------------------------------

    @property
    def lo_fraction(self) -> Fraction:
        return _fraction_of(self.lo)

    @property
    def hi_fraction(self) -> Fraction:
        return _fraction_of(self.hi)

    def width_fraction(self) -> Fraction:
        return self.hi_fraction - self.lo_fraction

    def mid_float(self) -> float:
        return (float(self.lo) + float(self.hi)) / 2.0

    def __float__(self) -> float:
        return self.mid_float()

    def contains(self, v: int | Fraction) -> bool:
        q = mpq(v.numerator, v.denominator) if isinstance(v, Fraction) else mpq(v)
        return self.lo <= q <= self.hi

    def strictly_positive(self) -> bool:
        return self.lo > 0

    def strictly_negative(self) -> bool:
        return self.hi < 0

    def strictly_less(self, other: Numeric) -> bool:
        """Certified ``self < other`` (False means not certifiable, not >=)."""
        if isinstance(other, PrecReal):
            return self.hi < other.lo
        q = mpq(other.numerator, other.denominator) if isinstance(other, Fraction) else mpq(other)
        return self.hi < q

    def strictly_greater(self, other: Numeric) -> bool:
        if isinstance(other, PrecReal):
            return self.lo > other.hi
        q = mpq(other.numerator, other.denominator) if isinstance(other, Fraction) else mpq(other)
        return self.lo > q

    def strictly_inside(self, lo: int | Fraction, hi: int | Fraction) -> bool:
        """Certified ``lo < self < hi`` for exact rational bounds."""
        qlo = mpq(lo.numerator, lo.denominator) if isinstance(lo, Fraction) else mpq(lo)
        qhi = mpq(hi.numerator, hi.denominator) if isinstance(hi, Fraction) else mpq(hi)
        return qlo < self.lo and self.hi < qhi

    def certified_floor(self) -> int:
        flo = _floor_exact(self.lo)
        fhi = _floor_exact(self.hi)
        if flo != fhi:
            raise FloorAmbiguityError(
                f"floor ambiguous at {self.prec_bits} bits: interval spans [{flo}, {fhi}]"
            )
        return flo

    def certified_ceil(self) -> int:
        return -(-self).certified_floor()

    def unique_integer(self) -> int:
        """The single integer inside the enclosure, if there is exactly one."""
        lo_c = -_floor_exact(-self.lo)  # ceil
        hi_f = _floor_exact(self.hi)
        if lo_c != hi_f:
            raise PrecisionError(
                f"interval does not isolate a unique integer: [{lo_c}, {hi_f}]"
            )
        return lo_c

    def __repr__(self) -> str:
        return f"PrecReal[{self.lo!s}, {self.hi!s}]@{self.prec_bits}"

    # -- arithmetic -------------------------------------------------------

    def _peer(self, other: Numeric) -> "PrecReal":
        prec = self.prec_bits
        if isinstance(other, PrecReal):
            return other
        return PrecReal.number(other, prec)

    def _prec_with(self, other: "PrecReal") -> int:
        return max(self.prec_bits, other.prec_bits)

    def __add__(self, other: Numeric) -> "PrecReal":
        o = self._peer(other)
        p = self._prec_with(o)
        return PrecReal(_down(p).add(self.lo, o.lo), _up(p).add(self.hi, o.hi), p)

    __radd__ = __add__

    def __neg__(self) -> "PrecReal":
        return PrecReal(-self.hi, -self.lo, self.prec_bits)

    def __sub__(self, other: Numeric) -> "PrecReal":
        o = self._peer(other)
        p = self._prec_with(o)
        return PrecReal(_down(p).sub(self.lo, o.hi), _up(p).sub(self.hi, o.lo), p)

    def __rsub__(self, other: Numeric) -> "PrecReal":
        return (-self).__add__(other)

    def __mul__(self, other: Numeric) -> "PrecReal":
        o = self._peer(other)
        p = self._prec_with(o)
        dn, uprnd = _down(p), _up(p)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(dn.mul(a, b) for a, b in pairs)
        hi = max(uprnd.mul(a, b) for a, b in pairs)
        return PrecReal(lo, hi, p)

    __rmul__ = __mul__

    def recip(self) -> "PrecReal":
        if self.lo <= 0 <= self.hi:
            raise PoleError("reciprocal of an interval containing zero")
        p = self.prec_bits
        return PrecReal(_down(p).div(1, self.hi), _up(p).div(1, self.lo), p)

    def __truediv__(self, other: Numeric) -> "PrecReal":
        return self * self._peer(other).recip()

    def __rtruediv__(self, other: Numeric) -> "PrecReal":
        return self._peer(other) * self.recip()

    def __abs__(self) -> "PrecReal":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return PrecReal(gmpy2.mpfr(0, self.prec_bits), max(-self.lo, self.hi), self.prec_bits)

    def sqrt(self) -> "PrecReal":
        if self.lo < 0:
            raise PrecisionError("sqrt of an interval with negative lower endpoint")
        p = self.prec_bits
        return PrecReal(_down(p).sqrt(self.lo), _up(p).sqrt(self.hi), p)

    def log(self) -> "PrecReal":
        if self.lo <= 0:
            raise PrecisionError("log of an interval not strictly positive")
        p = self.prec_bits
        return PrecReal(_down(p).log(self.lo), _up(p).log(self.hi), p)

    def exp(self) -> "PrecReal":
        p = self.prec_bits
        return PrecReal(_down(p).exp(self.lo), _up(p).exp(self.hi), p)

    def pow_int(self, n: int) -> "PrecReal":
        if n == 0:
            return PrecReal.from_int(1, self.prec_bits)
        if n < 0:
            return self.pow_int(-n).recip()
        p = self.prec_bits
        dn, uprnd = _down(p), _up(p)
        if self.lo >= 0:
            return PrecReal(dn.pow(self.lo, n), uprnd.pow(self.hi, n), p)
        if self.hi <= 0:
            if n % 2 == 0:
                return PrecReal(dn.pow(self.hi, n), uprnd.pow(self.lo, n), p)
            return PrecReal(dn.pow(self.lo, n), uprnd.pow(self.hi, n), p)
        # straddles zero
        if n % 2 == 0:
            top = max(uprnd.pow(self.lo, n), uprnd.pow(self.hi, n))
            return PrecReal(gmpy2.mpfr(0, p), top, p)
        return PrecReal(dn.pow(self.lo, n), uprnd.pow(self.hi, n), p)

    def at_prec(self, prec_bits: int) -> "PrecReal":
        """Re-round the enclosure at a different working precision."""
        return PrecReal(
            gmpy2.mpfr(self.lo, prec_bits, _down(prec_bits)),
            gmpy2.mpfr(self.hi, prec_bits, _up(prec_bits)),
            prec_bits,
        )


def log_of_int(n: int, prec_bits: int) -> PrecReal:
    """Certified enclosure of ``log n`` for a positive integer."""
    if n <= 0:
        raise DomainError("log_of_int needs a positive integer")
    return PrecReal.from_int(n, prec_bits + 8).log().at_prec(prec_bits)


def interval_max(a: PrecReal, b: PrecReal) -> PrecReal:
    """Enclosure of ``max`` (endpoint-wise; valid since max is monotone)."""
    p = max(a.prec_bits, b.prec_bits)
    return PrecReal(max(a.lo, b.lo), max(a.hi, b.hi), p)


def log_plus(v: PrecReal) -> PrecReal:
    """Enclosure of ``log(max(v, 1))``; the integrand of logarithmic heights."""
    p = v.prec_bits
    one = gmpy2.mpfr(1, p)
    return PrecReal(_down(p).log(max(v.lo, one)), _up(p).log(max(v.hi, one)), p)


class ComplexBox:
    """A rectangle ``re x im`` of PrecReal intervals enclosing a complex number."""

    __slots__ = ("re", "im")

    def __init__(self, re: PrecReal, im: PrecReal):
        self.re = re
        self.im = im

    @classmethod
    def point(cls, re: Fraction, im: Fraction, prec_bits: int) -> "ComplexBox":
        return cls(
            PrecReal.from_fraction(re, prec_bits),
            PrecReal.from_fraction(im, prec_bits),
        )

    @classmethod
    def from_real(cls, re: PrecReal) -> "ComplexBox":
        return cls(re, PrecReal.zero(re.prec_bits))

    def __repr__(self) -> str:
        return f"ComplexBox({self.re!r}, {self.im!r})"

    def __add__(self, other: "ComplexBox") -> "ComplexBox":
        return ComplexBox(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ComplexBox") -> "ComplexBox":
        return ComplexBox(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "ComplexBox") -> "ComplexBox":
        return ComplexBox(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def scale(self, c: Numeric) -> "ComplexBox":
        return ComplexBox(self.re * c, self.im * c)

    def add_real(self, c: Numeric) -> "ComplexBox":
        return ComplexBox(self.re + c, self.im)

    def conj(self) -> "ComplexBox":
        return ComplexBox(self.re, -self.im)

    def abs2(self) -> PrecReal:
        return self.re.pow_int(2) + self.im.pow_int(2)

    def abs(self) -> PrecReal:
        return self.abs2().sqrt()

    def __truediv__(self, other: "ComplexBox") -> "ComplexBox":
        d = other.abs2()
        if not d.strictly_positive():
            raise PoleError("division by a complex box that may contain zero")
        num = self * other.conj()
        return ComplexBox(num.re / d, num.im / d)

    def pow_int(self, n: int) -> "ComplexBox":
        if n < 0:
            return ComplexBox.point(Fraction(1), Fraction(0), self.re.prec_bits) / self.pow_int(-n)
        result = ComplexBox.point(Fraction(1), Fraction(0), self.re.prec_bits)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def disjoint_from(self, other: "ComplexBox") -> bool:
        re_apart = self.re.hi < other.re.lo or other.re.hi < self.re.lo
        im_apart = self.im.hi < other.im.lo or other.im.hi < self.im.lo
        return re_apart or im_apart
