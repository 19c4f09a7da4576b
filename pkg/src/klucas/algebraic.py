"""Certified algebraic data for the recurrence's characteristic polynomial.

For each order k this module isolates the dominant real root alpha of
``x^k - x^{k-1} - ... - x - 1`` (with a sign-certified bracket), encloses the
remaining roots in pairwise-disjoint rectangles inside the unit disk, and
derives the quantities every analytic step downstream consumes: f_k(alpha),
2*alpha - 1, their logarithms, Binet-formula error terms, field norms, and
logarithmic heights.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from dataclasses import dataclass

import gmpy2
import mpmath
import sympy

from .errors import DomainError, PoleError, PrecisionError
from .intervals import ComplexBox, PrecReal, log_of_int, log_plus
from .seq import KIndex, lucas

DEFAULT_PREC_BITS = 256


def char_poly(k: int) -> list[int]:
    """Descending coefficients ``[1, -1, ..., -1]`` of the degree-k polynomial."""
    if k < 2:
        raise DomainError(f"order must be >= 2, got k={k}")
    return [1] + [-1] * k


def _derivative(coeffs: list[int]) -> list[int]:
    deg = len(coeffs) - 1
    return [c * (deg - i) for i, c in enumerate(coeffs[:-1])]


def _horner_fraction(coeffs: list[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _horner_interval(coeffs: list[int], x: PrecReal) -> PrecReal:
    acc = PrecReal.from_int(coeffs[0], x.prec_bits)
    for c in coeffs[1:]:
        acc = acc * x + c
    return acc


def _horner_box(coeffs: list[int], z: ComplexBox) -> ComplexBox:
    acc = ComplexBox.point(Fraction(coeffs[0]), Fraction(0), z.re.prec_bits)
    for c in coeffs[1:]:
        acc = (acc * z).add_real(c)
    return acc


def _horner_mpfr(coeffs: list[int], x, ctx):
    acc = gmpy2.mpfr(coeffs[0], ctx.precision)
    for c in coeffs[1:]:
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc


def _dominant_root(k: int, prec_bits: int) -> PrecReal:
    """Sign-certified enclosure of the unique real root above 1."""
    coeffs = char_poly(k)
    dcoeffs = _derivative(coeffs)

    # float Newton seed from the right of the root; cancellation in f only
    # costs relative accuracy of the step, which stays ~2^-50 absolute
    if k > 1000:
        raise DomainError("dominant-root isolation supports k <= 1000")
    x = 2.0
    for _ in range(256):
        f = 0.0
        df = 0.0
        for c in coeffs:
            df = df * x + f
            f = f * x + c
        step = f / df
        x -= step
        if abs(step) < 1e-13:
            break

    work = prec_bits + 64
    X = gmpy2.mpfr(x, work)
    p = 64
    while True:
        p = min(p * 2, work)
        ctx = gmpy2.context(precision=p)
        for _ in range(2):
            f = _horner_mpfr(coeffs, X, ctx)
            df = _horner_mpfr(dcoeffs, X, ctx)
            X = ctx.sub(X, ctx.div(f, df))
        if p == work:
            break

    ctx = gmpy2.context(precision=work)
    eps = gmpy2.mpfr(2, work) ** (-(prec_bits + 4))
    for _ in range(8):
        lo = gmpy2.context(precision=work, round=gmpy2.RoundDown).sub(X, eps)
        hi = gmpy2.context(precision=work, round=gmpy2.RoundUp).add(X, eps)
        f_lo = _horner_interval(coeffs, PrecReal(lo, lo, work))
        f_hi = _horner_interval(coeffs, PrecReal(hi, hi, work))
        if f_lo.strictly_negative() and f_hi.strictly_positive():
            root = PrecReal(lo, hi, work)
            if root.strictly_inside(2 * (1 - Fraction(1, 2**k)), 2):
                return root
        # not yet certified: polish with two more Newton steps
        for _ in range(2):
            f = _horner_mpfr(coeffs, X, ctx)
            df = _horner_mpfr(dcoeffs, X, ctx)
            X = ctx.sub(X, ctx.div(f, df))
    raise PrecisionError(f"could not certify dominant root for k={k} at {prec_bits} bits")


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if man == 0:
        return Fraction(0)
    v = Fraction(man) * Fraction(2) ** exp
    return -v if sign else v


def _isolate_conjugates(k: int, prec_bits: int, alpha: PrecReal) -> tuple[ComplexBox, ...]:
    """Rectangles around the k-1 roots inside the unit disk, one root each.

    Candidates come from an arbitrary-precision polynomial solve; each is then
    wrapped in a disk of certified radius ``k * |p(z)| / |p'(z)|`` (which must
    contain a root), and the disks are checked pairwise disjoint and of
    modulus strictly below 1.  Together with the dominant-root bracket this
    pins exactly one root per rectangle.
    """
    coeffs = char_poly(k)
    dcoeffs = _derivative(coeffs)
    work = prec_bits + 64
    for _ in range(5):
        with mpmath.workprec(work + 32):
            approx = mpmath.polyroots(coeffs, maxsteps=500, extraprec=work)
        alpha_mid = alpha.mid_float()
        # drop the dominant root: the candidate closest to alpha on the real line
        cands = sorted(approx, key=lambda z: abs(complex(z) - alpha_mid))
        others = cands[1:]
        boxes: list[ComplexBox] = []
        ok = True
        for z in others:
            zc = mpmath.mpc(z)
            re = _mpf_to_fraction(zc.real)
            im = _mpf_to_fraction(zc.imag)
            pt = ComplexBox.point(re, im, work)
            pz = _horner_box(coeffs, pt).abs()
            dpz = _horner_box(dcoeffs, pt).abs()
            if not dpz.strictly_positive():
                ok = False
                break
            radius = (pz * k / dpz).hi_fraction
            box = ComplexBox(
                PrecReal.from_fraction_pair(re - radius, re + radius, work),
                PrecReal.from_fraction_pair(im - radius, im + radius, work),
            )
            if not box.abs().strictly_less(1):
                ok = False
                break
            boxes.append(box)
        if ok and len(boxes) == k - 1 and alpha.strictly_greater(1):
            disjoint = all(
                boxes[i].disjoint_from(boxes[j])
                for i in range(len(boxes))
                for j in range(i + 1, len(boxes))
            )
            if disjoint:
                return tuple(boxes)
        work *= 2
    raise PrecisionError(f"could not isolate conjugate roots for k={k} at {prec_bits} bits")


class AlgebraicContext:
    """Immutable bundle of certified per-k data shared by the analytic layers.

    Conjugate-root rectangles are isolated lazily on first access; everything
    else is fixed at construction.
    """

    def __init__(self, k: int, prec_bits: int):
        if prec_bits < 64:
            raise DomainError(f"prec_bits must be >= 64, got {prec_bits}")
        self.k = k
        self.prec_bits = prec_bits
        self.alpha = _dominant_root(k, prec_bits)
        self.fk_alpha = fk_at(k, self.alpha)
        self.two_alpha_minus_1 = self.alpha * 2 - 1
        if not (
            self.fk_alpha.strictly_greater(Fraction(1, 2))
            and self.fk_alpha.strictly_less(Fraction(3, 4))
        ):
            raise PrecisionError(f"f_k(alpha) outside (1/2, 3/4) for k={k}")
        self.log_alpha = self.alpha.log()
        self.log_fk = self.fk_alpha.log()
        self.log_2am1 = self.two_alpha_minus_1.log()
        self.log2 = log_of_int(2, prec_bits)
        self.log3 = log_of_int(3, prec_bits)
        self._conjugates: tuple[ComplexBox, ...] | None = None

    @property
    def other_roots(self) -> tuple[ComplexBox, ...]:
        if self._conjugates is None:
            self._conjugates = _isolate_conjugates(self.k, self.prec_bits, self.alpha)
        return self._conjugates

    def all_root_boxes(self) -> tuple[ComplexBox, ...]:
        return (ComplexBox.from_real(self.alpha),) + self.other_roots

    def __repr__(self) -> str:
        return f"AlgebraicContext(k={self.k}, prec_bits={self.prec_bits})"


@functools.lru_cache(maxsize=None)
def build_context(k: int, prec_bits: int = DEFAULT_PREC_BITS) -> AlgebraicContext:
    """Certified context for order k; cached per (k, precision)."""
    return AlgebraicContext(k, prec_bits)


def fk_at(k: int, v: PrecReal | int | Fraction) -> PrecReal:
    """Interval image of ``(v - 1) / (2 + (k+1)(v - 2))``."""
    if k < 2:
        raise DomainError(f"order must be >= 2, got k={k}")
    if not isinstance(v, PrecReal):
        v = PrecReal.number(v, 128)
    den = v * (k + 1) - 2 * k
    if den.contains(0):
        raise PoleError("f_k denominator interval contains zero")
    return (v - 1) / den


def fk_at_box(k: int, z: ComplexBox) -> ComplexBox:
    num = z.add_real(-1)
    den = z.scale(k + 1).add_real(-2 * k)
    return num / den


@dataclass(frozen=True)
class BinetError:
    """Certified enclosure of ``L_n - f_k(a)(2a-1) a^{n-1}``."""

    value: PrecReal


def binet_error(k: int, n: int, ctx: AlgebraicContext) -> BinetError:
    """Dominant-term residual of the Binet formula, certified inside (-1.5, 1.5).

    The enclosure is recomputed at finer precision internally when the
    requested context cannot resolve the cancellation (the product grows like
    ``2^n`` while the residual stays bounded).
    """
    if k < 2 or n < 2 - k:
        raise DomainError(f"binet_error domain violated: k={k}, n={n}")
    value = lucas(KIndex(k, n))
    need = max(ctx.prec_bits, abs(n) + 96)
    work = ctx if ctx.prec_bits >= need else build_context(k, need)
    for _ in range(4):
        e = value - work.fk_alpha * work.two_alpha_minus_1 * work.alpha.pow_int(n - 1)
        if e.strictly_inside(Fraction(-3, 2), Fraction(3, 2)):
            return BinetError(e)
        work = build_context(k, work.prec_bits * 2)
    raise PrecisionError(f"cannot certify |e_{k}({n})| < 1.5 at {ctx.prec_bits} base bits")


def _exact_norm_2am1(k: int) -> int:
    # product of (2 root - 1) over all roots, via 2^k * (-1)^k * Psi_k(1/2)
    val = Fraction(2**k) * (-1) ** k * _horner_fraction(char_poly(k), Fraction(1, 2))
    assert val.denominator == 1
    return int(val)


def _exact_norm_fk(k: int) -> Fraction:
    # product of f_k over all roots: (a_i - 1) terms over ((k+1) a_i - 2k) terms
    num = Fraction((-1) ** k) * _horner_fraction(char_poly(k), Fraction(1))
    den = Fraction((k + 1) ** k) * (-1) ** k * _horner_fraction(char_poly(k), Fraction(2 * k, k + 1))
    return num / den


def norm_2alpha_minus_1(k: int, ctx: AlgebraicContext) -> int:
    """Signed field norm of ``2 alpha - 1`` as a certified integer.

    The rectangle product must isolate a unique integer whose absolute value
    equals ``2^{k+1} - 3``.
    """
    work = ctx
    for _ in range(4):
        prod = ComplexBox.from_real(work.two_alpha_minus_1)
        for z in work.other_roots:
            prod = prod * z.scale(2).add_real(-1)
        try:
            n_val = prod.re.unique_integer()
        except PrecisionError:
            work = build_context(k, work.prec_bits * 2)
            continue
        if not prod.im.contains(0):
            raise PrecisionError("conjugate product imaginary part excludes zero")
        if abs(n_val) != 2 ** (k + 1) - 3:
            raise ArithmeticError(
                f"certified norm {n_val} violates |N(2a-1)| = 2^{k + 1} - 3"
            )
        return n_val
    raise PrecisionError(f"cannot isolate N(2a-1) for k={k} at {ctx.prec_bits} bits")


def norm_fk(k: int, ctx: AlgebraicContext) -> Fraction:
    """Signed field norm of ``f_k(alpha)`` as a certified exact rational."""
    exact = _exact_norm_fk(k)
    closed = Fraction((k - 1) ** 2, 2 ** (k + 1) * k**k - (k + 1) ** (k + 1))
    if abs(exact) != closed:
        raise ArithmeticError(f"|N(f_k(a))| mismatch for k={k}: {exact} vs {closed}")
    work = ctx
    for _ in range(4):
        prod = ComplexBox.from_real(work.fk_alpha)
        for z in work.other_roots:
            prod = prod * fk_at_box(k, z)
        sign_ok = prod.re.contains(exact) and not prod.re.contains(-exact)
        if sign_ok and prod.im.contains(0):
            return exact
        work = build_context(k, work.prec_bits * 2)
    raise PrecisionError(f"cannot certify N(f_k(a)) for k={k} at {ctx.prec_bits} bits")


def norm_quotient(k: int, ctx: AlgebraicContext) -> Fraction:
    """``|N(2a-1) * N(f_k(a))|`` in lowest terms (13/44, 29/563, ... for small k)."""
    return abs(Fraction(norm_2alpha_minus_1(k, ctx)) * norm_fk(k, ctx))


def height_fk_bound(k: int, prec_bits: int = 128) -> PrecReal:
    """The working height bound ``3 log k`` used by the calculators downstream."""
    if k < 2:
        raise DomainError(f"order must be >= 2, got k={k}")
    return log_of_int(k, prec_bits) * 3


@functools.lru_cache(maxsize=None)
def _fk_charpoly_leading_coeff(k: int) -> int:
    X, y = sympy.symbols("X y")
    psi = y**k - sum(y**i for i in range(k))
    res = sympy.resultant(psi, (k + 1) * X * y - 2 * k * X - y + 1, y)
    prim = sympy.Poly(res, X).primitive()[1]
    return abs(int(prim.LC()))


def height_fk_exact(k: int, ctx: AlgebraicContext) -> PrecReal:
    """Logarithmic height of ``f_k(alpha)`` from its integral characteristic data.

    Uses the primitive degree-k resultant polynomial (whose roots are the
    conjugates of f_k(alpha)); the height from a power of the minimal
    polynomial agrees with the height from the minimal polynomial itself.
    """
    lc = _fk_charpoly_leading_coeff(k)
    total = log_of_int(lc, ctx.prec_bits)
    total = total + log_plus(abs(ctx.fk_alpha))
    for z in ctx.other_roots:
        total = total + log_plus(fk_at_box(k, z).abs())
    return total / k
