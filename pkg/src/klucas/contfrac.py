"""Certified continued fractions and the two-log minima they control.

Partial quotients are extracted from interval enclosures, so every floor in
the recursion is certified; the expansion aborts with the index reached when
the working precision runs out.  On top of this sit the classical
denominator-gap lower bound and the small-exponent refutation table for
|(x-1) log 3 - z log 2|.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InsufficientExpansionError, PrecisionError
from .intervals import PrecReal, log_of_int


@dataclass(frozen=True)
class CFExpansion:
    """Partial quotients a_0..a_N with their convergents p_i/q_i."""

    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.quotients) != len(self.convergents):
            raise DomainError("quotients and convergents must align")

    @property
    def max_quotient(self) -> int:
        return max(self.quotients)


class CFPrecisionError(PrecisionError):
    """Expansion stalled; ``index`` quotients were certified before failing."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


def _convergents(quotients: list[int]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    p_prev2, p_prev = 0, 1
    q_prev2, q_prev = 1, 0
    for a in quotients:
        p = a * p_prev + p_prev2
        q = a * q_prev + q_prev2
        out.append((p, q))
        p_prev2, p_prev = p_prev, p
        q_prev2, q_prev = q_prev, q
    return out


def cf_expand(v: PrecReal, count: int) -> CFExpansion:
    """The first ``count`` certified partial quotients of v."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    quotients: list[int] = []
    cur = v
    for i in range(count):
        try:
            a = cur.certified_floor()
        except PrecisionError as exc:
            raise CFPrecisionError(
                f"quotient {i} not certified at {v.prec_bits} bits: {exc}", index=i
            ) from exc
        quotients.append(a)
        if i == count - 1:
            break
        rem = cur - a
        if not rem.strictly_positive():
            raise CFPrecisionError(
                f"remainder at quotient {i} not certified positive", index=i + 1
            )
        cur = rem.recip()
    return CFExpansion(tuple(quotients), tuple(_convergents(quotients)))


def log3_over_log2(prec_bits: int) -> PrecReal:
    return log_of_int(3, prec_bits + 16) / log_of_int(2, prec_bits + 16)


def legendre_gap(exp: CFExpansion, denom_bound: int) -> Fraction:
    """Lower bound ``1/((a_max + 2) d^2)`` for |v - p/d| over all d <= denom_bound.

    Requires the expansion to have progressed past the bound: the last
    convergent denominator must exceed ``denom_bound``.
    """
    if denom_bound < 1:
        raise DomainError(f"denominator bound must be >= 1, got {denom_bound}")
    q_last = exp.convergents[-1][1]
    if q_last <= denom_bound:
        raise InsufficientExpansionError(
            f"expansion denominator {q_last} does not exceed bound {denom_bound}"
        )
    return Fraction(1, (exp.max_quotient + 2) * denom_bound * denom_bound)


def min_two_log_form(x: int, prec_bits: int = 192) -> tuple[int, PrecReal]:
    """Minimize |(x-1) log 3 - z log 2| over integers z; returns (argmin, value)."""
    if x < 2:
        raise DomainError(f"exponent must be >= 2, got {x}")
    prec = prec_bits
    for _ in range(5):
        log2 = log_of_int(2, prec)
        log3 = log_of_int(3, prec)
        target = log3 * (x - 1)
        center = (target / log2).mid_float()
        candidates = sorted({max(0, round(center) + d) for d in (-1, 0, 1)})
        values = [(z, abs(target - log2 * z)) for z in candidates]
        best_z, best = min(values, key=lambda t: t[1].mid_float())
        if all(z == best_z or best.strictly_less(val) for z, val in values):
            return best_z, best
        prec *= 2
    raise PrecisionError(f"could not certify the minimizing z for x={x}")


_DELTA_VARIANTS = ("n>=3", "n=1", "n=2")


def _delta_of(variant: str, x: int) -> Fraction:
    two_x = Fraction(2) ** x
    if variant == "n>=3":
        return (two_x - 1) / 2 ** (2 * x)
    if variant == "n=1":
        return 2 * (two_x - 1) / 3**x
    if variant == "n=2":
        return Fraction(3**x - 1, 6**x)
    raise DomainError(f"variant must be one of {_DELTA_VARIANTS}, got {variant!r}")


@dataclass(frozen=True)
class RefutationRow:
    """One exponent's comparison of the certified minimum against its bound."""

    x: int
    z_best: int
    min_value: PrecReal
    rhs: PrecReal
    refuted: bool


def small_x_refutation(
    k_threshold: float | int | Fraction,
    variant: str,
    xs: range = range(2, 11),
    prec_bits: int = 192,
) -> list[RefutationRow]:
    """Compare the two-log minima against ``8/2^{0.72 k} + delta(x)``.

    ``refuted`` means the minimum certifiedly exceeds the right-hand side
    evaluated at the given order threshold (the tail vanishes as the order
    grows).  A degenerate threshold of 0 inflates the tail to 8 and nothing
    small refutes.
    """
    kt = Fraction(k_threshold) if not isinstance(k_threshold, Fraction) else k_threshold
    if kt < 0:
        raise DomainError("the order threshold must be nonnegative")
    log2 = log_of_int(2, prec_bits)
    tail = 8 / (log2 * (Fraction(18, 25) * kt)).exp()
    rows = []
    for x in xs:
        z_best, min_value = min_two_log_form(x, prec_bits)
        rhs = tail + PrecReal.from_fraction(_delta_of(variant, x), prec_bits)
        rows.append(
            RefutationRow(
                x=x,
                z_best=z_best,
                min_value=min_value,
                rhs=rhs,
                refuted=min_value.strictly_greater(rhs),
            )
        )
    return rows
