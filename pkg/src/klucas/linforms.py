"""Baker-type lower-bound calculators and the equation's linear-form values.

Everything here is a stateless evaluator: the Matveev and two-log (LMN)
lower bounds as printed, the index-window inequality relating m to (n, x),
the log-power bound-resolution lemma, the closed-form bound envelopes, and
interval evaluation of the Gamma / Lambda linear forms the analysis tracks.
The Gamma evaluators are diagnostics: they report whether the associated
upper bound holds at a sample point, they never assume it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .algebraic import AlgebraicContext
from .errors import DomainError, PrecisionError
from .intervals import PrecReal, interval_max, log_of_int
from .seq import EquationInstance, KIndex, lucas

Number = int | float | Fraction


def _as_fraction(v: Number) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    raise DomainError(f"expected a number, got {type(v).__name__}")


def m_range(n: int, x: int) -> tuple[int, int]:
    """Exclusive window ``(n x - 3, (n+3) x + 3)`` for the target index m.

    The derivation assumes x >= 1; the x = 0 instantiation is still returned
    so searches can treat exponent-zero rows uniformly (it brackets the only
    possible target m = 1).
    """
    if n < 0 or x < 0:
        raise DomainError(f"m_range needs n >= 0 and x >= 0, got n={n}, x={x}")
    return n * x - 3, (n + 3) * x + 3


@dataclass(frozen=True)
class MatveevInput:
    """Inputs to the t-logarithm lower bound.

    Each ``A[i]`` must already dominate max(D h(g_i), |log g_i|, 0.16); the
    ``provenance`` strings record which height rule produced each one.
    """

    t: int
    D: int
    B: Number
    A: tuple[Number, ...]
    provenance: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.t < 1 or len(self.A) != self.t:
            raise DomainError(f"need t >= 1 and exactly t A-values, got {self}")
        if self.D < 1:
            raise DomainError(f"degree must be >= 1, got D={self.D}")
        if _as_fraction(self.B) < 1:
            raise DomainError(f"coefficient bound must be >= 1, got B={self.B}")
        if any(_as_fraction(a) <= 0 for a in self.A):
            raise DomainError("every A_i must be positive")


def matveev_lower(inp: MatveevInput, prec_bits: int = 160) -> PrecReal:
    """Certified value of ``-1.4 * 30^{t+3} t^{4.5} D^2 (1+log D)(1+log B) A_1...A_t``."""
    t, d = inp.t, inp.D
    acc = PrecReal.from_fraction(Fraction(-7, 5), prec_bits)
    acc = acc * 30 ** (t + 3)
    acc = acc * t**4 * PrecReal.from_int(t, prec_bits).sqrt()
    acc = acc * d**2
    acc = acc * (1 + log_of_int(d, prec_bits))
    log_b = PrecReal.from_fraction(_as_fraction(inp.B), prec_bits).log()
    acc = acc * (1 + log_b)
    for a in inp.A:
        acc = acc * PrecReal.from_fraction(_as_fraction(a), prec_bits)
    return acc


@dataclass(frozen=True)
class LmnInput:
    """Inputs to the two-logarithm lower bound."""

    D: int
    bprime: Number
    logA1: Number
    logA2: Number

    def __post_init__(self):
        if self.D < 1:
            raise DomainError(f"degree must be >= 1, got D={self.D}")
        if _as_fraction(self.bprime) <= 0:
            raise DomainError("b' must be positive")
        floor = Fraction(1, self.D)
        if _as_fraction(self.logA1) < floor or _as_fraction(self.logA2) < floor:
            raise DomainError("log A_i must be at least 1/D")


def lmn_lower(inp: LmnInput, prec_bits: int = 160) -> PrecReal:
    """Certified value of ``-24.34 D^4 max{log b' + 0.14, 21/D, 1/2}^2 logA1 logA2``."""
    d = inp.D
    log_bp = PrecReal.from_fraction(_as_fraction(inp.bprime), prec_bits).log()
    cand = log_bp + Fraction(7, 50)
    cand = interval_max(cand, PrecReal.from_fraction(Fraction(21, d), prec_bits))
    cand = interval_max(cand, PrecReal.from_fraction(Fraction(1, 2), prec_bits))
    acc = PrecReal.from_fraction(Fraction(-2434, 100), prec_bits)
    acc = acc * d**4
    acc = acc * cand.pow_int(2)
    acc = acc * PrecReal.from_fraction(_as_fraction(inp.logA1), prec_bits)
    acc = acc * PrecReal.from_fraction(_as_fraction(inp.logA2), prec_bits)
    return acc


def guz_resolve(r: int, T: Number, prec_bits: int = 128) -> int:
    """Resolved bound ``ceil(2^r T (log T)^r)`` for any p with ``p/(log p)^r < T``."""
    if r < 1:
        raise DomainError(f"log order must be >= 1, got r={r}")
    t_fr = _as_fraction(T)
    if t_fr <= (4 * r * r) ** r:
        raise DomainError(f"threshold T={T} must exceed (4 r^2)^r = {(4 * r * r) ** r}")
    prec = prec_bits
    for _ in range(6):
        t_iv = PrecReal.from_fraction(t_fr, prec)
        value = t_iv * 2**r * t_iv.log().pow_int(r)
        try:
            return value.certified_ceil()
        except PrecisionError:
            prec *= 2
    raise PrecisionError(f"cannot certify bound for r={r}, T={T}")


@dataclass(frozen=True)
class EnvelopeBounds:
    """Closed-form bound envelopes, evaluated exactly as printed.

    The first two cover the regime n <= k (x needs m; m stands alone); the
    remaining four cover n > k (x_from_n needs n, the caps depend on k only).
    """

    k: int
    x_from_m: PrecReal | None
    m_cap: PrecReal
    x_from_n: PrecReal | None
    n_cap: PrecReal
    x_cap: PrecReal
    m_cap_large_n: PrecReal


def envelope_bounds(
    k: int,
    n: int | None = None,
    m: int | None = None,
    prec_bits: int = 160,
) -> EnvelopeBounds:
    if k < 2:
        raise DomainError(f"order must be >= 2, got k={k}")
    log_k = log_of_int(k, prec_bits)
    x_from_m = None
    if m is not None:
        if m < 2:
            raise DomainError("x_from_m envelope needs m >= 2")
        x_from_m = 31 * 10**13 * k**5 * log_k.pow_int(2) * log_of_int(m, prec_bits)
    x_from_n = None
    if n is not None:
        if n < 2:
            raise DomainError("x_from_n envelope needs n >= 2")
        x_from_n = 26 * 10**14 * n * k**4 * log_k.pow_int(3) * log_of_int(n, prec_bits)
    return EnvelopeBounds(
        k=k,
        x_from_m=x_from_m,
        m_cap=63 * 10**31 * k**10 * log_k.pow_int(5),
        x_from_n=x_from_n,
        n_cap=55 * 10**26 * k**6 * log_k.pow_int(6),
        x_cap=87 * 10**29 * k**7 * log_k.pow_int(8),
        m_cap_large_n=56 * 10**43 * k**10 * log_k.pow_int(12),
    )


class FormId(str, enum.Enum):
    """The linear forms tracked by the analysis."""

    G1 = "G1"
    G1_SMALL = "G1small"
    G2 = "G2"
    G3 = "G3"
    G4 = "G4"
    G5 = "G5"


@dataclass(frozen=True)
class LinearFormValue:
    """Interval values of Gamma = e^Lambda - 1 and Lambda at one instance.

    ``bound_holds`` reports the certified comparison |Gamma| < bound for the
    form's printed upper bound (None when undecidable at this precision).
    """

    form_id: FormId
    gamma_value: PrecReal
    lambda_value: PrecReal
    bound: PrecReal
    bound_holds: bool | None


_SMALL_N_DELTA = {0: 2, 1: 3, 2: 6}


def _gamma_core(form_id: FormId, inst: EquationInstance, ctx: AlgebraicContext) -> tuple[PrecReal, PrecReal]:
    k, n, m, x = inst.k, inst.n, inst.m, inst.x
    a = ctx.alpha
    fk = ctx.fk_alpha
    tam1 = ctx.two_alpha_minus_1
    if form_id is FormId.G1:
        if n < 3:
            raise DomainError("G1 needs n >= 3")
        core = fk * tam1 * a.pow_int(m - 1) / (Fraction(3**x) * Fraction(2) ** ((n - 1) * x))
        bound = PrecReal.from_fraction(Fraction(3, 2**x), ctx.prec_bits)
    elif form_id is FormId.G1_SMALL:
        if n not in _SMALL_N_DELTA:
            raise DomainError("G1small needs n in {0, 1, 2}")
        if n in (0, 2) and k == 2:
            raise DomainError("G1small with n in {0, 2} needs k >= 3")
        delta = _SMALL_N_DELTA[n]
        core = fk * tam1 * a.pow_int(m - 1) / Fraction(delta**x)
        bound = PrecReal.from_fraction(3 * Fraction(2, 3) ** x, ctx.prec_bits)
    elif form_id is FormId.G2:
        if n < 3:
            raise DomainError("G2 needs n >= 3")
        lead = Fraction(3 * 2 ** (n - 2)) ** x * (Fraction(2) ** x + 1 - Fraction(2) ** -x)
        core = PrecReal.from_fraction(lead, ctx.prec_bits) / (fk * tam1 * a.pow_int(m - 1))
        bound = 2 / a.pow_int(m - 1)
    elif form_id is FormId.G3:
        if n <= k:
            raise DomainError("G3 needs n > k")
        lterm = lucas(KIndex(k, n + 1))
        core = fk * tam1 * a.pow_int(m - 1) / Fraction(lterm**x)
        bound = PrecReal.from_fraction(Fraction(5, 7) ** x, ctx.prec_bits)
    elif form_id is FormId.G4:
        if n <= k:
            raise DomainError("G4 needs n > k")
        core = fk.pow_int(1 - x) * tam1.pow_int(1 - x) * a.pow_int(m - 1 - (n - 1) * x)
        expo = min(Fraction(7 * n, 10), Fraction(x))
        bound = 27 / (ctx.log_alpha * expo).exp()
    elif form_id is FormId.G5:
        if n <= k:
            raise DomainError("G5 needs n > k")
        factor = 1 + a.pow_int(-x) - a.pow_int(-2 * x)
        core = fk.pow_int(x - 1) * tam1.pow_int(x - 1) * a.pow_int((n - 1) * x - (m - 1)) * factor
        expo = Fraction(97 * n, 100) - 5
        bound = 3 / (ctx.log_alpha * expo).exp()
    else:  # pragma: no cover
        raise DomainError(f"unknown form {form_id!r}")
    return core, bound


def gamma_value(
    form_id: FormId | str,
    inst: EquationInstance,
    ctx: AlgebraicContext,
) -> LinearFormValue:
    """Evaluate Gamma and Lambda = log(1 + Gamma) for one instance.

    Raises DomainError when the instance lies outside the form's regime; the
    reported bound comparison is diagnostic only.
    """
    form_id = FormId(form_id)
    if inst.x < 1:
        raise DomainError("linear-form evaluation needs x >= 1")
    core, bound = _gamma_core(form_id, inst, ctx)
    gamma = core - 1
    if not core.strictly_positive():
        raise PrecisionError("1 + Gamma not certified positive; raise precision")
    lam = core.log()
    abs_gamma = abs(gamma)
    if abs_gamma.strictly_less(bound):
        holds: bool | None = True
    elif abs_gamma.strictly_greater(bound):
        holds = False
    else:
        holds = None
    return LinearFormValue(form_id, gamma, lam, bound, holds)
