"""Grid-checkable relative-error estimates for large orders.

Three expansion lemmas are exposed as operations that compare an exact term
against its closed-form main term and certify the printed error bound:
the binary closed-form estimate ``L_n = 3*2^{n-2}(1 + zeta)``, the power
expansion around the dominant root, and the binary power expansion.  The
module also publishes the default admissibility grids the acceptance suite
sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebraic import AlgebraicContext, build_context
from .errors import DomainError, PrecisionError
from .intervals import PrecReal, log_of_int
from .seq import KIndex, lucas


@dataclass(frozen=True)
class RelativeErrorReport:
    """Main term vs exact value, with the certified error-bound comparison."""

    nominal: PrecReal
    actual: int
    rel_err: PrecReal
    bound: PrecReal
    within: bool


def _admissible_exponent(n: int, c: Fraction, k: int, prec_bits: int = 96) -> bool:
    """Certified check of ``n < 2^{c k}``."""
    if n < 1:
        return False
    lhs = log_of_int(n, prec_bits)
    rhs = log_of_int(2, prec_bits) * (c * k)
    if lhs.strictly_less(rhs):
        return True
    if lhs.strictly_greater(rhs):
        return False
    raise PrecisionError(f"cannot decide n < 2^(ck) at n={n}, c={c}, k={k}")


def _decide_within(rel_err: Fraction, bound: PrecReal) -> bool:
    q = abs(rel_err)
    if bound.strictly_greater(q):
        return True
    if bound.strictly_less(q):
        return False
    raise PrecisionError("error bound comparison undecided; raise precision")


def fay_estimate(k: int, n: int, c: float | Fraction, prec_bits: int = 160) -> RelativeErrorReport:
    """Check ``L_n = 3*2^{n-2}(1 + zeta)`` with the two-branch bound on |zeta|."""
    c = Fraction(c)
    if k < 2 or not 0 < c < 1:
        raise DomainError(f"need k >= 2 and c in (0,1), got k={k}, c={c}")
    if n < 2 or not _admissible_exponent(n, c, k, prec_bits):
        raise DomainError(f"need 2 <= n < 2^(ck), got n={n}, c={c}, k={k}")
    nominal = 3 * 2 ** (n - 2)
    actual = lucas(KIndex(k, n))
    zeta = Fraction(actual - nominal, nominal)
    coeff = Fraction(4) if c <= Fraction(693, 1000) else Fraction(81, 10)
    scale = (log_of_int(2, prec_bits) * ((1 - c) * k)).exp()
    bound = coeff / scale
    return RelativeErrorReport(
        nominal=PrecReal.from_int(nominal, prec_bits),
        actual=actual,
        rel_err=PrecReal.from_fraction(zeta, prec_bits),
        bound=bound,
        within=_decide_within(zeta, bound),
    )


def power_expansion_alpha(
    k: int, n: int, x: int, ctx: AlgebraicContext
) -> RelativeErrorReport:
    """Check ``L_n^x = (f(a)(2a-1))^x a^{(n-1)x} (1 + eta)`` with the eta bound."""
    if n < 1 or x < 1:
        raise DomainError(f"need n, x >= 1, got n={n}, x={x}")
    actual = lucas(KIndex(k, n)) ** x
    need = max(ctx.prec_bits, (n + 2) * max(x, 1) + 96)
    work = ctx if ctx.prec_bits >= need else build_context(k, need)
    for _ in range(4):
        main = (work.fk_alpha * work.two_alpha_minus_1).pow_int(x) * work.alpha.pow_int(
            (n - 1) * x
        )
        eta = actual / main - 1
        # bound 1.5x e^{1.5x/a^{n-1}} / a^{n-1}, written as r e^r with r = 1.5x/a^{n-1}
        r = Fraction(3, 2) * x / work.alpha.pow_int(n - 1)
        bound = r * r.exp()
        abs_eta = abs(eta)
        if bound.strictly_greater(abs_eta):
            return RelativeErrorReport(main, actual, eta, bound, within=True)
        if bound.strictly_less(abs_eta):
            return RelativeErrorReport(main, actual, eta, bound, within=False)
        work = build_context(k, work.prec_bits * 2)
    raise PrecisionError(f"power expansion undecided for k={k}, n={n}, x={x}")


def power_expansion_binary(
    k: int, n: int, i: int, x: int, c: float | Fraction, prec_bits: int = 160
) -> RelativeErrorReport:
    """Check ``L_{n+i}^x = 3^x 2^{(n+i-2)x}(1 + xi)`` with |xi| < 2/2^{(1-2c)k}."""
    c = Fraction(c)
    if i not in (-1, 0, 1):
        raise DomainError(f"offset i must be in {{-1, 0, 1}}, got {i}")
    if x < 1 or k < 2 or not 0 < c < Fraction(1, 4):
        raise DomainError(f"need x >= 1, k >= 2, c in (0, 1/4); got x={x}, k={k}, c={c}")
    if n + i < k + 2:
        raise DomainError(f"need n + i >= k + 2, got n+i={n + i}, k={k}")
    top = max(n + i, 16 * x)
    if not _admissible_exponent(top, c, k, prec_bits):
        raise DomainError(f"need max(n+i, 16x) < 2^(ck); got {top} vs c={c}, k={k}")
    nominal = 3**x * 2 ** ((n + i - 2) * x)
    actual = lucas(KIndex(k, n + i)) ** x
    xi = Fraction(actual - nominal, nominal)
    scale = (log_of_int(2, prec_bits) * ((1 - 2 * c) * k)).exp()
    bound = 2 / scale
    return RelativeErrorReport(
        nominal=PrecReal.from_int(nominal, prec_bits),
        actual=actual,
        rel_err=PrecReal.from_fraction(xi, prec_bits),
        bound=bound,
        within=_decide_within(xi, bound),
    )


# -- default acceptance grids -------------------------------------------------

_FAY_CS = (Fraction(1, 5), Fraction(39, 100), Fraction(1, 2), Fraction(693, 1000), Fraction(3, 4))
_N_CAP = 320


def default_fay_grid() -> list[tuple[int, int, Fraction]]:
    """Admissible (k, n, c) triples covering both bound branches."""
    grid = []
    for k in range(8, 31):
        for c in _FAY_CS:
            top = int(2 ** (float(c) * k) * 0.98) - 1
            top = min(top, _N_CAP)
            ns = sorted({n for n in (2, 3, k, k + 1, top) if 2 <= n <= top})
            grid.extend((k, n, c) for n in ns)
    return grid


def default_alpha_grid() -> list[tuple[int, int, int]]:
    """(k, n, x) triples for the dominant-root power expansion."""
    return [
        (k, n, x)
        for k in range(8, 31, 2)
        for n in (1, 2, 3, 10, 40)
        for x in (1, 2, 5, 8)
    ]


def default_binary_grid() -> list[tuple[int, int, int, int, Fraction]]:
    """Admissible (k, n, i, x, c) tuples for the binary power expansion."""
    grid = []
    for k in range(17, 31):
        for c in (Fraction(6, 25), Fraction(1, 5)):
            top = int(2 ** (float(c) * k) * 0.98) - 1
            lo = k + 2
            if top < lo:
                continue
            ns = sorted({lo, min(lo + 3, top), top})
            xs = [x for x in (1, 2, 4, 8) if 16 * x <= int(2 ** (float(c) * k) * 0.98) - 1]
            for i in (-1, 0, 1):
                for base in ns:
                    n = base - i
                    for x in xs:
                        grid.append((k, n, i, x, c))
    return grid
