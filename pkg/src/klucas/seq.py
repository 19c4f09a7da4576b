"""Exact arithmetic for k-generalized Lucas numbers.

The order-k sequence starts ``0, ..., 0, 2, 1`` (k terms, ending at index 1)
and each later term is the sum of the preceding k terms.  For k = 2 this is
the classical Lucas sequence, whose backward extension gives the one
negative-index special case ``L_{-1} = -1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class KIndex:
    """A (recurrence order, term index) pair."""

    k: int
    n: int

    def __post_init__(self):
        if self.k < 2:
            raise DomainError(f"recurrence order must be >= 2, got k={self.k}")
        if self.n < 2 - self.k and not (self.k == 2 and self.n == -1):
            raise DomainError(f"index n={self.n} below domain floor 2-k={2 - self.k}")


@dataclass(frozen=True)
class EquationInstance:
    """One candidate tuple (k, n, m, x) for the power equation."""

    k: int
    n: int
    m: int
    x: int

    def __post_init__(self):
        if self.k < 2:
            raise DomainError(f"recurrence order must be >= 2, got k={self.k}")
        if self.n < 0 or self.m < 0 or self.x < 0:
            raise DomainError(f"n, m, x must be nonnegative, got {self}")


def _initial_term(k: int, n: int) -> int:
    # covers every index n <= 1 in the valid domain
    if n == 1:
        return 1
    if n == 0:
        return 2
    if k == 2 and n == -1:
        return -1
    return 0


def lucas(idx: KIndex | None = None, *, k: int | None = None, n: int | None = None) -> int:
    """Exact k-generalized Lucas number, via the sliding-window recurrence."""
    if idx is None:
        idx = KIndex(k, n)
    k, n = idx.k, idx.n
    if n < 2:
        return _initial_term(k, n)
    window = deque([0] * (k - 2) + [2, 1])  # terms L_{2-k} .. L_1
    running = 3
    value = 3
    for _ in range(2, n + 1):
        value = running
        window.append(value)
        running += value - window.popleft()
    return value


def lucas_window(k: int, n_max: int) -> list[int]:
    """Terms ``L_0 .. L_{n_max}`` in order; matches ``lucas`` element-wise."""
    if k < 2:
        raise DomainError(f"recurrence order must be >= 2, got k={k}")
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    out = [2]
    if n_max >= 1:
        out.append(1)
    window = deque([0] * (k - 2) + [2, 1])
    running = 3
    for _ in range(2, n_max + 1):
        value = running
        out.append(value)
        window.append(value)
        running += value - window.popleft()
    return out


def power_term(idx: KIndex, x: int) -> int:
    """``L_n^x`` with the convention ``0**0 == 1``."""
    if x < 0:
        raise DomainError(f"exponent must be >= 0, got {x}")
    return lucas(idx) ** x


def lhs(inst: EquationInstance) -> int:
    """Exact left side ``L_{n+1}^x + L_n^x - L_{n-1}^x`` of the equation."""
    k, n, x = inst.k, inst.n, inst.x
    return (
        power_term(KIndex(k, n + 1), x)
        + power_term(KIndex(k, n), x)
        - power_term(KIndex(k, n - 1), x)
    )


def closed_form_check(idx: KIndex) -> int | None:
    """Closed-form value ``3*2^{n-2}`` on ``2 <= n <= k`` and the k+1 case.

    Returns None outside the closed-form range.
    """
    k, n = idx.k, idx.n
    if 2 <= n <= k:
        return 3 * 2 ** (n - 2)
    if n == k + 1:
        return 3 * 2 ** (k - 1) - 2
    return None
