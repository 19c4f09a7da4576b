"""Exact lattice reduction and the distance-to-bound pipeline.

The reduction itself runs entirely in integer arithmetic (the classical
all-integer variant that tracks Gram determinants d_i and scaled
Gram-Schmidt coefficients lambda_{i,j} = mu_{i,j} d_j), so reducedness,
determinants, and the certified distance lower bound are exact.  Floating
point never enters a soundness-critical quantity.

Approximation-lattice instances wrap a scaling constant C and certified
enclosures of the linear-form coefficients; every floor C*eta is certified
unambiguous before it lands in the basis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebraic import AlgebraicContext, build_context
from .errors import (
    ConditionFailureError,
    DomainError,
    FloorAmbiguityError,
    PrecisionError,
    SingularBasisError,
)
from .intervals import PrecReal
from .linforms import envelope_bounds
from .seq import KIndex, lucas

Vector = tuple[int, ...]


def _det_bareiss(cols: tuple[Vector, ...]) -> int:
    """Exact determinant of the matrix with the given columns."""
    n = len(cols)
    a = [[cols[j][i] for j in range(n)] for i in range(n)]
    sign = 1
    prev = 1
    for p in range(n - 1):
        if a[p][p] == 0:
            for r in range(p + 1, n):
                if a[r][p] != 0:
                    a[p], a[r] = a[r], a[p]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(p + 1, n):
            for c in range(p + 1, n):
                a[r][c] = (a[r][c] * a[p][p] - a[r][p] * a[p][c]) // prev
            a[r][p] = 0
        prev = a[p][p]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class LatticeBasis:
    """A full-rank integer lattice basis, stored column-wise."""

    cols: tuple[Vector, ...]
    det: int = field(init=False)

    def __post_init__(self):
        n = len(self.cols)
        if n == 0 or any(len(c) != n for c in self.cols):
            raise DomainError("basis must be a nonempty square column matrix")
        object.__setattr__(self, "det", _det_bareiss(self.cols))
        if self.det == 0:
            raise SingularBasisError("basis columns are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.cols)


def _dot(u: Vector, v: Vector) -> int:
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class GramSchmidtData:
    """Exact rational Gram-Schmidt data of a basis."""

    bstar_norms_sq: tuple[Fraction, ...]
    mu: tuple[tuple[Fraction, ...], ...]  # mu[i][j] for j < i


def gram_schmidt(basis: LatticeBasis) -> GramSchmidtData:
    n = basis.dim
    bstar = [[Fraction(x) for x in col] for col in basis.cols]
    norms: list[Fraction] = []
    mu_rows: list[tuple[Fraction, ...]] = []
    for i in range(n):
        row = []
        for j in range(i):
            m = sum(Fraction(basis.cols[i][t]) * bstar[j][t] for t in range(n)) / norms[j]
            row.append(m)
            for t in range(n):
                bstar[i][t] -= m * bstar[j][t]
        mu_rows.append(tuple(row))
        nrm = sum(v * v for v in bstar[i])
        if nrm == 0:
            raise SingularBasisError("Gram-Schmidt hit a zero vector")
        norms.append(nrm)
    return GramSchmidtData(tuple(norms), tuple(mu_rows))


def lll_reduce(basis: LatticeBasis, y_param: Fraction = Fraction(3, 4)) -> LatticeBasis:
    """LLL-reduce with the given Lovasz parameter, in exact integer arithmetic."""
    if not Fraction(1, 4) < y_param < 1:
        raise DomainError(f"Lovasz parameter must lie in (1/4, 1), got {y_param}")
    n = basis.dim
    b = [list(col) for col in basis.cols]
    d = [1] * (n + 1)
    lam = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            u = _dot(b[i], b[j])
            for r in range(j):
                u = (d[r + 1] * u - lam[i][r] * lam[j][r]) // d[r]
            if j < i:
                lam[i][j] = u
            else:
                if u <= 0:
                    raise SingularBasisError("basis columns are linearly dependent")
                d[i + 1] = u

    yn, yd = y_param.numerator, y_param.denominator

    def size_reduce(kk: int, ll: int) -> None:
        if 2 * abs(lam[kk][ll]) > d[ll + 1]:
            q = (2 * lam[kk][ll] + d[ll + 1]) // (2 * d[ll + 1])
            bl = b[ll]
            b[kk] = [x - q * y for x, y in zip(b[kk], bl)]
            lam[kk][ll] -= q * d[ll + 1]
            lam_l = lam[ll]
            for r in range(ll):
                lam[kk][r] -= q * lam_l[r]

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        lk = lam[k][k - 1]
        if yd * (d[k + 1] * d[k - 1] + lk * lk) >= yn * d[k] * d[k]:
            for ll in range(k - 2, -1, -1):
                size_reduce(k, ll)
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            for j in range(k - 1):
                lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
            new_dk = (d[k - 1] * d[k + 1] + lk * lk) // d[k]
            for i in range(k + 1, n):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lk * t) // d[k]
                lam[i][k - 1] = (new_dk * t + lk * lam[i][k]) // d[k + 1]
            d[k] = new_dk
            k = max(k - 1, 1)

    return LatticeBasis(tuple(tuple(col) for col in b))


def _solve_exact(cols: tuple[Vector, ...], y: Vector) -> list[Fraction]:
    """Solve B z = y over the rationals (B given column-wise)."""
    n = len(cols)
    a = [[Fraction(cols[j][i]) for j in range(n)] + [Fraction(y[i])] for i in range(n)]
    for p in range(n):
        piv = next((r for r in range(p, n) if a[r][p] != 0), None)
        if piv is None:
            raise SingularBasisError("singular system in distance bound")
        a[p], a[piv] = a[piv], a[p]
        inv = 1 / a[p][p]
        a[p] = [v * inv for v in a[p]]
        for r in range(n):
            if r != p and a[r][p] != 0:
                f = a[r][p]
                a[r] = [vr - f * vp for vr, vp in zip(a[r], a[p])]
    return [a[i][n] for i in range(n)]


def _sqrt_lower(fr: Fraction, bits: int = 64) -> Fraction:
    """A rational lower bound for sqrt(fr), accurate to ~2^-bits relatively."""
    if fr < 0:
        raise DomainError("sqrt of a negative rational")
    scaled = (fr.numerator << (2 * bits)) // fr.denominator
    return Fraction(math.isqrt(scaled), 1 << bits)


@dataclass(frozen=True)
class DistanceBound:
    """Certified lower-bound data for distances to a target vector."""

    c1: Fraction
    c2: Fraction
    sigma: Fraction
    c1_sq: Fraction


def distance_lower_bound(reduced: LatticeBasis, gs: GramSchmidtData, y: Vector) -> DistanceBound:
    """Lower bound c1 with l(L, y) >= c1, from a reduced basis.

    sigma is 1 when y lies in the lattice, else the distance of the last
    nonzero coordinate of B^-1 y to its nearest integer.
    """
    z = _solve_exact(reduced.cols, y)
    if all(v.denominator == 1 for v in z):
        sigma = Fraction(1)
    else:
        i0 = max(i for i, v in enumerate(z) if v != 0)
        fr = z[i0] - math.floor(z[i0])
        sigma = min(fr, 1 - fr)
    b1_sq = Fraction(_dot(reduced.cols[0], reduced.cols[0]))
    c2 = max(b1_sq / nrm for nrm in gs.bstar_norms_sq)
    c1_sq = sigma * sigma * b1_sq / c2
    return DistanceBound(c1=_sqrt_lower(c1_sq), c2=c2, sigma=sigma, c1_sq=c1_sq)


@dataclass(frozen=True)
class ReductionInstance:
    """An approximation lattice: scaling constant, coefficient enclosures, gates.

    ``etas`` are certified enclosures of the linear form's coefficients;
    ``eta0`` is the inhomogeneous term (None means zero and a zero target).
    ``a_bounds`` bound the integer coefficients; c3, c4 parameterize the
    smallness inequality |eta_0 + sum a_i eta_i| <= c3 exp(-c4 H).
    """

    C: int
    etas: tuple[PrecReal, ...]
    eta0: PrecReal | None
    a_bounds: tuple[int, ...]
    c3: Fraction
    c4: PrecReal
    form_id: str | None = None
    k: int | None = None
    x: int | None = None
    n: int | None = None
    prec_bits: int | None = None
    h_meaning: str | None = None

    def __post_init__(self):
        if len(self.etas) < 2:
            raise DomainError("need at least two coefficients")
        if len(self.a_bounds) != len(self.etas):
            raise DomainError("a_bounds must match etas in length")
        if any(a < 1 for a in self.a_bounds):
            raise DomainError("coefficient bounds must be >= 1")
        if self.C < max(self.a_bounds):
            raise DomainError("C must be at least the largest coefficient bound")
        if self.c3 <= 0:
            raise DomainError("c3 must be positive")


def _certified_floor_scaled(C: int, eta: PrecReal) -> int:
    scaled = eta * C
    if not scaled.width_fraction() < Fraction(1, 4):
        raise FloorAmbiguityError(
            f"C*eta enclosure too wide ({float(scaled.width_fraction()):.3g}); raise precision"
        )
    return scaled.certified_floor()


def build_approx_lattice(inst: ReductionInstance) -> tuple[LatticeBasis, Vector]:
    """Identity rows atop the floor row, plus the target vector.

    Every floor(C * eta) must be certified: the scaled enclosure has width
    below 1/4 and does not straddle an integer.
    """
    dim = len(inst.etas)
    floors = [_certified_floor_scaled(inst.C, eta) for eta in inst.etas]
    cols = []
    for j in range(dim):
        col = [1 if i == j else 0 for i in range(dim - 1)]
        col.append(floors[j])
        cols.append(tuple(col))
    if inst.eta0 is None:
        y = tuple([0] * dim)
    else:
        y = tuple([0] * (dim - 1) + [-_certified_floor_scaled(inst.C, inst.eta0)])
    return LatticeBasis(tuple(cols)), y


@dataclass(frozen=True)
class ReductionOutcome:
    """Certified quantities extracted from one reduction."""

    c1: Fraction
    c2: Fraction
    sigma: Fraction
    c1_sq: Fraction
    S: Fraction
    T: Fraction
    H_bound: int
    degenerate_last_coeff: Fraction | None
    form_id: str | None = None
    k: int | None = None
    x: int | None = None
    n: int | None = None
    C: int | None = None

    def to_json_dict(self) -> dict:
        def frac(f: Fraction) -> str:
            return f"{f.numerator}/{f.denominator}"

        return {
            "form_id": self.form_id,
            "k": self.k,
            "x": self.x,
            "n": self.n,
            "C": str(self.C) if self.C is not None else None,
            "c1": frac(self.c1),
            "c1_sq": frac(self.c1_sq),
            "c2": frac(self.c2),
            "sigma": frac(self.sigma),
            "S": frac(self.S),
            "T": frac(self.T),
            "H_bound": self.H_bound,
            "degenerate_last_coeff": (
                frac(self.degenerate_last_coeff)
                if self.degenerate_last_coeff is not None
                else None
            ),
        }


def reduce_and_bound(inst: ReductionInstance) -> ReductionOutcome:
    """Full pipeline: build, reduce, bound distances, extract the H bound.

    Raises ConditionFailureError when c1^2 < T^2 + S (retry with larger C)
    and propagates floor ambiguities (retry with more precision).
    """
    basis, y = build_approx_lattice(inst)
    reduced = lll_reduce(basis)
    gs = gram_schmidt(reduced)
    db = distance_lower_bound(reduced, gs, y)
    a = [Fraction(v) for v in inst.a_bounds]
    s_val = sum(v * v for v in a[:-1])
    t_val = (1 + sum(a)) / 2
    if db.c1_sq < t_val * t_val + s_val:
        raise ConditionFailureError(
            f"c1^2 = {float(db.c1_sq):.4g} below T^2 + S = {float(t_val * t_val + s_val):.4g}; "
            "raise the scaling constant C"
        )
    prec = inst.c4.prec_bits
    root = PrecReal.from_fraction(db.c1_sq - s_val, prec).sqrt() - t_val
    if not root.strictly_positive():
        raise ConditionFailureError("sqrt(c1^2 - S) - T not certified positive; raise C")
    expr = (PrecReal.from_fraction(Fraction(inst.C) * inst.c3, prec).log() - root.log()) / inst.c4
    h_bound = math.floor(expr.hi_fraction)
    degenerate = None
    if inst.eta0 is not None and any(v != 0 for v in y):
        # the excluded tuple a_1 = ... = a_{dim-1} = 0, a_dim = -floor(C eta0)/floor(C eta_dim)
        last_floor = basis.cols[-1][-1]
        degenerate = Fraction(y[-1], last_floor)
    return ReductionOutcome(
        c1=db.c1,
        c2=db.c2,
        sigma=db.sigma,
        c1_sq=db.c1_sq,
        S=s_val,
        T=t_val,
        H_bound=h_bound,
        degenerate_last_coeff=degenerate,
        form_id=inst.form_id,
        k=inst.k,
        x=inst.x,
        n=inst.n,
        C=inst.C,
    )


# -- named approximation-lattice instances -----------------------------------

FORM_DEFAULTS: dict[str, dict] = {
    "L1": {"C": 10**331, "c3": Fraction(9, 2), "c4": "log2", "h": "x"},
    "L1small": {"C": 10**265, "c3": Fraction(9, 2), "c4": "log3/2", "h": "x"},
    "L2": {"C": 10**396, "c3": Fraction(3), "c4": "logalpha", "h": "m-1"},
    "L3": {"C": 10**335, "c3": Fraction(3, 2), "c4": "log7/5", "h": "x"},
    "L4": {"C": 10**252, "c3": Fraction(81, 2), "c4": "logalpha", "h": "min(0.7n, x)"},
    "L5": {"C": 10**335, "c3": Fraction(9, 2), "c4": "logalpha", "h": "0.97n-5"},
}


def _default_a_bound(form: str, k: int, prec_bits: int) -> int:
    env = envelope_bounds(k, prec_bits=max(prec_bits, 160))
    if form in ("L1", "L1small", "L2"):
        return env.m_cap.certified_ceil()
    return env.m_cap_large_n.certified_ceil()


def _c4_value(name: str, ctx: AlgebraicContext) -> PrecReal:
    if name == "log2":
        return ctx.log2
    if name == "log3/2":
        return PrecReal.from_fraction(Fraction(3, 2), ctx.prec_bits).log()
    if name == "log7/5":
        return PrecReal.from_fraction(Fraction(7, 5), ctx.prec_bits).log()
    if name == "logalpha":
        return ctx.log_alpha
    raise DomainError(f"unknown c4 spec {name!r}")


def form_instance(
    form: str,
    k: int,
    *,
    x: int | None = None,
    n: int | None = None,
    delta: int | None = None,
    C: int | None = None,
    prec_bits: int | None = None,
    a_bound: int | None = None,
    c3: Fraction | None = None,
    c4: PrecReal | None = None,
) -> ReductionInstance:
    """Build the named approximation-lattice instance for order k.

    L2 and L5 need the exponent x; L3 needs the index n; L1small needs delta
    in {2, 3, 6}.  Defaults follow the reference parameter choices; raise
    prec_bits (or use ``run_form_reduction``) until the floors certify.
    """
    if form not in FORM_DEFAULTS:
        raise DomainError(f"unknown form {form!r}; choose from {sorted(FORM_DEFAULTS)}")
    defaults = FORM_DEFAULTS[form]
    C = C if C is not None else defaults["C"]
    prec = prec_bits if prec_bits is not None else C.bit_length() + 160
    ctx = build_context(k, prec)
    base = [ctx.log_fk, ctx.log_2am1, ctx.log_alpha]
    if form == "L1":
        etas = base + [ctx.log3, ctx.log2]
    elif form == "L1small":
        if delta not in (2, 3, 6):
            raise DomainError("L1small needs delta in {2, 3, 6}")
        etas = base + [log_of_delta(delta, prec)]
    elif form == "L2":
        if x is None or x < 1:
            raise DomainError("L2 needs x >= 1")
        lead = Fraction(2) ** x + 1 - Fraction(2) ** -x
        etas = base + [ctx.log3, ctx.log2, PrecReal.from_fraction(lead, prec).log()]
    elif form == "L3":
        if n is None or n < 0:
            raise DomainError("L3 needs the index n")
        etas = base + [PrecReal.from_int(lucas(KIndex(k, n + 1)), prec).log()]
    elif form == "L4":
        etas = base
    else:  # L5
        if x is None or x < 1:
            raise DomainError("L5 needs x >= 1")
        factor = 1 + ctx.alpha.pow_int(-x) - ctx.alpha.pow_int(-2 * x)
        etas = base + [factor.log()]
    bound = a_bound if a_bound is not None else _default_a_bound(form, k, prec)
    return ReductionInstance(
        C=C,
        etas=tuple(etas),
        eta0=None,
        a_bounds=tuple([bound] * len(etas)),
        c3=c3 if c3 is not None else defaults["c3"],
        c4=c4 if c4 is not None else _c4_value(defaults["c4"], ctx),
        form_id=form,
        k=k,
        x=x,
        n=n,
        prec_bits=prec,
        h_meaning=defaults["h"],
    )


def log_of_delta(delta: int, prec_bits: int) -> PrecReal:
    return PrecReal.from_int(delta, prec_bits + 8).log().at_prec(prec_bits)


def run_form_reduction(
    form: str,
    k: int,
    *,
    x: int | None = None,
    n: int | None = None,
    delta: int | None = None,
    C: int | None = None,
    a_bound: int | None = None,
    c3: Fraction | None = None,
    initial_prec_bits: int = 256,
    max_prec_bits: int = 1 << 16,
) -> ReductionOutcome:
    """Drive a named reduction with automatic precision escalation."""
    prec = initial_prec_bits
    last: Exception | None = None
    while prec <= max_prec_bits:
        try:
            inst = form_instance(
                form, k, x=x, n=n, delta=delta, C=C, prec_bits=prec,
                a_bound=a_bound, c3=c3,
            )
            return reduce_and_bound(inst)
        except (FloorAmbiguityError, PrecisionError) as exc:
            if isinstance(exc, ConditionFailureError):
                raise
            last = exc
            prec *= 2
    raise PrecisionError(f"reduction did not certify below {max_prec_bits} bits: {last}")


def instance_to_json(inst: ReductionInstance) -> str:
    doc = {
        "form_id": inst.form_id,
        "k": inst.k,
        "x": inst.x,
        "n": inst.n,
        "C": str(inst.C),
        "precision": inst.prec_bits,
        "a_bounds": [str(a) for a in inst.a_bounds],
        "c3": f"{inst.c3.numerator}/{inst.c3.denominator}",
        "c4": [str(inst.c4.lo_fraction), str(inst.c4.hi_fraction)],
        "h_meaning": inst.h_meaning,
    }
    return json.dumps(doc, sort_keys=True)
