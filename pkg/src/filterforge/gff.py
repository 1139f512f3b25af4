"""Generalized filter functions assembled from fundamental ones.

The order-alpha kernel of the exponential (Magnus) representation is an
exact, non-recursive combination of fundamental filter functions: with
G the generalized and F the fundamental kernels,

    -i G(w, T) = F(w, T)
                 - sum_{j=2}^{alpha} ((-1)**j / j)
                   sum over ordered compositions (a_1..a_j) of alpha
                   prod_k F^{(a_k)} on the k-th index/frequency slice,

which is the frequency-space image of writing the exponent of a
time-ordered exponential as log(1 + sum of time-ordered power terms).
Moment (Taylor) tables combine the same way, with products of tables
becoming tensor products over the disjoint frequency slots.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import mp

from .control import ControlMatrix
from .evaluate import FilterEvaluation, fff_eval
from .moments import (
    IndexTuple,
    MomentTable,
    fff_taylor,
    moment_bound,
    moment_is_zero,
    multi_indices,
)

#: largest kernel order assembled here; deeper orders are out of scope
ALPHA_CAP = 7


@dataclass(frozen=True)
class Composition:
    """Ordered positive parts summing to alpha, with prefix sums."""

    parts: tuple[int, ...]

    @property
    def alpha(self) -> int:
        return sum(self.parts)

    @property
    def prefix_sums(self) -> tuple[int, ...]:
        sums = []
        s = 0
        for p in self.parts:
            s += p
            sums.append(s)
        return tuple(sums)


@dataclass(frozen=True)
class GffEvaluation:
    index: IndexTuple
    omega: tuple
    value: complex


@lru_cache(maxsize=None)
def compositions(alpha: int):
    """All ordered compositions of alpha with their assembly coefficients.

    The single part carries +1; a composition into j >= 2 parts carries
    -(-1)**j / j. The j >= 2 coefficients are the log-series weights and
    are pinned by the numeric equivalence tests against direct
    time-ordered (Magnus) integrals.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if alpha > ALPHA_CAP:
        raise ValueError(f"alpha capped at {ALPHA_CAP}")
    out = [(Composition((alpha,)), Fraction(1))]
    # parts determined by which of the alpha-1 gaps are cut
    for mask in range(1, 1 << (alpha - 1)):
        parts = []
        prev = 0
        for gap in range(alpha - 1):
            if mask >> gap & 1:
                parts.append(gap + 1 - prev)
                prev = gap + 1
        parts.append(alpha - prev)
        j = len(parts)
        coeff = Fraction(-((-1) ** j), j)
        out.append((Composition(tuple(parts)), coeff))
    out.sort(key=lambda t: (len(t[0].parts), t[0].parts))
    return tuple(out)


def _slices(idx: IndexTuple, omega, comp: Composition):
    start = 0
    for part in comp.parts:
        stop = start + part
        yield IndexTuple(idx.u[start:stop], idx.v[start:stop]), omega[start:stop], (start, stop)
        start = stop


def gff_eval(cm: ControlMatrix, idx: IndexTuple, omega, precision: int = 53) -> GffEvaluation:
    """Generalized filter function value at the frequency tuple."""
    omega = tuple(float(w) for w in (omega if hasattr(omega, "__len__") else (omega,)))
    if len(omega) != idx.alpha:
        raise ValueError("omega tuple length must equal the index order")
    cache: dict = {}

    def fval(sub_idx, sub_omega, span):
        key = (span, sub_idx.u, sub_idx.v)
        if key not in cache:
            cache[key] = fff_eval(cm, sub_idx, sub_omega, precision).value
        return cache[key]

    total = 0
    for comp, coeff in compositions(idx.alpha):
        prod = 1
        for sub_idx, sub_omega, span in _slices(idx, omega, comp):
            prod = prod * fval(sub_idx, sub_omega, span)
        if precision <= 53:
            c = float(coeff)
        else:
            c = mp.mpf(coeff.numerator) / coeff.denominator
        total = total + c * prod
    i_unit = 1j if precision <= 53 else mp.mpc(0, 1)
    return GffEvaluation(idx, omega, i_unit * total)


@dataclass
class GffTable:
    """Taylor table of the generalized kernel, stored as -iG moments.

    ``entries[k]`` holds the real combination W such that the kernel
    Taylor term is G = i * (-i)**alpha * sum_k prod_j (i w_j)**k_j/k_j! W_k,
    i.e. the same convention as MomentTable applied to -iG. For alpha = 1
    the table equals the fundamental moment table.
    """

    index: IndexTuple
    duration: object
    entries: dict
    degree_cap: int
    scalar_kind: str
    precision_bits: int | None = None
    kind: str = "gff"

    def leading_degree(self):
        alpha = self.index.alpha
        for level in range(self.degree_cap + 1):
            for k in multi_indices(alpha, level):
                val = self.entries.get(k)
                if val is None:
                    continue
                bound = moment_bound(alpha, level, self.duration) * (2 ** alpha)
                if self.scalar_kind == "exact":
                    if val != 0:
                        return level
                elif abs(val) > _zero_eps(self.scalar_kind) * bound:
                    return level
        return None

    def to_json(self) -> dict:
        entries = [
            {"k": list(k), "re": 0.0, "im": float(v)}
            for k, v in sorted(self.entries.items())
        ]
        return {
            "kind": "gff",
            "alpha": self.index.alpha,
            "u": "".join(self.index.u),
            "v": "".join(self.index.v),
            "T": float(self.duration),
            "entries": entries,
        }


def _zero_eps(scalar_kind: str):
    return mp.mpf(10) ** -30 if scalar_kind == "mp" else 1e-13


def gff_taylor(cm: ControlMatrix, idx: IndexTuple, degree_cap: int) -> GffTable:
    """Moment-space assembly: products become slicewise tensor products."""
    alpha = idx.alpha
    sub_tables: dict = {}

    def table_for(sub_idx, span):
        key = (span, sub_idx.u, sub_idx.v)
        if key not in sub_tables:
            sub_tables[key] = fff_taylor(cm, sub_idx, degree_cap)
        return sub_tables[key]

    entries: dict = {}
    one = Fraction(1) if cm.scalar_kind == "exact" else None
    for level in range(degree_cap + 1):
        for k in multi_indices(alpha, level):
            total = 0
            for comp, coeff in compositions(alpha):
                prod = one if one is not None else _mp_one(cm)
                start = 0
                for part in comp.parts:
                    stop = start + part
                    sub_idx = IndexTuple(idx.u[start:stop], idx.v[start:stop])
                    tbl = table_for(sub_idx, (start, stop))
                    prod = prod * tbl.entries[k[start:stop]]
                    start = stop
                if cm.scalar_kind == "exact":
                    total = total + coeff * prod
                else:
                    total = total + _as_scalar(coeff, cm) * prod
            entries[k] = total
    return GffTable(
        index=idx,
        duration=cm.duration,
        entries=entries,
        degree_cap=degree_cap,
        scalar_kind=cm.scalar_kind,
        precision_bits=cm.precision_bits,
    )


def _mp_one(cm):
    if cm.scalar_kind == "mp":
        return mp.mpf(1)
    return 1.0


def _as_scalar(frac: Fraction, cm):
    if cm.scalar_kind == "mp":
        return mp.mpf(frac.numerator) / frac.denominator
    return float(frac)


def dyson_from_magnus_tables(gff_tables: dict, idx: IndexTuple, degree_cap: int):
    """Invert the assembly: rebuild fundamental tables from -iG tables.

    ``gff_tables`` maps (u, v) tuples to GffTable objects covering every
    slice of ``idx``; the exponential-to-time-ordered-product expansion
    gives F = sum_j (1/j!) sum over compositions of products of -iG
    slices. Used to check the assembly round-trips exactly.
    """
    alpha = idx.alpha
    entries = {}
    for level in range(degree_cap + 1):
        for k in multi_indices(alpha, level):
            total = 0
            for comp, _ in compositions(alpha):
                j = len(comp.parts)
                coeff = Fraction(1, _factorial(j))
                prod = Fraction(1)
                start = 0
                for part in comp.parts:
                    stop = start + part
                    sub = gff_tables[(idx.u[start:stop], idx.v[start:stop])]
                    prod = prod * sub.entries[k[start:stop]]
                    start = stop
                total = total + coeff * prod
            entries[k] = total
    return entries


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def effective_first_order_ff(cm: ControlMatrix, omega: float, precision: int = 53) -> float:
    """First-order effective filter for dephasing noise along z.

    Sum over the three basis axes of |F_v(w)|^2 with F_v the order-1
    fundamental filter of index (z, v). Real and nonnegative; for pure
    pi-pulse sequences it reduces to |int y(t) e^{iwt} dt|^2, the
    traditional filter divided by w^2.
    """
    if tuple(cm.error_axes) != ("z",):
        raise ValueError("effective first-order filter supports a single error axis z")
    total = 0.0
    for v in ("x", "y", "z"):
        if cm.row_is_zero("z", v):
            continue
        val = fff_eval(cm, IndexTuple(("z",), (v,)), (omega,), precision).value
        total += abs(val) ** 2
    return float(total)
