"""Time-ordered simplex moments of control-matrix products.

The moment with multi-index k = (k_1, ..., k_alpha) is

    M_k = integral over 0 <= t_alpha <= ... <= t_1 <= T of
          prod_j y_{u_j v_j}(t_j) t_j^{k_j}

computed exactly by alpha nested antidifferentiation passes over
piecewise polynomials (inner variable first). These are the Taylor
coefficients, up to i-powers and factorials, of the transfer filter
functions about zero frequency, and the zero-frequency values are the
integrals that appear in every term of the time-ordered exponential.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .control import ControlMatrix
from .pauli import AXES
from .piecewise import PiecewisePoly
from .sequences import DEFAULT_PRECISION_BITS

#: relative zero-test threshold for high-precision-real moments, applied
#: against the scale bound T**(alpha+|k|) / alpha!
ZERO_THRESHOLD = Fraction(1, 10**30)

#: degree cap used by order searches unless told otherwise
DEFAULT_DEGREE_CAP = 12


@dataclass(frozen=True)
class IndexTuple:
    """Index of one fundamental filter function: order and axis tuples."""

    u: tuple[str, ...]
    v: tuple[str, ...]

    def __post_init__(self):
        if len(self.u) != len(self.v) or not self.u:
            raise ValueError("u and v must be equal-length, nonempty")
        for a in self.u + self.v:
            if a not in AXES:
                raise ValueError(f"invalid axis {a!r}")

    @property
    def alpha(self) -> int:
        return len(self.u)


def index_tuple(u, v) -> IndexTuple:
    """Convenience constructor from strings like ("zz", "zz")."""
    return IndexTuple(tuple(u), tuple(v))


@dataclass
class MomentTable:
    """Sparse moment table; multi-indices above degree_cap are absent."""

    index: IndexTuple
    duration: object
    entries: dict
    degree_cap: int
    scalar_kind: str
    precision_bits: int | None = None

    def leading_degree(self):
        """Smallest |k| with a nonvanishing entry, or None below the cap."""
        for level in range(self.degree_cap + 1):
            for k in multi_indices(self.index.alpha, level):
                val = self.entries.get(k)
                if val is not None and not moment_is_zero(
                    val, self.index.alpha, level, self.duration, self.scalar_kind
                ):
                    return level
        return None

    def to_json(self) -> dict:
        entries = [
            {"k": list(k), "re": float(v)}
            for k, v in sorted(self.entries.items())
        ]
        return {
            "kind": "fff",
            "alpha": self.index.alpha,
            "u": "".join(self.index.u),
            "v": "".join(self.index.v),
            "T": float(self.duration),
            "entries": entries,
        }


def multi_indices(alpha: int, total: int):
    """All k in N^alpha with |k| = total, lexicographic."""
    if alpha == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in multi_indices(alpha - 1, total - first):
            yield (first,) + rest


def moment_bound(alpha: int, k_total: int, duration):
    """Scale bound T**(alpha+|k|) / alpha! valid for |y| <= 1."""
    return duration ** (alpha + k_total) / math.factorial(alpha)


def moment_is_zero(value, alpha: int, k_total: int, duration, scalar_kind: str) -> bool:
    if scalar_kind == "exact":
        return value == 0
    bound = moment_bound(alpha, k_total, duration)
    if scalar_kind == "mp":
        return abs(value) <= mp.mpf(10) ** -30 * bound
    # plain floats cannot certify zeros; callers needing order decisions
    # must use the exact or mp regimes
    return abs(value) <= 1e-13 * float(bound)


def moment(cm: ControlMatrix, idx: IndexTuple, k) -> object:
    """Exact ordered-simplex moment M_k for the given index tuple."""
    k = tuple(k)
    if len(k) != idx.alpha:
        raise ValueError("multi-index length must equal the index order")
    if any(kk < 0 for kk in k):
        raise ValueError("multi-index entries must be nonnegative")
    for u in idx.u:
        if u not in cm.error_axes:
            raise ValueError(f"axis {u!r} not among the control matrix error axes")

    def compute():
        poly = PiecewisePoly.one(list(cm.breakpoints))
        for j in reversed(range(idx.alpha)):
            vals = cm.values(idx.u[j], idx.v[j])
            poly = poly.scaled_by_values(vals).times_monomial(k[j]).antiderivative()
        return poly.end_value()

    if cm.scalar_kind == "mp":
        with mp.workprec((cm.precision_bits or DEFAULT_PRECISION_BITS) + 20):
            return compute()
    return compute()


def fff_taylor(cm: ControlMatrix, idx: IndexTuple, degree_cap: int) -> MomentTable:
    """All moments with |k| <= degree_cap.

    The full filter function is recovered from the table as
    ``(-i)**alpha * sum_k prod_j (i w_j)**k_j / k_j! * M_k``.
    """
    if degree_cap < 0:
        raise ValueError("degree_cap must be >= 0")
    entries = {}
    for level in range(degree_cap + 1):
        for k in multi_indices(idx.alpha, level):
            entries[k] = moment(cm, idx, k)
    return MomentTable(
        index=idx,
        duration=cm.duration,
        entries=entries,
        degree_cap=degree_cap,
        scalar_kind=cm.scalar_kind,
        precision_bits=cm.precision_bits,
    )
