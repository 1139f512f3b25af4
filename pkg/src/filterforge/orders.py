"""Filtering and cancellation orders of a control protocol.

Per index tuple, the filtering order is the smallest total degree with a
nonvanishing moment (the leading low-frequency power of the filter
function); dimensional analysis ties each index's cancellation order to
it as delta = alpha + phi - 1. Protocol-level orders minimize over the
relevant index set: tuples whose system-operator product is not the
identity. Searches are level-by-level and capped; a capped search
reports a lower bound, never a fabricated value.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .control import ControlMatrix
from .moments import (
    DEFAULT_DEGREE_CAP,
    IndexTuple,
    moment,
    moment_is_zero,
    multi_indices,
)
from .pauli import AXES, pauli_product
from .sequences import MIN_ORDER_PRECISION_BITS

DEFAULT_ALPHA_MAX = 7


@dataclass(frozen=True, order=False)
class OrderValue:
    """Either a resolved integer order or a lower bound ">= value"."""

    value: int
    lower_bound: bool = False

    def __str__(self):
        return f">={self.value}" if self.lower_bound else str(self.value)

    def shifted(self, offset: int) -> "OrderValue":
        return OrderValue(self.value + offset, self.lower_bound)

    def to_json(self):
        return {"value": self.value, "lower_bound": self.lower_bound}


def min_order(a: OrderValue | None, b: OrderValue | None) -> OrderValue | None:
    """Minimum with lower-bound semantics: ">= c" exceeds any resolved v < c."""
    if a is None:
        return b
    if b is None:
        return a
    if not a.lower_bound and not b.lower_bound:
        return a if a.value <= b.value else b
    if a.lower_bound and b.lower_bound:
        return OrderValue(min(a.value, b.value), True)
    res, low = (a, b) if b.lower_bound else (b, a)
    if res.value <= low.value:
        return res
    return OrderValue(low.value, True)


@dataclass(frozen=True)
class RelevantSet:
    """Index tuples whose Pauli product acts nontrivially on the system."""

    alpha: int
    tuples: tuple[IndexTuple, ...]
    product_axis: tuple[tuple[str, int], ...]  # (axis, k) with phase i**k


def relevant_indices(alpha: int, error_axes, alpha_max: int = DEFAULT_ALPHA_MAX) -> RelevantSet:
    if alpha > alpha_max:
        raise ValueError(f"alpha {alpha} above the configured cap {alpha_max}")
    error_axes = tuple(sorted(set(error_axes)))
    tuples = []
    products = []
    for u in itertools.product(error_axes, repeat=alpha):
        for v in itertools.product(AXES, repeat=alpha):
            axis, k = pauli_product(v)
            if axis == "I":
                continue
            tuples.append(IndexTuple(u, v))
            products.append((axis, k))
    return RelevantSet(alpha, tuple(tuples), tuple(products))


def _check_order_precision(cm: ControlMatrix):
    if cm.scalar_kind == "float" or (
        cm.scalar_kind == "mp"
        and (cm.precision_bits or 0) < MIN_ORDER_PRECISION_BITS
    ):
        raise ValueError(
            "order analysis needs exact-rational or >= "
            f"{MIN_ORDER_PRECISION_BITS}-bit times; got {cm.scalar_kind}"
        )


def fff_filtering_order(cm: ControlMatrix, idx: IndexTuple, degree_cap: int = DEFAULT_DEGREE_CAP) -> OrderValue:
    """Smallest |k| with a nonvanishing moment; ">= cap+1" if none found."""
    _check_order_precision(cm)
    for level in range(degree_cap + 1):
        for k in multi_indices(idx.alpha, level):
            val = moment(cm, idx, k)
            if not moment_is_zero(val, idx.alpha, level, cm.duration, cm.scalar_kind):
                return OrderValue(level)
    return OrderValue(degree_cap + 1, lower_bound=True)


def _iter_tuples(cm: ControlMatrix, alpha: int, error_axes):
    """Relevant tuples, skipping those with an identically zero entry."""
    per_axis_options = {
        u: [(u, v) for v in AXES if not cm.row_is_zero(u, v)] for u in error_axes
    }
    slot_choices = []
    for u in error_axes:
        slot_choices.extend(per_axis_options[u])
    for combo in itertools.product(slot_choices, repeat=alpha):
        v = tuple(c[1] for c in combo)
        axis, _ = pauli_product(v)
        if axis == "I":
            continue
        yield IndexTuple(tuple(c[0] for c in combo), v)


def protocol_fo(
    cm: ControlMatrix,
    kappa: int,
    error_axes=None,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    alpha_max: int = DEFAULT_ALPHA_MAX,
) -> OrderValue:
    """Protocol filtering order up to level kappa.

    Minimum of the per-index filtering orders over the relevant tuples
    with alpha <= kappa; equals the minimized leading degree of the
    assembled generalized kernels.
    """
    _check_order_precision(cm)
    if kappa > alpha_max:
        raise ValueError(f"kappa {kappa} above the configured cap {alpha_max}")
    axes = _resolve_axes(cm, error_axes)
    best: OrderValue | None = None
    for alpha in range(1, kappa + 1):
        for idx in _iter_tuples(cm, alpha, axes):
            cap = degree_cap
            if best is not None and not best.lower_bound:
                if best.value == 0:
                    return best
                cap = min(cap, best.value - 1)
            best = min_order(best, fff_filtering_order(cm, idx, cap))
    if best is None:
        return OrderValue(degree_cap + 1, lower_bound=True)
    return best


def protocol_co(
    cm: ControlMatrix,
    error_axes=None,
    alpha_max: int = DEFAULT_ALPHA_MAX,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> OrderValue:
    """Protocol cancellation order via delta = min(alpha + phi - 1)."""
    _check_order_precision(cm)
    axes = _resolve_axes(cm, error_axes)
    best: OrderValue | None = None
    for alpha in range(1, alpha_max + 1):
        if best is not None and not best.lower_bound and alpha - 1 >= best.value:
            break
        for idx in _iter_tuples(cm, alpha, axes):
            cap = degree_cap
            if best is not None and not best.lower_bound:
                cap = min(cap, best.value - alpha + 1)
                if cap < 0:
                    break
            phi = fff_filtering_order(cm, idx, cap)
            best = min_order(best, phi.shifted(alpha - 1))
    if best is None:
        return OrderValue(degree_cap, lower_bound=True)
    return best


def _resolve_axes(cm: ControlMatrix, error_axes):
    if error_axes is None:
        return cm.error_axes
    axes = tuple(sorted(set(error_axes)))
    for u in axes:
        if u not in cm.error_axes:
            raise ValueError(f"axis {u!r} not among the control matrix error axes")
    return axes


@dataclass(frozen=True)
class NoGoResult:
    passed: bool
    first_alpha: int | None = None


def quasistatic_no_go(cm: ControlMatrix, error_axes=None, alpha_max: int = DEFAULT_ALPHA_MAX) -> NoGoResult:
    """Test for perfect cancellation of constant (quasi-static) noise.

    Fails at the smallest alpha where a relevant zero-frequency moment
    is nonzero; such a protocol has zero infinite-level filtering order.
    Passing up to the cap means the no-go is not triggered within it.
    """
    _check_order_precision(cm)
    axes = _resolve_axes(cm, error_axes)
    for alpha in range(1, alpha_max + 1):
        zero_k = (0,) * alpha
        for idx in _iter_tuples(cm, alpha, axes):
            val = moment(cm, idx, zero_k)
            if not moment_is_zero(val, alpha, 0, cm.duration, cm.scalar_kind):
                return NoGoResult(False, alpha)
    return NoGoResult(True)


@dataclass
class ProtocolOrders:
    """Full per-index and aggregated order report."""

    protocol: str
    error_axes: tuple[str, ...]
    alpha_max: int
    degree_cap: int
    per_index: list  # (IndexTuple, phi: OrderValue, delta: OrderValue)
    fo_by_level: dict  # kappa -> OrderValue
    co: OrderValue

    @property
    def resolved(self) -> bool:
        vals = list(self.fo_by_level.values()) + [self.co]
        return all(not v.lower_bound for v in vals)

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol,
            "caps": {"alpha_max": self.alpha_max, "degree_cap": self.degree_cap},
            "per_index": [
                {
                    "alpha": idx.alpha,
                    "u": "".join(idx.u),
                    "v": "".join(idx.v),
                    "fo": phi.to_json(),
                    "co": delta.to_json(),
                }
                for idx, phi, delta in self.per_index
            ],
            "fo_by_level": {str(k): v.to_json() for k, v in self.fo_by_level.items()},
            "co": self.co.to_json(),
            "resolved": self.resolved,
        }


def orders_report(
    cm: ControlMatrix,
    error_axes=None,
    alpha_max: int = DEFAULT_ALPHA_MAX,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    label: str = "",
) -> ProtocolOrders:
    """Per-index filtering orders plus the aggregated protocol orders."""
    _check_order_precision(cm)
    axes = _resolve_axes(cm, error_axes)
    per_index = []
    fo_by_level: dict[int, OrderValue | None] = {}
    running: OrderValue | None = None
    co: OrderValue | None = None
    for alpha in range(1, alpha_max + 1):
        for idx in _iter_tuples(cm, alpha, axes):
            phi = fff_filtering_order(cm, idx, degree_cap)
            delta = phi.shifted(alpha - 1)
            per_index.append((idx, phi, delta))
            running = min_order(running, phi)
            co = min_order(co, delta)
        fo_by_level[alpha] = running
    sentinel = OrderValue(degree_cap + 1, lower_bound=True)
    return ProtocolOrders(
        protocol=label,
        error_axes=axes,
        alpha_max=alpha_max,
        degree_cap=degree_cap,
        per_index=per_index,
        fo_by_level={k: (v if v is not None else sentinel) for k, v in fo_by_level.items()},
        co=co if co is not None else sentinel,
    )
