"""Single-qubit Pauli algebra and toggling-frame (adjoint) rotations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AXES = ("x", "y", "z")

SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
IDENTITY2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class PauliAxis:
    """One of the three Pauli axes, with its 2x2 matrix."""

    label: str

    def __post_init__(self):
        if self.label not in AXES:
            raise ValueError(f"unknown Pauli axis {self.label!r}")

    @property
    def matrix(self) -> np.ndarray:
        return SIGMA[self.label]


# sigma_a sigma_b = delta_ab I + i eps_abc sigma_c, encoded as
# (a, b) -> (axis or "I", k) meaning the product is i**k times that operator.
_MUL = {
    ("x", "x"): ("I", 0), ("y", "y"): ("I", 0), ("z", "z"): ("I", 0),
    ("x", "y"): ("z", 1), ("y", "x"): ("z", 3),
    ("y", "z"): ("x", 1), ("z", "y"): ("x", 3),
    ("z", "x"): ("y", 1), ("x", "z"): ("y", 3),
}


def pauli_product(labels) -> tuple[str, int]:
    """Product of a string of Pauli operators.

    Returns ``(axis, k)`` with ``axis`` in ``{"x","y","z","I"}`` and the
    phase ``i**k`` (k mod 4), such that the operator product equals
    ``i**k * sigma_axis`` (or ``i**k * I``).
    """
    axis, k = "I", 0
    for b in labels:
        if b == "I":
            continue
        if axis == "I":
            axis = b
            continue
        axis2, dk = _MUL[(axis, b)]
        axis = axis2
        k = (k + dk) % 4
    return axis, k


def adjoint_rotation(axis: str, cos_t, sin_t):
    """3x3 rotation R with U^dag sigma_u U = sum_v R[u][v] sigma_v.

    ``U = exp(-i theta sigma_axis / 2)``; ``cos_t``/``sin_t`` are cos(theta)
    and sin(theta) in whatever scalar type the caller works in (int,
    Fraction, float, mpf), which flows through unchanged.
    """
    zero = cos_t * 0
    one = zero + 1
    c, s = cos_t, sin_t
    if axis == "x":
        return [[one, zero, zero], [zero, c, -s], [zero, s, c]]
    if axis == "y":
        return [[c, zero, s], [zero, one, zero], [-s, zero, c]]
    if axis == "z":
        return [[c, -s, zero], [s, c, zero], [zero, zero, one]]
    raise ValueError(f"unknown axis {axis!r}")


def mat3_mul(a, b):
    """3x3 matrix product on nested lists, generic over the scalar type."""
    return [
        [sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)]
        for i in range(3)
    ]


MAT3_IDENTITY = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
