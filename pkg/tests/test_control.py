import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from filterforge import (
    Pulse,
    PulseSequence,
    cdd_sequence,
    free_evolution,
    toggling_control_matrix,
    udd_sequence,
)
from conftest import random_sequence


def test_free_evolution_identity_frame(cm_free):
    assert cm_free.values("z", "z") == [1]
    assert cm_free.values("z", "x") == [0]
    assert cm_free.values("z", "y") == [0]


def test_hahn_switching_function(cm_hahn):
    assert cm_hahn.values("z", "z") == [1, -1]
    assert [float(b) for b in cm_hahn.breakpoints] == pytest.approx([0.0, 0.5, 1.0])


def test_half_turn_pulse_rotates_z_to_y():
    seq = PulseSequence(1.0, (Pulse(0.5, "x", math.pi / 2),))
    cm = toggling_control_matrix(seq, {"z"})
    assert cm.values("z", "z") == [1, 0]
    assert [abs(v) for v in cm.values("z", "y")] == [0, 1]


def test_cdd2_quarter_switching(cm_cdd2):
    assert cm_cdd2.scalar_kind == "exact"
    assert cm_cdd2.values("z", "z") == [1, -1, 1]
    assert list(cm_cdd2.breakpoints) == [Fraction(0), Fraction(1, 4), Fraction(3, 4), Fraction(1)]


def test_cdd_switching_antisymmetry():
    # z-row satisfies y(t) = -y(t + T/2) on the first half
    for k in (1, 2, 3):
        cm = toggling_control_matrix(cdd_sequence(k, 1), {"z"})

        def y_at(t):
            for (a, b), r in zip(cm.intervals, cm.rotations):
                if a <= t < b:
                    return r[2][2]
            return cm.rotations[-1][2][2]

        for i in range(64):
            t = Fraction(2 * i + 1, 256)
            assert y_at(t) == -y_at(t + Fraction(1, 2)), (k, t)


def test_trailing_pulse_adds_no_interval():
    seq = cdd_sequence(1, 1)  # pulses at 1/2 and 1
    cm = toggling_control_matrix(seq, {"z"})
    assert len(cm.breakpoints) == 3  # 0, 1/2, 1


def test_noop_pulse_leaves_control_matrix_invariant():
    base = PulseSequence(1.0, (Pulse(0.5, "x", math.pi),))
    padded = PulseSequence(1.0, (Pulse(0.3, "y", 0.0), Pulse(0.5, "x", math.pi)))
    cm1 = toggling_control_matrix(base, {"z"})
    cm2 = toggling_control_matrix(padded, {"z"})
    assert [float(b) for b in cm1.breakpoints] == [float(b) for b in cm2.breakpoints]
    assert cm1.values("z", "z") == cm2.values("z", "z")


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_rows_are_orthonormal(seed):
    rng = np.random.default_rng(seed)
    cm = toggling_control_matrix(random_sequence(rng), {"x", "y", "z"})
    for r in cm.rotations:
        m = np.array([[float(x) for x in row] for row in r])
        assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_pi_pulse_rows_are_signed_permutations(seed):
    rng = np.random.default_rng(seed)
    cm = toggling_control_matrix(random_sequence(rng, pi_only=True), {"x", "y", "z"})
    assert cm.is_pauli_pi_like()
    for r in cm.rotations:
        for row in r:
            assert sorted(abs(x) for x in row) == [0, 0, 1]


def test_dilated_scales_breakpoints(cm_cdd2):
    half = cm_cdd2.dilated(Fraction(1, 2))
    assert list(half.breakpoints) == [Fraction(0), Fraction(1, 8), Fraction(3, 8), Fraction(1, 2)]
    assert half.rotations == cm_cdd2.rotations


def test_mp_dilation_keeps_precision():
    cm = toggling_control_matrix(udd_sequence(3, 1), {"z"})
    small = cm.dilated(2.0**-8)
    # 53-bit rounding of the breakpoints would leave residuals ~1e-16
    from mpmath import mp

    with mp.workprec(cm.precision_bits):
        rel = abs(small.breakpoints[1] / cm.breakpoints[1] - mp.mpf(2) ** -8)
        assert rel < mp.mpf(2) ** -150


def test_error_axes_required():
    with pytest.raises(ValueError):
        toggling_control_matrix(free_evolution(1), set())
    with pytest.raises(ValueError):
        toggling_control_matrix(free_evolution(1), {"q"})
