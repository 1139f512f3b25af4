import math
from fractions import Fraction

import numpy as np
import pytest

from filterforge import (
    PulseSequence,
    Pulse,
    cdd_sequence,
    free_evolution,
    toggling_control_matrix,
    udd_sequence,
)
from filterforge.magnus import Generator
from filterforge.pauli import SIGMA


@pytest.fixture(scope="session")
def cm_free():
    return toggling_control_matrix(free_evolution(1), {"z"})


@pytest.fixture(scope="session")
def cm_hahn():
    return toggling_control_matrix(udd_sequence(1, 1), {"z"})


@pytest.fixture(scope="session")
def cm_udd(request):
    return toggling_control_matrix(udd_sequence(request.param, 1), {"z"})


@pytest.fixture(scope="session")
def cm_cdd2():
    return toggling_control_matrix(cdd_sequence(2, 1), {"z"})


@pytest.fixture(scope="session")
def cm_cdd3():
    return toggling_control_matrix(cdd_sequence(3, 1), {"z"})


def random_sequence(rng, n_pulses=None, pi_only=False, duration=1.0):
    """Float-regime sequence with sorted distinct times in (0, T)."""
    n = n_pulses if n_pulses is not None else rng.integers(1, 5)
    times = np.sort(rng.uniform(0.05, 0.95, size=n) * duration)
    while len(np.unique(np.round(times, 12))) < n:
        times = np.sort(rng.uniform(0.05, 0.95, size=n) * duration)
    pulses = []
    for t in times:
        axis = rng.choice(["x", "y", "z"])
        angle = math.pi if pi_only else float(rng.uniform(0.2, 2 * math.pi))
        pulses.append(Pulse(float(t), str(axis), angle))
    return PulseSequence(float(duration), tuple(pulses), label="random")


class ToneBathModel:
    """Test bath: B_u(t) = sum_r b_{u,r} exp(i nu_r t) with Hermitian pairs."""

    def __init__(self, error_axes, tones, rng=None, bath_dim=2):
        # tones: list of positive frequencies; each contributes +nu and -nu
        self.error_axes = tuple(error_axes)
        self.tones = tuple(tones)
        self.bath_dim = bath_dim
        rng = rng or np.random.default_rng(0)
        self.coeffs = {}
        for u in self.error_axes:
            for nu in self.tones:
                b = rng.normal(size=(bath_dim, bath_dim)) + 1j * rng.normal(size=(bath_dim, bath_dim))
                b *= 0.5
                self.coeffs[(u, nu)] = b
                self.coeffs[(u, -nu)] = b.conj().T

    def frequencies(self):
        out = []
        for nu in self.tones:
            out.extend([nu, -nu])
        return out

    def generators(self, cm):
        gens = []
        for u in self.error_axes:
            for nu in self.frequencies():
                b = self.coeffs[(u, nu)]
                for v in ("x", "y", "z"):
                    if cm.row_is_zero(u, v):
                        continue
                    G = -1j * np.kron(np.asarray(SIGMA[v]), b)
                    gens.append(Generator(u, v, _tone(nu), G))
        return gens

    def guard_warnings(self, duration):
        return []


def _tone(nu):
    return lambda t: np.exp(1j * nu * np.asarray(t, dtype=float))
