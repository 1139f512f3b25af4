import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from filterforge import (
    CumulantSeries,
    DivergentSpectrumError,
    NoiseSpectrum,
    SpectrumCumulant,
    cdd_sequence,
    chi_gaussian,
    classical_decay,
    free_evolution,
    switching_transform,
    toggling_control_matrix,
    tone_pair_cumulant,
    udd_sequence,
)
from filterforge.spectra import ToneCumulant


@pytest.fixture(scope="module")
def sequences():
    return {
        "free": toggling_control_matrix(free_evolution(1), {"z"}),
        "hahn": toggling_control_matrix(udd_sequence(1, 1), {"z"}),
        "cdd2": toggling_control_matrix(cdd_sequence(2, 1), {"z"}),
        "udd3": toggling_control_matrix(udd_sequence(3, 1), {"z"}),
    }


def test_white_noise_is_sequence_independent(sequences):
    white = NoiseSpectrum("white", s0=1.3)
    vals = [chi_gaussian(cm, white) for cm in sequences.values()]
    for v in vals:
        assert v == pytest.approx(2 * 1.3 * 1.0, rel=1e-8)


def test_tone_closed_form(sequences):
    A, w0 = 0.7, 2 * math.pi
    tone = NoiseSpectrum("tone", amplitude=A, omega0=w0)
    assert chi_gaussian(sequences["free"], tone) == pytest.approx(0.0, abs=1e-25)
    g = switching_transform(sequences["cdd2"])
    assert chi_gaussian(sequences["cdd2"], tone) == pytest.approx(2 * A * abs(g(w0)) ** 2)


def test_tone_static_limit(sequences):
    tone = NoiseSpectrum("tone", amplitude=0.7, omega0=1e-9)
    assert chi_gaussian(sequences["free"], tone) == pytest.approx(2 * 0.7, rel=1e-9)


def test_lorentzian_free_evolution_closed_form(sequences):
    # autocovariance C(tau) = s0 wc/2 exp(-wc |tau|) gives
    # chi = 2 s0 [T - (1 - e^{-wc T}) / wc]
    s0, wc = 1.4, 3.0
    lor = NoiseSpectrum("lorentzian", s0=s0, omega_c=wc)
    chi = chi_gaussian(sequences["free"], lor)
    ref = 2 * s0 * (1 - (1 - math.exp(-wc)) / wc)
    assert chi == pytest.approx(ref, rel=1e-8)


def test_lorentzian_hahn_matches_time_domain(sequences):
    s0, wc = 1.4, 3.0
    lor = NoiseSpectrum("lorentzian", s0=s0, omega_c=wc)

    def y(t):
        return 1.0 if t < 0.5 else -1.0

    val, _ = dblquad(
        lambda s, t: 2 * y(t) * y(s) * s0 * wc / 2 * math.exp(-wc * abs(t - s)),
        0,
        1,
        0,
        1,
        epsabs=1e-11,
    )
    assert chi_gaussian(sequences["hahn"], lor) == pytest.approx(val, rel=1e-7)


def test_chi_nonnegative_and_coherence_bounded(sequences):
    lor = NoiseSpectrum("lorentzian", s0=0.8, omega_c=1.0)
    for cm in sequences.values():
        chi = chi_gaussian(cm, lor)
        assert chi >= 0
        assert math.exp(-chi) <= 1


def test_tone_monotonicity(sequences):
    # smaller |G(w0)| means smaller chi at that tone
    w0 = 5.0
    tone = NoiseSpectrum("tone", amplitude=1.0, omega0=w0)
    pairs = []
    for name, cm in sequences.items():
        g = switching_transform(cm)
        pairs.append((abs(g(w0)) ** 2, chi_gaussian(cm, tone)))
    pairs.sort()
    chis = [c for _, c in pairs]
    assert chis == sorted(chis)


def test_tabulated_spectrum_flat_block(sequences):
    # flat up to W >> 1/T behaves like white noise up to the tail share
    W = 2000.0
    tab = NoiseSpectrum("tabulated", omegas=(0.0, W), values=(1.0, 1.0))
    chi = chi_gaussian(sequences["hahn"], tab)
    assert chi == pytest.approx(2.0, rel=2e-3)


def test_divergent_tail_raises(sequences):
    class GrowingSpectrum(NoiseSpectrum):
        def density(self, w):
            return 1.0 + np.square(np.asarray(w, dtype=float))

    bad = GrowingSpectrum("lorentzian", s0=1.0, omega_c=1.0)
    with pytest.raises(DivergentSpectrumError):
        chi_gaussian(sequences["hahn"], bad)


def test_classical_decay_matches_gaussian(sequences):
    lor = NoiseSpectrum("lorentzian", s0=1.1, omega_c=2.0)
    for cm in (sequences["hahn"], sequences["udd3"]):
        chi = chi_gaussian(cm, lor)
        series = CumulantSeries(k_max=2, orders={2: SpectrumCumulant(lor)})
        assert classical_decay(cm, series) == pytest.approx(-chi, rel=1e-8)


def test_classical_decay_tone_atoms(sequences):
    A, w0 = 0.7, 1.3
    series = CumulantSeries(k_max=2, orders={2: tone_pair_cumulant(A, w0)})
    chi = chi_gaussian(sequences["udd3"], NoiseSpectrum("tone", amplitude=A, omega0=w0))
    assert classical_decay(sequences["udd3"], series) == pytest.approx(-chi, rel=1e-12)


def test_classical_decay_populations_untouched(sequences):
    series = CumulantSeries(k_max=2, orders={2: tone_pair_cumulant(1.0, 1.0)})
    assert classical_decay(sequences["hahn"], series, ell=0, m=0) == 0
    assert classical_decay(sequences["hahn"], series, ell=1, m=1) == 0


def test_classical_decay_zero_noise(sequences):
    series = CumulantSeries(k_max=4, orders={})
    assert classical_decay(sequences["hahn"], series) == 0


def test_third_order_tone_atoms_supported(sequences):
    # non-Gaussian third cumulant as delta lines filters through G^3
    w0 = 0.9
    series = CumulantSeries(
        k_max=3,
        orders={3: ToneCumulant(atoms=((0.2, (w0, -w0, 0.0)),))},
    )
    g = switching_transform(sequences["free"])
    # ell=0, m=1: i[(-1)^m - (-1)^ell] = -2i
    expected = ((-2j) ** 3 / math.factorial(3)) * 0.2 * g(w0) * g(-w0) * g(0.0)
    assert classical_decay(sequences["free"], series) == pytest.approx(expected)


def test_cumulant_series_validation():
    with pytest.raises(ValueError):
        CumulantSeries(k_max=9)
    with pytest.raises(ValueError):
        CumulantSeries(k_max=2, orders={1: tone_pair_cumulant(1.0, 1.0)})
    with pytest.raises(ValueError):
        CumulantSeries(k_max=3, orders={3: SpectrumCumulant(NoiseSpectrum("white", s0=1.0))})
    with pytest.raises(ValueError):
        CumulantSeries(k_max=3, orders={3: lambda k, w: 0.0})


def test_spectrum_validation_and_json_round_trip():
    with pytest.raises(ValueError):
        NoiseSpectrum("white", s0=-1.0)
    with pytest.raises(ValueError):
        NoiseSpectrum("tabulated", omegas=(0.0, 1.0), values=(1.0, -1.0))
    for spec in (
        NoiseSpectrum("white", s0=2.0),
        NoiseSpectrum("tone", amplitude=1.0, omega0=3.0),
        NoiseSpectrum("lorentzian", s0=1.0, omega_c=0.5),
        NoiseSpectrum("tabulated", omegas=(0.0, 1.0), values=(1.0, 0.5)),
    ):
        assert NoiseSpectrum.from_json(spec.to_json()) == spec


def test_decay_requires_pi_sequence():
    import numpy as np

    from conftest import random_sequence

    rng = np.random.default_rng(3)
    cm = toggling_control_matrix(random_sequence(rng), {"z"})
    with pytest.raises(ValueError):
        chi_gaussian(cm, NoiseSpectrum("white", s0=1.0))
