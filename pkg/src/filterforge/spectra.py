"""Dephasing decay from noise spectra and classical cumulant series.

For single-axis dephasing under pi-pulse control the coherence decays as
rho_01(T) = rho_01(0) exp(-chi) with

    chi = 2 * int dw/2pi  G(w) G(-w) S(w) = (2/pi) int_0^inf |G(w)|^2 S(w) dw

where G(w) = int_0^T y(t) exp(iwt) dt is the switching-function
transform (the order-1 generalized filter). Gaussian statistics make
this exact; for arbitrary classical noise the decay exponent is the
cumulant series with the k-th term filtering the k-th order spectrum
through a product of k first-order filters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .control import ControlMatrix
from .moments import IndexTuple


class DivergentSpectrumError(RuntimeError):
    """The spectral overlap integral has a non-decaying tail."""


@dataclass(frozen=True)
class NoiseSpectrum:
    """Stationary symmetric spectrum S(w) >= 0, units [B]^2 * time.

    kinds: white (s0), tone (amplitude A at +-omega0, i.e.
    S = pi A [delta(w-w0) + delta(w+w0)]), lorentzian
    (s0 / (1 + (w/omega_c)^2)), tabulated (linear interpolation on
    |w|, zero outside the samples).
    """

    kind: str
    s0: float = 0.0
    amplitude: float = 0.0
    omega0: float = 0.0
    omega_c: float = 0.0
    omegas: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("white", "tone", "lorentzian", "tabulated"):
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        if self.kind == "white" and not self.s0 >= 0:
            raise ValueError("white spectrum needs s0 >= 0")
        if self.kind == "tone" and not self.amplitude >= 0:
            raise ValueError("tone spectrum needs amplitude >= 0")
        if self.kind == "lorentzian" and not (self.s0 >= 0 and self.omega_c > 0):
            raise ValueError("lorentzian needs s0 >= 0 and omega_c > 0")
        if self.kind == "tabulated":
            if len(self.omegas) != len(self.values) or len(self.omegas) < 2:
                raise ValueError("tabulated spectrum needs matching omega/value samples")
            if any(v < 0 for v in self.values):
                raise ValueError("spectrum values must be nonnegative")

    def density(self, w):
        """S(w) for the continuous kinds (vectorized)."""
        w = np.abs(np.asarray(w, dtype=float))
        if self.kind == "white":
            return np.full_like(w, self.s0)
        if self.kind == "lorentzian":
            return self.s0 / (1.0 + (w / self.omega_c) ** 2)
        if self.kind == "tabulated":
            return np.interp(w, np.asarray(self.omegas, dtype=float), np.asarray(self.values, dtype=float), left=float(self.values[0]), right=0.0)
        raise ValueError("tone spectra are delta lines; use the closed form")

    @classmethod
    def from_json(cls, obj: dict) -> "NoiseSpectrum":
        kind = obj.get("kind")
        if kind == "white":
            return cls("white", s0=float(obj["s0"]))
        if kind == "tone":
            return cls("tone", amplitude=float(obj["amplitude"]), omega0=float(obj["omega0"]))
        if kind == "lorentzian":
            return cls("lorentzian", s0=float(obj["s0"]), omega_c=float(obj["omega_c"]))
        if kind == "tabulated":
            return cls("tabulated", omegas=tuple(float(x) for x in obj["omega"]), values=tuple(float(x) for x in obj["s"]))
        raise ValueError(f"unknown spectrum kind {kind!r}")

    def to_json(self) -> dict:
        if self.kind == "white":
            return {"kind": "white", "s0": self.s0}
        if self.kind == "tone":
            return {"kind": "tone", "amplitude": self.amplitude, "omega0": self.omega0}
        if self.kind == "lorentzian":
            return {"kind": "lorentzian", "s0": self.s0, "omega_c": self.omega_c}
        return {"kind": "tabulated", "omega": list(self.omegas), "s": list(self.values)}


def switching_transform(cm: ControlMatrix):
    """Vectorized G(w) = int_0^T y(t) e^{iwt} dt for the z switching row."""
    _require_switching(cm)
    bps, _ = cm.float_view()
    a = np.array(bps[:-1])
    b = np.array(bps[1:])
    y = np.array([float(x) for x in cm.values("z", "z")])

    def g(w):
        w = np.asarray(w, dtype=float)
        scalar = w.ndim == 0
        w = np.atleast_1d(w)[:, None]
        small = np.abs(w) * b[None, :].max() < 1e-6
        wsafe = np.where(small, 1.0, w)
        spans = (np.exp(1j * wsafe * b) - np.exp(1j * wsafe * a)) / (1j * wsafe)
        # series for |w| -> 0: (b - a) + iw(b^2 - a^2)/2 - w^2(b^3 - a^3)/6
        series = (
            (b - a)
            + 1j * w * (b**2 - a**2) / 2.0
            - w**2 * (b**3 - a**3) / 6.0
            - 1j * w**3 * (b**4 - a**4) / 24.0
        )
        vals = np.where(small, series, spans) @ y
        return vals[0] if scalar else vals

    return g


def _require_switching(cm: ControlMatrix):
    if tuple(cm.error_axes) != ("z",):
        raise ValueError("dephasing decay supports a single error axis z")
    if not cm.is_pauli_pi_like() or not cm.row_is_zero("z", "x") or not cm.row_is_zero("z", "y"):
        raise ValueError("decay formulas need a pi-pulse (scalar switching) sequence")


def _jump_weight(cm: ControlMatrix) -> float:
    """sum of |boundary values| + |jumps|; |G(w)| <= this / |w|."""
    y = [float(x) for x in cm.values("z", "z")]
    total = abs(y[0]) + abs(y[-1])
    total += sum(abs(y[i + 1] - y[i]) for i in range(len(y) - 1))
    return total


def chi_gaussian(cm: ControlMatrix, spectrum: NoiseSpectrum, T: float | None = None, rel_tol: float = 1e-8) -> float:
    """Gaussian decay exponent chi >= 0 for the given spectrum.

    White and delta-line spectra use closed forms (the white-noise case
    is the time-domain norm of the switching function); continuous
    spectra are integrated by panelled quadrature with a rigorous tail
    bound deciding the frequency cutoff.
    """
    if T is not None and float(T) != float(cm.duration):
        cm = cm.dilated(float(T) / float(cm.duration))
    _require_switching(cm)
    bps, _ = cm.float_view()
    duration = bps[-1]

    if spectrum.kind == "white":
        y = np.array([float(x) for x in cm.values("z", "z")])
        widths = np.diff(np.array(bps))
        return float(2.0 * spectrum.s0 * np.sum(y * y * widths))

    if spectrum.kind == "tone":
        g = switching_transform(cm)
        return float(2.0 * spectrum.amplitude * abs(g(spectrum.omega0)) ** 2)

    g = switching_transform(cm)
    nodes, weights = np.polynomial.legendre.leggauss(24)
    panel = math.pi / (2.0 * duration)
    jump = _jump_weight(cm)

    def block(w_lo, w_hi, n_panels):
        edges = np.linspace(w_lo, w_hi, n_panels + 1)
        mid = (edges[:-1] + edges[1:]) / 2.0
        half = (edges[1:] - edges[:-1]) / 2.0
        ws = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        vals = np.abs(g(ws)) ** 2 * spectrum.density(ws)
        return float(np.sum(vals.reshape(len(mid), -1) @ weights * half))

    total = 0.0
    w_lo = 0.0
    width = max(panel * 8, 1.0)
    max_w = 1e7 / duration
    while True:
        w_hi = w_lo + width
        n_panels = min(20000, max(4, int(math.ceil((w_hi - w_lo) / panel))))
        est = block(w_lo, w_hi, n_panels)
        fine = block(w_lo, w_hi, 2 * n_panels)
        if abs(fine - est) > rel_tol * max(abs(total + fine), 1e-300):
            fine = block(w_lo, w_hi, 4 * n_panels)
        total += fine
        w_lo = w_hi
        width *= 2.0
        # tail bound: S decreasing beyond w_lo and |G|^2 <= jump^2 / w^2
        tail = float(spectrum.density(w_lo)) * jump * jump / w_lo
        if spectrum.kind == "tabulated" and w_lo > max(spectrum.omegas):
            break
        if tail < rel_tol * max(total, 1e-300):
            break
        # finite-support tables terminate via the break above and cannot
        # diverge; anything else with a non-decaying tail bound is hopeless
        undecaying = (
            spectrum.kind != "tabulated"
            and w_lo > 256 * panel
            and float(spectrum.density(w_lo)) >= float(spectrum.density(w_lo / 4))
        )
        if undecaying or w_lo > max_w:
            raise DivergentSpectrumError(
                f"spectral tail does not decay (S*{jump**2:.3g}/w = {tail:.3g} at w = {w_lo:.3g})"
            )
    chi = (2.0 / math.pi) * total
    if not math.isfinite(chi):
        raise DivergentSpectrumError("spectral overlap integral is not finite")
    return chi


@dataclass(frozen=True)
class ToneCumulant:
    """Delta-line cumulant: sum of weights at fixed frequency tuples.

    Represents C_k(w_1..w_k) = sum_atoms weight * prod_j 2pi delta(w_j - nu_j),
    so its filtered integral is sum_atoms weight * prod_j G(nu_j).
    """

    atoms: tuple  # ((weight, (nu_1..nu_k)), ...)


@dataclass(frozen=True)
class SpectrumCumulant:
    """Second-order stationary cumulant given by a power spectrum."""

    spectrum: NoiseSpectrum


@dataclass(frozen=True)
class CumulantSeries:
    """Truncated classical cumulant data, one entry per order k.

    Orders without data contribute nothing. ``zero_mean`` forbids a
    first-order entry. Orders above 2 must be delta lines; continuous
    high-order spectra have no built-in integrator.
    """

    k_max: int
    orders: dict = field(default_factory=dict)
    zero_mean: bool = True

    def __post_init__(self):
        if not 1 <= self.k_max <= 6:
            raise ValueError("k_max must lie in 1..6 (cost guard)")
        for k, data in self.orders.items():
            if k > self.k_max:
                raise ValueError(f"order {k} above k_max")
            if self.zero_mean and k == 1:
                raise ValueError("zero-mean series cannot carry a first-order cumulant")
            if isinstance(data, SpectrumCumulant) and k != 2:
                raise ValueError("spectrum-valued cumulants only supported at k = 2")
            if not isinstance(data, (ToneCumulant, SpectrumCumulant)):
                raise ValueError(f"cumulant order {k} undefined at required points")


def classical_decay(cm: ControlMatrix, cumulants: CumulantSeries, T: float | None = None, ell: int = 0, m: int = 1) -> complex:
    """Decay exponent of <rho_{ell m}(T)>: sum_k (i[(-1)^m - (-1)^ell])^k / k!
    times the k-fold filtered cumulant. Populations (ell == m) are untouched.
    """
    if ell not in (0, 1) or m not in (0, 1):
        raise ValueError("ell and m must be qubit levels 0 or 1")
    if ell == m:
        return 0.0 + 0.0j
    if T is not None and float(T) != float(cm.duration):
        cm = cm.dilated(float(T) / float(cm.duration))
    _require_switching(cm)
    g = switching_transform(cm)
    pref_base = 1j * ((-1) ** m - (-1) ** ell)

    total = 0.0 + 0.0j
    for k in range(1, cumulants.k_max + 1):
        data = cumulants.orders.get(k)
        if data is None:
            continue
        if isinstance(data, SpectrumCumulant):
            integral = 0.5 * chi_gaussian(cm, data.spectrum)
        else:
            integral = 0.0 + 0.0j
            for weight, freqs in data.atoms:
                if len(freqs) != k:
                    raise ValueError(f"order-{k} atom has {len(freqs)} frequencies")
                prod = complex(weight)
                for nu in freqs:
                    prod *= g(nu)
                integral += prod
        total += pref_base**k / math.factorial(k) * integral
    return complex(total)


def tone_pair_cumulant(amplitude: float, omega0: float) -> ToneCumulant:
    """Second-order cumulant of a stationary tone: <b(t)b(s)> = A cos(w0 (t-s))."""
    return ToneCumulant(
        atoms=(
            (amplitude / 2.0, (omega0, -omega0)),
            (amplitude / 2.0, (-omega0, omega0)),
        )
    )
