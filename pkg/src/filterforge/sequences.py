"""Bang-bang pulse sequences and the standard decoupling families.

Pulses are instantaneous rotations about a Pauli axis. Times are kept in
one of three scalar regimes so that downstream zero tests can be honest:

* exact rationals (``fractions.Fraction``) for sequences whose times are
  rational, e.g. the concatenated family,
* high-precision reals (``mpmath.mpf``, >= 160 fractional bits) for
  irrational pulse times, e.g. the Uhrig family,
* plain floats for everything that only feeds double-precision scans.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

DEFAULT_PRECISION_BITS = 192
#: below this many bits, thresholded zero tests cannot separate analytic
#: zeros from roundoff; order searches refuse to run
MIN_ORDER_PRECISION_BITS = 160

PI = math.pi


@dataclass(frozen=True)
class Pulse:
    """Instantaneous rotation by ``angle`` about ``axis`` at time ``t``."""

    t: object
    axis: str
    angle: float

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise ValueError(f"invalid pulse axis {self.axis!r}")


@dataclass(frozen=True)
class PulseSequence:
    """An ordered list of instantaneous pulses on ``[0, T]``.

    A pulse exactly at ``t = T`` is legal; it closes the frame so the net
    ideal propagator matches the generating recursion, but it does not
    open a new toggling-frame interval.
    """

    duration: object
    pulses: tuple[Pulse, ...]
    label: str = ""
    precision_bits: int | None = None

    def __post_init__(self):
        if not _pos(self.duration):
            raise ValueError("duration must be positive")
        prev = None
        for p in self.pulses:
            if not _pos(p.t):
                raise ValueError("pulse times must satisfy 0 < t")
            if _gt(p.t, self.duration):
                raise ValueError("pulse times must satisfy t <= duration")
            if prev is not None and not _gt(p.t, prev):
                raise ValueError("pulse times must be strictly increasing")
            prev = p.t

    @property
    def times_kind(self) -> str:
        """Scalar regime of the stored times: exact | mp | float."""
        ts = [self.duration] + [p.t for p in self.pulses]
        if any(isinstance(t, mpmath.mpf) for t in ts):
            return "mp"
        if all(isinstance(t, (int, Fraction)) for t in ts):
            return "exact"
        return "float"


def _pos(x) -> bool:
    return x > 0


def _gt(a, b) -> bool:
    return a > b


def udd_sequence(n: int, duration=1, precision_bits: int = DEFAULT_PRECISION_BITS) -> PulseSequence:
    """Uhrig sequence: n pi pulses about x at t_j = T sin^2(j pi / (2n+2)).

    Times are irrational, so they are produced as high-precision reals at
    ``precision_bits`` (>= 160 required for order analysis downstream).
    """
    if n < 1:
        raise ValueError("udd_sequence needs n >= 1")
    if not duration > 0:
        raise ValueError("udd_sequence needs duration > 0")
    with mp.workprec(precision_bits + 20):
        T = mp.mpf(duration.numerator) / duration.denominator if isinstance(duration, Fraction) else mp.mpf(duration)
        times = [T * mp.sin(j * mp.pi / (2 * n + 2)) ** 2 for j in range(1, n + 1)]
        pulses = tuple(Pulse(t, "x", PI) for t in times)
        return PulseSequence(T, pulses, label=f"UDD_{n}", precision_bits=precision_bits)


def _cdd_pulse_times(k: int) -> list[Fraction]:
    """Pulse times of the k-fold concatenated sequence on [0, 1].

    One concatenation level halves the previous pattern, repeats it, and
    inserts x pulses at the midpoint and the end; pairs of coincident
    pulses multiply to identity and are dropped at generation time.
    """
    times: list[Fraction] = []
    for _ in range(k):
        half = [t / 2 for t in times]
        raw = half + [Fraction(1, 2)] + [Fraction(1, 2) + t for t in half] + [Fraction(1)]
        raw.sort()
        times = _cancel_pairs(raw)
    return times


def _cancel_pairs(sorted_times: list[Fraction]) -> list[Fraction]:
    out: list[Fraction] = []
    i = 0
    while i < len(sorted_times):
        j = i
        while j < len(sorted_times) and sorted_times[j] == sorted_times[i]:
            j += 1
        if (j - i) % 2 == 1:
            out.append(sorted_times[i])
        i = j
    return out


def cdd_sequence(k: int, duration=1) -> PulseSequence:
    """Concatenated sequence of level k over [0, T], exact rational times.

    ``k = 0`` is free evolution. The trailing pulse at ``t = T`` is kept
    whenever the recursion leaves it uncancelled, so the net ideal
    propagator is the identity up to phase.
    """
    if k < 0:
        raise ValueError("cdd_sequence needs k >= 0")
    T = duration if isinstance(duration, Fraction) else Fraction(duration)
    if not T > 0:
        raise ValueError("cdd_sequence needs duration > 0")
    pulses = tuple(Pulse(t * T, "x", PI) for t in _cdd_pulse_times(k))
    return PulseSequence(T, pulses, label=f"CDD_{k}")


def free_evolution(duration=1) -> PulseSequence:
    T = duration if isinstance(duration, Fraction) else Fraction(duration)
    return PulseSequence(T, (), label="free")


# ---------------------------------------------------------------------------
# JSON wire format:
# {"duration": <number>, "pulses": [{"t": <number>, "axis": "x|y|z",
#  "angle": <number>}], "label": <string>}
# Angles in radians, times in the units of duration.
# ---------------------------------------------------------------------------

_MAX_EXACT_DIGITS = 18


def _classify_time(s: str, min_precision: int = DEFAULT_PRECISION_BITS):
    """Map a decimal literal to Fraction (short) or mpf (long decimals)."""
    digits = len(re.sub(r"[^0-9]", "", s.lstrip("-+0") or "0"))
    if digits <= _MAX_EXACT_DIGITS and "e" not in s.lower():
        return Fraction(s)
    bits = max(min_precision, int(digits * 3.33) + 16)
    with mp.workprec(bits):
        return +mp.mpf(s)


def parse_sequence_json(text: str, min_precision: int = DEFAULT_PRECISION_BITS) -> PulseSequence:
    obj = json.loads(text, parse_float=str, parse_int=str)
    try:
        dur = _classify_time(obj["duration"], min_precision)
        raw_pulses = obj.get("pulses", [])
        label = obj.get("label", "")
        pulses = []
        prec = None
        times = [_classify_time(p["t"], min_precision) for p in raw_pulses]
        if any(isinstance(t, mpmath.mpf) for t in times) or isinstance(dur, mpmath.mpf):
            prec = max(DEFAULT_PRECISION_BITS, min_precision)
            with mp.workprec(prec + 20):
                times = [+mp.mpf(t.numerator) / t.denominator if isinstance(t, Fraction) else t for t in times]
                if isinstance(dur, Fraction):
                    dur = +mp.mpf(dur.numerator) / dur.denominator
        for p, t in zip(raw_pulses, times):
            pulses.append(Pulse(t, p["axis"], float(p["angle"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"invalid sequence JSON: {exc}") from exc
    return PulseSequence(dur, tuple(pulses), label=label, precision_bits=prec)


def _canonical_number(x, precision_bits=None) -> str:
    """Shortest decimal that round-trips at the value's own precision."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        f = float(x)
        if Fraction(repr(f)) == x or Fraction(f) == x:
            return repr(f)
        return repr(f)
    if isinstance(x, mpmath.mpf):
        if x == int(x):
            return str(int(x))
        digits = int((precision_bits or DEFAULT_PRECISION_BITS) * 0.30103) + 3
        return mp.nstr(x, digits, strip_zeros=True)
    return repr(float(x))


def sequence_to_json_str(seq: PulseSequence) -> str:
    prec = seq.precision_bits
    parts = [f'"duration": {_canonical_number(seq.duration, prec)}']
    rows = []
    for p in seq.pulses:
        rows.append(
            '{"t": %s, "axis": "%s", "angle": %s}'
            % (_canonical_number(p.t, prec), p.axis, repr(float(p.angle)))
        )
    parts.append('"pulses": [%s]' % ", ".join(rows))
    parts.append('"label": %s' % json.dumps(seq.label))
    return "{" + ", ".join(parts) + "}"


def load_sequence(path) -> PulseSequence:
    with open(path) as fh:
        return parse_sequence_json(fh.read())


def save_sequence(seq: PulseSequence, path) -> None:
    with open(path, "w") as fh:
        fh.write(sequence_to_json_str(seq))
        fh.write("\n")
