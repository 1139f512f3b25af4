"""Toggling-frame control matrices for bang-bang sequences.

For a drift-less, ideally controlled qubit the frame unitary right after
the pulses up to time t maps each error operator as
``U(t)^dag sigma_u U(t) = sum_v y_uv(t) sigma_v``; the 3x3 matrix
``[y_uv]`` is a rotation, piecewise constant between pulse times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from .pauli import AXES, MAT3_IDENTITY, adjoint_rotation, mat3_mul
from .sequences import DEFAULT_PRECISION_BITS, PulseSequence

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

#: tolerance for recognizing angles that are integer multiples of pi/2,
#: whose adjoint rotations are exact signed permutations
_QUARTER_SNAP_TOL = 1e-9


@dataclass(frozen=True)
class ControlMatrix:
    """Piecewise-constant rotation y_uv(t) on [0, T].

    ``rotations[i]`` is the full 3x3 frame rotation on
    ``[breakpoints[i], breakpoints[i+1])``; rows are restricted to
    ``error_axes`` by the accessors but kept whole for invariant checks.
    ``scalar_kind`` records the arithmetic regime ("exact" | "mp" |
    "float") that downstream zero tests must honor.
    """

    duration: object
    breakpoints: tuple
    rotations: tuple
    error_axes: tuple[str, ...]
    scalar_kind: str
    precision_bits: int | None = None

    @property
    def intervals(self):
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:]))

    def values(self, u: str, v: str) -> list:
        """y_uv per interval."""
        iu, iv = _AXIS_INDEX[u], _AXIS_INDEX[v]
        return [r[iu][iv] for r in self.rotations]

    def row_is_zero(self, u: str, v: str) -> bool:
        return all(x == 0 for x in self.values(u, v))

    def is_pauli_pi_like(self) -> bool:
        """True when every entry lies in {-1, 0, +1}."""
        return all(
            x in (-1, 0, 1) for r in self.rotations for row in r for x in row
        )

    def dilated(self, factor) -> "ControlMatrix":
        """Same pulse pattern stretched in time by ``factor``."""
        if self.scalar_kind == "exact":
            lam = factor if isinstance(factor, Fraction) else Fraction(factor)
            if not lam > 0:
                raise ValueError("dilation factor must be positive")
            duration = self.duration * lam
            breakpoints = tuple(b * lam for b in self.breakpoints)
        elif self.scalar_kind == "mp":
            with mp.workprec((self.precision_bits or DEFAULT_PRECISION_BITS) + 20):
                if isinstance(factor, Fraction):
                    lam = mp.mpf(factor.numerator) / factor.denominator
                else:
                    lam = mp.mpf(factor)
                if not lam > 0:
                    raise ValueError("dilation factor must be positive")
                duration = self.duration * lam
                breakpoints = tuple(b * lam for b in self.breakpoints)
        else:
            lam = float(factor)
            if not lam > 0:
                raise ValueError("dilation factor must be positive")
            duration = self.duration * lam
            breakpoints = tuple(b * lam for b in self.breakpoints)
        return ControlMatrix(
            duration=duration,
            breakpoints=breakpoints,
            rotations=self.rotations,
            error_axes=self.error_axes,
            scalar_kind=self.scalar_kind,
            precision_bits=self.precision_bits,
        )

    def float_view(self):
        """(breakpoints, rotations) as plain floats for numeric backends."""
        bps = [float(b) for b in self.breakpoints]
        rots = [[[float(x) for x in row] for row in r] for r in self.rotations]
        return bps, rots


def _snap_quarter(angle: float):
    q = angle / (math.pi / 2)
    qi = round(q)
    if abs(q - qi) * (math.pi / 2) < _QUARTER_SNAP_TOL:
        c = (1, 0, -1, 0)[qi % 4]
        s = (0, 1, 0, -1)[qi % 4]
        return c, s
    return None


def toggling_control_matrix(seq: PulseSequence, error_axes) -> ControlMatrix:
    """Control matrix of a pulse sequence for the given error axes.

    The scalar regime is chosen from the inputs: rational times with
    quarter-turn pulses give exact integer/rational entries; mp times
    give mp entries; anything else falls back to floats.
    """
    error_axes = tuple(sorted(set(error_axes)))
    if not error_axes:
        raise ValueError("error_axes must be nonempty")
    for u in error_axes:
        if u not in AXES:
            raise ValueError(f"invalid error axis {u!r}")

    snaps = [_snap_quarter(p.angle) for p in seq.pulses]
    times_kind = seq.times_kind
    all_snapped = all(s is not None for s in snaps)
    if times_kind == "exact" and all_snapped:
        kind = "exact"
    elif times_kind == "mp":
        kind = "mp"
    else:
        kind = "float"

    prec = seq.precision_bits if kind == "mp" else None

    def rotation_for(pulse, snap):
        if snap is not None:
            return adjoint_rotation(pulse.axis, snap[0], snap[1])
        if kind == "mp":
            with mp.workprec((prec or DEFAULT_PRECISION_BITS) + 20):
                return adjoint_rotation(pulse.axis, mp.cos(pulse.angle), mp.sin(pulse.angle))
        return adjoint_rotation(pulse.axis, math.cos(pulse.angle), math.sin(pulse.angle))

    breakpoints = [seq.duration * 0]
    rotations = []
    frame = MAT3_IDENTITY
    for pulse, snap in zip(seq.pulses, snaps):
        if pulse.t == seq.duration:
            break  # frame-closing pulse: no interval after it
        breakpoints.append(pulse.t)
        rotations.append(frame)
        frame = mat3_mul(rotation_for(pulse, snap), frame)
    breakpoints.append(seq.duration)
    rotations.append(frame)

    # merge intervals whose frames coincide (e.g. after a no-op pulse)
    merged_bps = [breakpoints[0]]
    merged_rots = []
    for i, r in enumerate(rotations):
        if merged_rots and _rot_equal(merged_rots[-1], r):
            continue
        if merged_rots:
            merged_bps.append(breakpoints[i])
        merged_rots.append(r)
    merged_bps.append(breakpoints[-1])

    duration = seq.duration
    if kind == "float":
        duration = float(duration)
        merged_bps = [float(b) for b in merged_bps]
        merged_rots = [[[float(x) for x in row] for row in r] for r in merged_rots]

    return ControlMatrix(
        duration=duration,
        breakpoints=tuple(merged_bps),
        rotations=tuple(merged_rots),
        error_axes=error_axes,
        scalar_kind=kind,
        precision_bits=prec,
    )


def _rot_equal(a, b) -> bool:
    return all(a[i][j] == b[i][j] for i in range(3) for j in range(3))
