"""Exact antidifferentiation of piecewise polynomials on a breakpoint grid.

Coefficients are whatever scalar type the caller supplies (Fraction, mpf,
float); all operations stay inside that type. Used for the nested
time-ordered moment integrals, where each integration pass multiplies by
a piecewise-constant switching value and a monomial and then
antidifferentiates with continuity from t = 0.
"""
from __future__ import annotations


class PiecewisePoly:
    """Polynomial pieces on [b_0, b_m]; coeffs[i] ascending in global t."""

    __slots__ = ("breakpoints", "coeffs")

    def __init__(self, breakpoints, coeffs):
        self.breakpoints = breakpoints
        self.coeffs = coeffs

    @classmethod
    def one(cls, breakpoints):
        zero = breakpoints[-1] * 0
        return cls(breakpoints, [[zero + 1] for _ in range(len(breakpoints) - 1)])

    def scaled_by_values(self, values):
        """Multiply piece i by the scalar values[i]."""
        return PiecewisePoly(
            self.breakpoints,
            [[c * v for c in piece] for piece, v in zip(self.coeffs, values)],
        )

    def times_monomial(self, k: int):
        """Multiply by t**k."""
        if k == 0:
            return self
        zero = self.breakpoints[-1] * 0
        return PiecewisePoly(
            self.breakpoints,
            [[zero] * k + piece for piece in self.coeffs],
        )

    def antiderivative(self):
        """Continuous antiderivative vanishing at the left endpoint."""
        new_coeffs = []
        acc = self.breakpoints[-1] * 0  # running value at interval start
        for piece, a, b in zip(self.coeffs, self.breakpoints[:-1], self.breakpoints[1:]):
            integ = [acc * 0] + [c / (m + 1) for m, c in enumerate(piece)]
            const = acc - _poly_eval(integ, a)
            integ[0] = integ[0] + const
            new_coeffs.append(integ)
            acc = _poly_eval(integ, b)
        return PiecewisePoly(self.breakpoints, new_coeffs)

    def end_value(self):
        return _poly_eval(self.coeffs[-1], self.breakpoints[-1])

    def __call__(self, t):
        for piece, a, b in zip(self.coeffs, self.breakpoints[:-1], self.breakpoints[1:]):
            if t <= b:
                return _poly_eval(piece, t)
        return _poly_eval(self.coeffs[-1], t)


def _poly_eval(coeffs, x):
    acc = x * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
