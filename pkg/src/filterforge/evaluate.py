"""Closed-form and quadrature evaluation of fundamental filter functions.

The order-alpha filter function is

    F(w, T) = (-i)**alpha * integral over the ordered simplex
              0 <= t_alpha <= ... <= t_1 <= T of
              prod_j y_{u_j v_j}(t_j) exp(i w_j t_j)

evaluated here by sweeping the nested integrals interval by interval.
On each interval the running inner integral is a sum of
polynomial-times-exponential terms; a term with local phase z = i*nu*dt
is integrated by the exponential power series when |z| < 1 (removing the
w -> 0 singularity) and by the closed integration-by-parts recurrence
otherwise. ``exp_kernel`` exposes the same two-branch rule for the
complete-interval kernels eps_m(z) = int_0^1 s**m e**(z s) ds.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from .control import ControlMatrix
from .moments import IndexTuple

QUADRATURE_ALPHA_CAP = 4


@dataclass(frozen=True)
class FilterEvaluation:
    index: IndexTuple
    omega: tuple
    value: complex


class _FloatOps:
    """Double-precision arithmetic backend."""

    prec = 53

    @staticmethod
    def real(x):
        return float(x)

    @staticmethod
    def to_c(x):
        return complex(x)

    @staticmethod
    def exp(z):
        return cmath.exp(z)

    @staticmethod
    def absval(z):
        return abs(z)

    i = 1j
    zero = 0.0j
    one = 1.0 + 0.0j


class _MpOps:
    """Arbitrary-precision backend (mpmath); use inside mp.workprec."""

    def __init__(self, prec):
        self.prec = prec
        self.i = mp.mpc(0, 1)
        self.zero = mp.mpc(0)
        self.one = mp.mpc(1)

    @staticmethod
    def real(x):
        from fractions import Fraction

        if isinstance(x, Fraction):
            return mp.mpf(x.numerator) / x.denominator
        return mp.mpf(x)

    @staticmethod
    def to_c(x):
        return mp.mpc(_MpOps.real(x))

    @staticmethod
    def exp(z):
        return mp.exp(z)

    @staticmethod
    def absval(z):
        return abs(z)


def exp_kernel(m: int, z, prec_bits: int = 53):
    """eps_m(z) = int_0^1 s**m exp(z s) ds.

    Power series for |z| < 1 (stable near z = 0), closed recurrence
    otherwise. Series terms stop once the next term falls below
    2**-prec_bits of the running sum.
    """
    if abs(z) < 1:
        tol = 2.0 ** (-prec_bits)
        term = 1.0 / (m + 1) if prec_bits <= 53 else mp.mpf(1) / (m + 1)
        total = term
        p = 1
        while True:
            term = term * z * (m + p) / (p * (m + p + 1))
            total += term
            if abs(term) <= tol * abs(total):
                return total
            p += 1
            if p > 10000:  # pragma: no cover - series always converges fast
                return total
    e = cmath.exp(z) if prec_bits <= 53 else mp.exp(z)
    val = (e - 1) / z
    for j in range(1, m + 1):
        val = (e - j * val) / z
    return val


def _poly_scale(p, c):
    return [a * c for a in p]


def _poly_add_into(dst, src):
    if len(src) > len(dst):
        dst.extend([dst[0] * 0] * (len(src) - len(dst)))
    for i, a in enumerate(src):
        dst[i] = dst[i] + a


def _poly_eval(p, x):
    acc = x * 0
    for a in reversed(p):
        acc = acc * x + a
    return acc


def _poly_derivative(p):
    return [a * (i + 1) for i, a in enumerate(p[1:])]


def _poly_integrate(p):
    out = [p[0] * 0]
    out.extend(a / (i + 1) for i, a in enumerate(p))
    return out


def _taylor_fold(p, imu, dt, eps, ops):
    """p(x) * exp(imu x) as one polynomial, truncated below eps on [0, dt]."""
    # choose K with |imu*dt|**(K+1)/(K+1)! < eps
    r = abs(imu) * abs(dt)
    K = 1
    bound = r
    while bound >= eps and K < 400:
        K += 1
        bound = bound * r / K
    expo = [ops.one]
    term = ops.one
    for pk in range(1, K + 1):
        term = term * imu / pk
        expo.append(term)
    out = [ops.zero] * (len(p) + len(expo) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(expo):
            out[i + j] = out[i + j] + a * b
    return out


def _by_parts(p, imu):
    """S with d/dx [S(x) exp(imu x)] = p(x) exp(imu x)."""
    out = [a * 0 for a in p]
    deriv = p
    sign = 1
    power = imu
    while deriv:
        c = 1 / power if sign > 0 else -1 / power
        _poly_add_into(out, _poly_scale(deriv, c))
        deriv = _poly_derivative(deriv)
        sign = -sign
        power = power * imu
    return out


def _fff_eval_impl(cm: ControlMatrix, idx: IndexTuple, omega, ops):
    alpha = idx.alpha
    bps = [ops.real(b) for b in cm.breakpoints]
    n_int = len(bps) - 1
    eps = 2.0 ** (-(ops.prec + 8))

    # running inner integral: per interval a list of (nu, poly in local x)
    terms = [[(0.0, [ops.one])] for _ in range(n_int)]
    carry = ops.zero

    for j in reversed(range(alpha)):
        w = float(omega[j]) if ops.prec <= 53 else mp.mpf(omega[j])
        yv = [ops.to_c(x) for x in cm.values(idx.u[j], idx.v[j])]
        carry = ops.zero
        new_terms = []
        for i in range(n_int):
            a, b = bps[i], bps[i + 1]
            dt = b - a
            poly_bucket = [carry]
            exp_terms = []
            if yv[i] != 0:
                phase = yv[i] * ops.exp(ops.i * w * a)
                for nu, p in terms[i]:
                    mu = nu + w
                    pp = _poly_scale(p, phase)
                    if abs(mu) * dt < 1:
                        folded = _taylor_fold(pp, ops.i * mu, dt, eps, ops)
                        _poly_add_into(poly_bucket, _poly_integrate(folded))
                    else:
                        S = _by_parts(pp, ops.i * mu)
                        exp_terms.append((mu, S))
                        poly_bucket[0] = poly_bucket[0] - S[0]
            cell = [(0.0, poly_bucket)] + exp_terms
            new_terms.append(cell)
            carry = _poly_eval(poly_bucket, dt)
            for mu, S in exp_terms:
                carry = carry + _poly_eval(S, dt) * ops.exp(ops.i * mu * dt)
        terms = new_terms

    pref = ops.one
    for _ in range(alpha):
        pref = pref * (-ops.i)
    return pref * carry


def fff_eval(cm: ControlMatrix, idx: IndexTuple, omega, precision: int = 53) -> FilterEvaluation:
    """Closed-form filter function value at the frequency tuple ``omega``."""
    omega = tuple(float(w) for w in (omega if hasattr(omega, "__len__") else (omega,)))
    if len(omega) != idx.alpha:
        raise ValueError("omega tuple length must equal the index order")
    for u in idx.u:
        if u not in cm.error_axes:
            raise ValueError(f"axis {u!r} not among the control matrix error axes")
    if precision <= 53:
        val = _fff_eval_impl(cm, idx, omega, _FloatOps)
        return FilterEvaluation(idx, omega, complex(val))
    with mp.workprec(precision + 10):
        val = _fff_eval_impl(cm, idx, omega, _MpOps(precision))
    return FilterEvaluation(idx, omega, val)


def taylor_series_value(table, omega) -> complex:
    """Evaluate a truncated moment table at ``omega`` (float arithmetic)."""
    alpha = table.index.alpha
    omega = tuple(float(w) for w in omega)
    total = 0.0 + 0.0j
    for k, m in table.entries.items():
        c = float(m)
        for kj, wj in zip(k, omega):
            c *= (1j * wj) ** kj / math.factorial(kj)
        total += c
    return (-1j) ** alpha * total


# ---------------------------------------------------------------------------
# Brute-force quadrature oracle (tests only)
# ---------------------------------------------------------------------------


def fff_eval_quadrature(cm: ControlMatrix, idx: IndexTuple, omega, n_nodes: int = 24) -> FilterEvaluation:
    """Ordered-simplex quadrature of the same integral, for cross-checks.

    Splits the simplex by assigning each ordered time to a control
    interval (times in one interval form a smaller ordered simplex,
    integrated by nested Gauss-Legendre; different intervals factorize).
    Cost grows as n_nodes**(largest block), so alpha is capped.
    """
    alpha = idx.alpha
    if alpha > QUADRATURE_ALPHA_CAP:
        raise ValueError(f"quadrature oracle limited to alpha <= {QUADRATURE_ALPHA_CAP}")
    if n_nodes < 2:
        raise ValueError("need at least 2 nodes per simplex dimension")
    omega = tuple(float(w) for w in (omega if hasattr(omega, "__len__") else (omega,)))

    bps, _ = cm.float_view()
    n_int = len(bps) - 1
    yvals = [
        [float(x) for x in cm.values(idx.u[j], idx.v[j])] for j in range(alpha)
    ]
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)

    def block_integral(freqs, a, b):
        """Ordered integral of prod exp(i f_r t_r), a<=t_m<=...<=t_1<=b."""

        def rec(fs, upper):
            if not fs:
                return np.ones_like(upper, dtype=complex)
            half = (upper - a) / 2.0
            ts = a + half[..., None] * (nodes + 1.0)
            inner = rec(fs[1:], ts)
            vals = np.exp(1j * fs[0] * ts) * inner
            return half * (vals @ weights)

        return complex(rec(list(freqs), np.array(b)))

    import itertools

    total = 0.0 + 0.0j
    for comb in itertools.combinations_with_replacement(range(n_int), alpha):
        assign = tuple(reversed(comb))  # slot 0 gets the latest interval
        wgt = 1.0
        for j, i in enumerate(assign):
            wgt *= yvals[j][i]
        if wgt == 0.0:
            continue
        val = 1.0 + 0.0j
        j = 0
        while j < alpha:
            i = assign[j]
            j2 = j
            while j2 < alpha and assign[j2] == i:
                j2 += 1
            val *= block_integral(omega[j:j2], bps[i], bps[i + 1])
            j = j2
        total += wgt * val
    total *= (-1j) ** alpha
    return FilterEvaluation(idx, omega, total)
