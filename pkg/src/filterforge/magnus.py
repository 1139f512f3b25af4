"""Magnus terms for toy dephasing models, and the UDD4-vs-CDD3 scan.

The toggling-frame generator is expanded as A(t) = sum_m f_m(t) G_m with
scalar switching/tone profiles f_m and constant anti-Hermitian matrices
G_m; the first three exponent terms then reduce to ordered scalar
integrals contracted with (nested) commutators:

    W1 = sum I(m) G_m
    W2 = 1/2 sum I(m1,m2) [G_m1, G_m2]
    W3 = 1/6 sum I(m1,m2,m3) ([G_m1,[G_m2,G_m3]] + [G_m3,[G_m2,G_m1]])

The scalar integrals run over the ordered simplex t3 <= t2 <= t1 and are
evaluated by spectral (Gauss-Legendre) panels aligned to the control
breakpoints, refined until the terms stop changing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .control import ControlMatrix
from .pauli import AXES, SIGMA

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

SIGMA_N = {k: np.asarray(v) for k, v in SIGMA.items()}


@dataclass(frozen=True)
class Generator:
    """One term y_{uv}(t) * smooth(t) * G of the toggling-frame generator."""

    u: str
    v: str
    smooth: object  # vectorized t -> complex
    matrix: np.ndarray


@dataclass(frozen=True)
class ToyNoiseModel:
    """Single-tone / quasi-static dephasing toy models (error axis z).

    kinds:
      quantum-single-tone: bath qubit, B(t) = g (cos(wt) sz + sin(wt) sy)
      classical-cos:       scalar bath, B(t) = g cos(wt)
      classical-sin:       scalar bath, B(t) = g sin(wt)
      quasi-static:        bath qubit,  B = g sigma_(bath_axis)
    """

    kind: str
    g: float
    omega: float = 0.0
    bath_axis: str = "z"

    def __post_init__(self):
        if self.kind not in (
            "quantum-single-tone",
            "classical-cos",
            "classical-sin",
            "quasi-static",
        ):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if not self.g > 0:
            raise ValueError("coupling g must be positive")

    @property
    def bath_dim(self) -> int:
        return 1 if self.kind.startswith("classical") else 2

    def generators(self, cm: ControlMatrix) -> list[Generator]:
        if "z" not in cm.error_axes:
            raise ValueError("toy models couple to error axis z")
        g, w = self.g, self.omega
        parts: list[tuple[object, np.ndarray]]
        if self.kind == "quantum-single-tone":
            parts = [
                (lambda t, g=g, w=w: g * np.cos(w * t), SIGMA_N["z"]),
                (lambda t, g=g, w=w: g * np.sin(w * t), SIGMA_N["y"]),
            ]
        elif self.kind == "classical-cos":
            parts = [(lambda t, g=g, w=w: g * np.cos(w * t), np.eye(1, dtype=complex))]
        elif self.kind == "classical-sin":
            parts = [(lambda t, g=g, w=w: g * np.sin(w * t), np.eye(1, dtype=complex))]
        else:  # quasi-static
            parts = [
                (lambda t, g=g: g * np.ones_like(np.asarray(t, dtype=float)), SIGMA_N[self.bath_axis])
            ]
        gens = []
        for v in AXES:
            if cm.row_is_zero("z", v):
                continue
            for smooth, bath in parts:
                G = -1j * np.kron(SIGMA_N[v], bath)
                gens.append(Generator("z", v, smooth, G))
        return gens

    def guard_warnings(self, duration: float) -> list[str]:
        # generator norm is g for every kind; convergence heuristic g*T < 1
        if self.g * duration >= 1.0:
            return [f"convergence guard: g*T = {self.g * duration:.3g} >= 1"]
        return []


@dataclass(frozen=True)
class CompositeModel:
    """Sum of models sharing one bath space (e.g. quasi-static + tone)."""

    models: tuple

    def __post_init__(self):
        dims = {m.bath_dim for m in self.models}
        if len(dims) != 1:
            raise ValueError("component models must share the bath dimension")

    @property
    def bath_dim(self) -> int:
        return self.models[0].bath_dim

    def generators(self, cm: ControlMatrix) -> list[Generator]:
        out = []
        for m in self.models:
            out.extend(m.generators(cm))
        return out

    def guard_warnings(self, duration: float) -> list[str]:
        out = []
        for m in self.models:
            out.extend(m.guard_warnings(duration))
        return out


@dataclass
class MagnusTerms:
    """Exponent terms of the error propagator, each anti-Hermitian."""

    order: int
    terms: list
    duration: float
    warnings: list = field(default_factory=list)

    def total(self) -> np.ndarray:
        return sum(self.terms)


@lru_cache(maxsize=8)
def _gl_rule(n: int):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    # cumulative integration matrix: (Q f)[i] = int_{-1}^{x_i} interp(f)
    V = np.polynomial.legendre.legvander(nodes, n - 1)
    Vinv = np.linalg.inv(V)
    Q = np.zeros((n, n))
    for j in range(n):
        a = np.polynomial.legendre.legint(Vinv[:, j])
        Q[:, j] = np.polynomial.legendre.legval(nodes, a) - np.polynomial.legendre.legval(-1.0, a)
    return nodes, weights, Q


def _panel_grid(breakpoints, refine: int):
    edges = []
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        for r in range(refine):
            edges.append((a + (b - a) * r / refine, a + (b - a) * (r + 1) / refine))
    return edges


class _OrderedIntegrals:
    """Ordered simplex integrals of products of panel-sampled profiles."""

    def __init__(self, fvals: np.ndarray, half_widths: np.ndarray, weights, Q):
        self.f = fvals  # (M, P, n)
        self.h = half_widths  # (P,)
        self.w = weights
        self.Q = Q

    def total(self, vals: np.ndarray) -> np.ndarray:
        """Integral over the whole time window; vals (..., P, n)."""
        return np.einsum("...pi,i,p->...", vals, self.w, self.h)

    def cumulative(self, vals: np.ndarray) -> np.ndarray:
        """Running integral from 0, sampled at all nodes; vals (..., P, n)."""
        panel_ints = np.einsum("...pi,i->...p", vals, self.w) * self.h
        prefix = np.cumsum(panel_ints, axis=-1) - panel_ints
        inner = np.einsum("ij,...pj->...pi", self.Q, vals) * self.h[:, None]
        return prefix[..., None] + inner


def magnus_terms(
    cm: ControlMatrix,
    model,
    T: float | None = None,
    order: int = 3,
    abs_tol: float = 1e-10,
    n_nodes: int = 33,
    max_refine: int = 64,
) -> MagnusTerms:
    """First ``order`` exponent terms for the model on the (dilated) protocol.

    ``T`` rescales the pulse pattern to a new duration; panels align to
    the control breakpoints and are refined until every matrix entry is
    stable to ``abs_tol``.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2, or 3")
    bps, _ = cm.float_view()
    scale = 1.0 if T is None else float(T) / bps[-1]
    bps = [b * scale for b in bps]
    duration = bps[-1]

    gens = model.generators(cm)
    yvals = np.array(
        [[float(x) for x in cm.values(g.u, g.v)] for g in gens]
    )  # (M, n_intervals)
    mats = np.array([g.matrix for g in gens])  # (M, d, d)

    nodes, weights, Q = _gl_rule(n_nodes)

    prev = None
    refine = 1
    while True:
        panels = _panel_grid(bps, refine)
        P = len(panels)
        mids = np.array([(a + b) / 2 for a, b in panels])
        halfw = np.array([(b - a) / 2 for a, b in panels])
        ts = mids[:, None] + halfw[:, None] * nodes[None, :]  # (P, n)
        interval_of = np.repeat(np.arange(len(bps) - 1), refine)

        f = np.empty((len(gens), P, n_nodes), dtype=complex)
        for m, gen in enumerate(gens):
            f[m] = gen.smooth(ts) * yvals[m][interval_of][:, None]

        oi = _OrderedIntegrals(f, halfw, weights, Q)
        terms = _assemble_terms(oi, f, mats, order)
        if prev is not None:
            diff = max(np.max(np.abs(a - b)) for a, b in zip(terms, prev))
            if diff < abs_tol:
                break
        prev = terms
        if refine >= max_refine:
            break
        refine *= 2

    warnings = model.guard_warnings(duration)
    return MagnusTerms(order=order, terms=list(terms), duration=duration, warnings=warnings)


def _assemble_terms(oi: _OrderedIntegrals, f: np.ndarray, mats: np.ndarray, order: int):
    M = f.shape[0]
    I1 = oi.total(f)  # (M,)
    terms = [np.einsum("m,mij->ij", I1, mats)]
    if order >= 2:
        K = oi.cumulative(f)  # (M, P, n)
        I2 = oi.total(f[:, None] * K[None, :])  # (M, M)
        # comm[a, b] = [G_a, G_b]
        comm = np.einsum("aij,bjk->abik", mats, mats) - np.einsum("bij,ajk->abik", mats, mats)
        terms.append(0.5 * np.einsum("ab,abij->ij", I2, comm))
    if order >= 3:
        C = oi.cumulative(f[:, None] * K[None, :])  # (M2, M3, P, n)
        I3 = oi.total(f[:, None, None] * C[None, :, :])  # (M1, M2, M3)
        X = np.einsum("abc,bcjk->ajk", I3, comm)
        t3 = np.einsum("aij,ajk->ik", mats, X) - np.einsum("aij,ajk->ik", X, mats)
        W = np.einsum("abc,baij->cij", I3, comm)
        t3b = np.einsum("cij,cjk->ik", mats, W) - np.einsum("cij,cjk->ik", W, mats)
        terms.append((t3 + t3b) / 6.0)
    return terms


def error_action_norm(terms: MagnusTerms) -> float:
    """Spectral norm of the system-bath part of the error action.

    The error action i * sum of terms is projected onto the subspace
    with a nonidentity system factor (removing pure-bath evolution) and
    its operator norm returned.
    """
    X = 1j * terms.total()
    d = X.shape[0]
    bath_dim = d // 2
    Xr = X.reshape(2, bath_dim, 2, bath_dim)
    tr_sys = np.einsum("ibid->bd", Xr)
    X_sb = X - np.kron(np.eye(2), tr_sys / 2.0)
    return float(np.linalg.norm(X_sb, ord=2))


def exact_propagator(cm: ControlMatrix, model, T: float | None = None, tol: float = 1e-12) -> np.ndarray:
    """Reference propagator by adaptive integration of U' = A(t) U.

    Integrates interval by interval (the generator jumps at pulse
    times), then restores unitarity by polar projection. Test oracle for
    the truncated exponent.
    """
    bps, _ = cm.float_view()
    scale = 1.0 if T is None else float(T) / bps[-1]
    bps = [b * scale for b in bps]
    gens = model.generators(cm)
    yvals = [[float(x) for x in cm.values(g.u, g.v)] for g in gens]
    d = gens[0].matrix.shape[0]
    U = np.eye(d, dtype=complex)

    for i, (a, b) in enumerate(zip(bps[:-1], bps[1:])):
        if b <= a:
            continue

        def rhs(t, y):
            A = np.zeros((d, d), dtype=complex)
            for m, gen in enumerate(gens):
                if yvals[m][i] != 0.0:
                    A += (yvals[m][i] * complex(gen.smooth(np.array(t)))) * gen.matrix
            return (A @ y.reshape(d, d)).ravel()

        sol = solve_ivp(rhs, (a, b), U.ravel(), method="DOP853", rtol=tol, atol=tol)
        if not sol.success:
            raise RuntimeError(f"propagator integration failed on [{a}, {b}]: {sol.message}")
        U = sol.y[:, -1].reshape(d, d)

    uu, _, vv = np.linalg.svd(U)
    return uu @ vv


# ---------------------------------------------------------------------------
# Exact frequency-domain assembly for single-tone models
# ---------------------------------------------------------------------------

_TONE_PROFILES = {
    "quantum-single-tone": (("cos", "z"), ("sin", "y")),
    "classical-cos": (("cos", None),),
    "classical-sin": (("sin", None),),
    "quasi-static": (("const", None),),
}


def tone_error_action_norm(
    cm: ControlMatrix,
    model: ToyNoiseModel,
    T: float | None = None,
    order: int = 3,
    precision: int = 192,
    kernel_cache: dict | None = None,
) -> float:
    """||T H_SB^eff(T)|| for a tone model, assembled without quadrature.

    Expanding cos/sin tones into exponentials turns every ordered scalar
    integral into a linear combination of filter-function values, which
    are available at arbitrary precision; cancellations deep below the
    double-precision floor (e.g. high filtering orders at low tone
    frequency) then survive the projection. Cross-checked against the
    panel quadrature of ``magnus_terms`` where both are accurate.
    """
    from mpmath import mp

    from .evaluate import fff_eval
    from .moments import IndexTuple

    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2, or 3")
    work = cm if T is None else cm.dilated(float(T) / float(cm.duration))
    w = model.omega

    # generator list: (v_axis, exponential expansion, bath matrix)
    profile = _TONE_PROFILES[model.kind]
    gens = []
    for tone_kind, bath_axis in profile:
        if tone_kind == "cos":
            expo = ((w, 0.5 + 0j), (-w, 0.5 + 0j))
        elif tone_kind == "sin":
            expo = ((w, -0.5j), (-w, 0.5j))
        else:
            expo = ((0.0, 1.0 + 0j),)
        if model.bath_dim == 1:
            bath = np.eye(1, dtype=complex)
        else:
            bath = SIGMA_N[bath_axis if bath_axis else model.bath_axis]
        for v in AXES:
            if work.row_is_zero("z", v):
                continue
            G = -1j * model.g * np.kron(SIGMA_N[v], bath)
            gens.append((v, expo, G))

    M = len(gens)
    d = gens[0][2].shape[0]
    cache: dict = {} if kernel_cache is None else kernel_cache

    def ordered_integral(slots):
        """I(m1..mk) as an mpc value, via filter evaluations."""
        k = len(slots)
        idx = IndexTuple(("z",) * k, tuple(gens[m][0] for m in slots))
        total = mp.mpc(0)
        for nus, coeff in _expo_products(tuple(gens[m][1] for m in slots)):
            key = (idx.u, idx.v, nus)
            if key not in cache:
                val = fff_eval(work, idx, nus, precision).value
                # remove the (-i)**k prefactor to recover the raw integral
                cache[key] = val / ((-1j) ** k if precision <= 53 else mp.mpc(0, -1) ** k)
            total += mp.mpc(coeff) * cache[key]
        return total

    mats = [g[2] for g in gens]
    X = [[mp.mpc(0) for _ in range(d)] for _ in range(d)]  # i * sum of terms

    def add_matrix(scalars_mats):
        for scal, mat in scalars_mats:
            for r in range(d):
                for c in range(d):
                    if mat[r][c] != 0:
                        X[r][c] += scal * mp.mpc(1j * mat[r][c])

    import itertools

    with mp.workprec(precision + 10):
        add_matrix((ordered_integral((m,)), mats[m]) for m in range(M))
        if order >= 2:
            pairs = []
            for m1, m2 in itertools.product(range(M), repeat=2):
                comm = mats[m1] @ mats[m2] - mats[m2] @ mats[m1]
                if np.any(comm):
                    pairs.append((0.5 * ordered_integral((m1, m2)), comm))
            add_matrix(pairs)
        if order >= 3:
            triples = []
            for m1, m2, m3 in itertools.product(range(M), repeat=3):
                inner = mats[m2] @ mats[m3] - mats[m3] @ mats[m2]
                c1 = mats[m1] @ inner - inner @ mats[m1]
                inner_b = mats[m2] @ mats[m1] - mats[m1] @ mats[m2]
                c2 = mats[m3] @ inner_b - inner_b @ mats[m3]
                tot = c1 + c2
                if np.any(tot):
                    triples.append((ordered_integral((m1, m2, m3)) / 6, tot))
            add_matrix(triples)

        # project out the identity-system component in full precision
        bath_dim = d // 2
        for bi in range(bath_dim):
            for bj in range(bath_dim):
                tr = (X[bi][bj] + X[bath_dim + bi][bath_dim + bj]) / 2
                X[bi][bj] -= tr
                X[bath_dim + bi][bath_dim + bj] -= tr
    Xf = np.array([[complex(X[r][c]) for c in range(d)] for r in range(d)])
    return float(np.linalg.norm(Xf, ord=2))


def _expo_products(expansions):
    """All exponential sign choices with their coefficient products."""
    out = [((), 1.0 + 0j)]
    for expo in expansions:
        nxt = []
        for nus, coeff in out:
            for nu, c in expo:
                nxt.append((nus + (nu,), coeff * c))
        out = nxt
    return out


# ---------------------------------------------------------------------------
# UDD4 vs CDD3 tone scan
# ---------------------------------------------------------------------------

FIG1_MODELS = ("quantum", "classical-cos", "classical-sin", "classical-envelope")

#: below this the ratio denominator is considered numerically void
RATIO_DENOM_FLOOR = 1e-30


def figure1_scan(
    omega_grid,
    g_list,
    T: float = 1.0,
    order: int = 3,
    threads: int | None = None,
) -> list[dict]:
    """Compare UDD4 against CDD3 on single-tone dephasing models.

    For each (omega, g) the scan reports ||T H_SB^eff(T)|| for both
    protocols and their ratio, for the noncommuting bath-qubit model and
    for the commuting single-tone variants: the cosine and sine tones
    and the combined envelope g*|integral of y(t) e^{i w t}| (the tone
    variant of the commuting model is convention-dependent, so all three
    columns are emitted).
    """
    from concurrent.futures import ThreadPoolExecutor

    from .evaluate import fff_eval
    from .moments import IndexTuple
    from .sequences import cdd_sequence, udd_sequence
    from .control import toggling_control_matrix

    omega_grid = [float(w) for w in omega_grid]
    g_list = [float(g) for g in g_list]
    if not omega_grid or not g_list:
        raise ValueError("omega grid and g list must be nonempty")

    cm_udd = toggling_control_matrix(udd_sequence(4, 1), {"z"})
    cm_cdd = toggling_control_matrix(cdd_sequence(3, 1), {"z"})
    iz = IndexTuple(("z",), ("z",))

    def quantum_norms(w):
        # exact kernel assembly: survives the deep low-frequency
        # cancellations that defeat double-precision quadrature; the
        # filter values are g-independent, so share them across g
        out = {}
        for cm, tag in ((cm_udd, "udd"), (cm_cdd, "cdd")):
            cache: dict = {}
            for g in g_list:
                model = ToyNoiseModel("quantum-single-tone", g=g, omega=w)
                norm = tone_error_action_norm(
                    cm, model, T=T, order=order, kernel_cache=cache
                )
                out[(tag, g)] = (norm, model.guard_warnings(float(T)))
        return out

    n_workers = threads or _default_threads()
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            quantum_by_w = dict(zip(omega_grid, pool.map(quantum_norms, omega_grid)))
    else:
        quantum_by_w = {w: quantum_norms(w) for w in omega_grid}
    cells = [(w, g) for g in g_list for w in omega_grid]

    # commuting variants reduce to first-order filter values; evaluated
    # at high precision so the steep low-frequency suppression survives
    def f_values(cm):
        return {w: complex(fff_eval(cm, iz, (w,), precision=192).value) for w in omega_grid}

    f_udd = f_values(cm_udd)
    f_cdd = f_values(cm_cdd)

    rows = []
    for w, g in cells:
        nu_q, warn_u = quantum_by_w[w][("udd", g)]
        nc_q, warn_c = quantum_by_w[w][("cdd", g)]
        per_model = {
            "quantum": (nu_q, nc_q),
            # int y cos(wt) dt = Re(iF), int y sin(wt) dt = Im(iF)
            "classical-cos": (g * abs((1j * f_udd[w]).real), g * abs((1j * f_cdd[w]).real)),
            "classical-sin": (g * abs((1j * f_udd[w]).imag), g * abs((1j * f_cdd[w]).imag)),
            "classical-envelope": (g * abs(f_udd[w]), g * abs(f_cdd[w])),
        }
        for model_name in FIG1_MODELS:
            n_udd, n_cdd = per_model[model_name]
            flags = []
            if model_name == "quantum":
                flags.extend(sorted(set(warn_u + warn_c)))
            if n_cdd < RATIO_DENOM_FLOOR:
                flags.append("denominator-below-floor")
                ratio = math.inf if n_udd > 0 else math.nan
            else:
                ratio = n_udd / n_cdd
            rows.append(
                {
                    "omega": w,
                    "g": g,
                    "model": model_name,
                    "norm_udd4": n_udd,
                    "norm_cdd3": n_cdd,
                    "ratio": ratio,
                    "flags": ";".join(flags),
                }
            )
    return rows


def _default_threads() -> int:
    import os

    env = os.environ.get("FILTER_FORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def fig1_write_csv(rows, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh,
            fieldnames=["omega", "g", "model", "norm_udd4", "norm_cdd3", "ratio", "flags"],
        )
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def fig1_write_svg(rows, path) -> None:
    """Log-log ratio plot, one polyline per (g, model), self-contained SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    by_curve: dict = {}
    for row in rows:
        by_curve.setdefault((row["g"], row["model"]), []).append((row["omega"], row["ratio"]))
    styles = {"quantum": "-", "classical-cos": "--", "classical-sin": ":", "classical-envelope": "-."}
    for (g, model), pts in sorted(by_curve.items()):
        pts.sort()
        ws = [p[0] for p in pts]
        rs = [p[1] if math.isfinite(p[1]) and p[1] > 0 else math.nan for p in pts]
        ax.plot(ws, rs, styles.get(model, "-"), label=f"g={g:.4g} {model}")
    ax.axhline(1.0, color="k", linestyle=":", linewidth=1)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("tone frequency")
    ax.set_ylabel("norm ratio UDD4 / CDD3")
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
