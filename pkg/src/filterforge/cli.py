"""Command-line interface: order reports, filter grids, the comparison
scan, and decay computation.

Exit codes: 0 success, 2 parse error, 3 unsupported request, 4 numeric
failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_NUMERIC = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _parse_grid(spec: str) -> list[float]:
    """Grid spec: "log:lo:hi:n" (decades), "lin:lo:hi:n", or "w1,w2,...";
    log grids take exponents, e.g. log:-5:1:60."""
    try:
        if spec.startswith("log:"):
            _, lo, hi, n = spec.split(":")
            return list(np.logspace(float(lo), float(hi), int(n)))
        if spec.startswith("lin:"):
            _, lo, hi, n = spec.split(":")
            return list(np.linspace(float(lo), float(hi), int(n)))
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad grid spec {spec!r}: {exc}") from exc


def _parse_number(text: str) -> float:
    try:
        if "/" in text:
            num, den = text.split("/")
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(EXIT_PARSE, f"bad number {text!r}") from exc


def _load_sequence(path: str, min_precision: int | None = None):
    from .sequences import DEFAULT_PRECISION_BITS, parse_sequence_json

    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}") from exc
    try:
        json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(
            EXIT_PARSE,
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
        ) from exc
    try:
        return parse_sequence_json(text, min_precision or DEFAULT_PRECISION_BITS)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from exc


def _parse_axes(text: str):
    axes = tuple(sorted(set(text)))
    for a in axes:
        if a not in ("x", "y", "z"):
            raise CliError(EXIT_UNSUPPORTED, f"unknown axis {a!r} (use x, y, z)")
    if not axes:
        raise CliError(EXIT_UNSUPPORTED, "need at least one axis")
    return axes


def _write_text(out, text: str):
    if out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def cmd_orders(args) -> int:
    from .control import toggling_control_matrix
    from .orders import orders_report

    seq = _load_sequence(args.sequence, min_precision=args.precision)
    axes = _parse_axes(args.axes)
    if args.alpha_max > 7:
        raise CliError(EXIT_UNSUPPORTED, "alpha-max capped at 7")
    try:
        cm = toggling_control_matrix(seq, axes)
        report = orders_report(
            cm,
            alpha_max=args.alpha_max,
            degree_cap=args.degree_cap,
            label=seq.label or args.sequence,
        )
    except ValueError as exc:
        raise CliError(EXIT_UNSUPPORTED, str(exc)) from exc
    _write_text(args.out, json.dumps(report.to_json(), indent=2))
    return EXIT_OK


def cmd_fff(args) -> int:
    from .control import toggling_control_matrix
    from .evaluate import fff_eval
    from .moments import IndexTuple

    seq = _load_sequence(args.sequence)
    u, v = args.u, args.v
    if len(u) != len(v) or not u:
        raise CliError(EXIT_UNSUPPORTED, "--u and --v must be equal-length, nonempty")
    if len(u) > 7:
        raise CliError(EXIT_UNSUPPORTED, "order capped at 7")
    for a in u + v:
        if a not in ("x", "y", "z"):
            raise CliError(EXIT_UNSUPPORTED, f"unknown axis {a!r} in index")
    grid = _parse_grid(args.grid)
    try:
        cm = toggling_control_matrix(seq, set(u))
        idx = IndexTuple(tuple(u), tuple(v))
    except ValueError as exc:
        raise CliError(EXIT_UNSUPPORTED, str(exc)) from exc
    alpha = len(u)
    lines = []
    header = [f"omega_{j+1}" for j in range(alpha)] + ["re", "im"]
    lines.append(",".join(header))
    try:
        for w in grid:
            omega = (w,) * alpha
            val = fff_eval(cm, idx, omega, precision=args.precision)
            value = complex(val.value)
            row = [repr(float(x)) for x in omega] + [repr(value.real), repr(value.imag)]
            lines.append(",".join(row))
    except (ValueError, ArithmeticError) as exc:
        raise CliError(EXIT_NUMERIC, str(exc)) from exc
    _write_text(args.out, "\n".join(lines))
    return EXIT_OK


def cmd_fig1(args) -> int:
    from .magnus import fig1_write_csv, fig1_write_svg, figure1_scan

    g_list = [_parse_number(x) for x in args.g_list.split(",") if x.strip()]
    grid = _parse_grid(args.grid)
    formats = {f.strip() for f in args.format.split(",") if f.strip()}
    unknown = formats - {"csv", "svg"}
    if unknown:
        raise CliError(EXIT_UNSUPPORTED, f"unknown format(s) {sorted(unknown)}")
    try:
        rows = figure1_scan(grid, g_list, T=args.T, threads=args.threads)
    except (ValueError, ArithmeticError) as exc:
        raise CliError(EXIT_NUMERIC, str(exc)) from exc
    base = args.out or "fig1"
    written = []
    if "csv" in formats:
        fig1_write_csv(rows, base + ".csv")
        written.append(base + ".csv")
    if "svg" in formats:
        fig1_write_svg(rows, base + ".svg")
        written.append(base + ".svg")
    sys.stdout.write("wrote " + ", ".join(written) + "\n")
    return EXIT_OK


def cmd_decay(args) -> int:
    from .control import toggling_control_matrix
    from .spectra import DivergentSpectrumError, NoiseSpectrum, chi_gaussian

    seq = _load_sequence(args.sequence)
    try:
        with open(args.spectrum) as fh:
            spec_obj = json.load(fh)
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {args.spectrum}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(
            EXIT_PARSE,
            f"{args.spectrum}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
        ) from exc
    try:
        spectrum = NoiseSpectrum.from_json(spec_obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"{args.spectrum}: {exc}") from exc
    try:
        cm = toggling_control_matrix(seq, {"z"})
        T = args.T if args.T is not None else float(seq.duration)
        chi = chi_gaussian(cm, spectrum, T=T)
    except DivergentSpectrumError as exc:
        raise CliError(EXIT_NUMERIC, str(exc)) from exc
    except ValueError as exc:
        raise CliError(EXIT_UNSUPPORTED, str(exc)) from exc
    if not math.isfinite(chi):
        raise CliError(EXIT_NUMERIC, f"decay exponent is not finite: {chi}")
    lines = [
        "sequence,spectrum,T,chi,coherence",
        ",".join(
            [
                seq.label or args.sequence,
                spectrum.kind,
                repr(float(T)),
                repr(chi),
                repr(math.exp(-chi)),
            ]
        ),
    ]
    _write_text(args.out, "\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filterforge",
        description="Transfer filter functions, filtering/cancellation orders, "
        "decoupling comparisons, and dephasing decay for bang-bang qubit control.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orders", help="filtering/cancellation order report (JSON)")
    p.add_argument("sequence", help="sequence JSON file")
    p.add_argument("--axes", default="z", help="error axes, e.g. z or xz")
    p.add_argument("--alpha-max", type=int, default=7, dest="alpha_max")
    p.add_argument("--degree-cap", type=int, default=12, dest="degree_cap")
    p.add_argument("--precision", type=int, default=192)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_orders)

    p = sub.add_parser("fff", help="filter function values on a frequency grid (CSV)")
    p.add_argument("sequence")
    p.add_argument("--u", required=True, help="error-axis string, e.g. zz")
    p.add_argument("--v", required=True, help="basis-axis string, e.g. zz")
    p.add_argument("--grid", default="log:-2:1:40")
    p.add_argument("--precision", type=int, default=53)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fff)

    p = sub.add_parser("fig1", help="UDD4 vs CDD3 tone scan (CSV + SVG)")
    p.add_argument("--g-list", default="9/40,9/400,9/4000", dest="g_list")
    p.add_argument("--grid", default="log:-5:1:60")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default="fig1", help="output basename")
    p.add_argument("--format", default="csv,svg")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("decay", help="Gaussian dephasing decay exponent (CSV)")
    p.add_argument("sequence")
    p.add_argument("spectrum", help="spectrum JSON file")
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
