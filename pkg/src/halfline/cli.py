"""Command-line entry point: evaluations, transforms and verification suites.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import warnings

import numpy as np

from .core import PhysicalScale
from .errors import DomainError, NumericalError
from .green import green_eval
from .quadrature import DEFAULT_QUAD
from .report import cell, jsonable
from .rhs import N_MAX, ket_action, norm_nm
from .spectral import classify_point, rho_density, stieltjes_measure
from .suites import SUITES, RunConfig, run_suite
from .testfunctions import parse_test_function
from .transform import (DEFAULT_GRID_N, DEFAULT_K_MAX, EnergyGrid, forward_transform,
                        forward_transform_rho, inverse_transform, propagate)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    rf"^(?:(?P<re>[+-]?{_NUM})(?P<im>[+-](?:{_NUM})?i)?|(?P<only>[+-]?(?:{_NUM})?i))$")


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi`` (decimal reals, optional exponent)."""
    m = _COMPLEX.match(text.strip().replace(" ", ""))
    if not m:
        raise argparse.ArgumentTypeError(f"{text!r} is not a complex literal (a, bi, a+bi, a-bi)")

    def imag(s: str) -> float:
        body = s[:-1]
        return float(body + "1") if body in ("", "+", "-") else float(body)

    if m["only"] is not None:
        return complex(0.0, imag(m["only"]))
    return complex(float(m["re"]), imag(m["im"]) if m["im"] else 0.0)


def _function(text: str):
    try:
        return parse_test_function(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


_GLOBAL_DEFAULTS = {
    "hbar": 1.0, "mass": 0.5, "scale_c": None, "rel_tol": DEFAULT_QUAD.rel_tol,
    "abs_tol": DEFAULT_QUAD.abs_tol, "grid_k_max": DEFAULT_K_MAX, "grid_n": DEFAULT_GRID_N,
    "format": "csv", "out": None, "seed": 42, "parallel": False, "tol": None,
}


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand without clobbering
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS,
                                allow_abbrev=False)
    g = p.add_argument_group("global options")
    g.add_argument("--hbar", type=_positive_float, help="reduced Planck constant (default 1)")
    g.add_argument("--mass", type=_positive_float, help="particle mass (default 0.5)")
    g.add_argument("--scale-c", type=_positive_float, help="set c = 2m/hbar^2 directly")
    g.add_argument("--rel-tol", type=_positive_float, help="quadrature relative tolerance")
    g.add_argument("--abs-tol", type=_positive_float, help="quadrature absolute tolerance")
    g.add_argument("--grid-k-max", type=_positive_float, help="largest wave number of the energy grid")
    g.add_argument("--grid-n", type=_positive_int, help="number of energy grid nodes")
    g.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    g.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    g.add_argument("--seed", type=int, help="seed for random sweeps (default 42)")
    g.add_argument("--parallel", action="store_true", help="run independent suites concurrently")
    g.add_argument("--tol", type=_positive_float, help="override every verification tolerance")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(
        prog="halfline", parents=[common], allow_abbrev=False,
        description="Spectral analysis of the free Hamiltonian on the half line.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("green", parents=[common], allow_abbrev=False,
                       help="Green kernel G(r, s; E)")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--energy", type=parse_complex, required=True, help="complex literal, e.g. 2i")

    p = sub.add_parser("rho", parents=[common], allow_abbrev=False, help="spectral density rho(E)")
    p.add_argument("--at", type=float, nargs="+", help="energies (default: the energy grid)")

    p = sub.add_parser("spectrum", parents=[common], allow_abbrev=False,
                       help="interval mass by Stieltjes inversion, or point classification")
    p.add_argument("--interval", type=float, nargs=2, metavar=("E1", "E2"))
    p.add_argument("--at", type=float, nargs="+", help="energies to classify")

    p = sub.add_parser("transform", parents=[common], allow_abbrev=False,
                       help="energy transform of a test function")
    p.add_argument("--fn", type=_function, required=True, metavar="SPEC",
                   help="terms 'power,width,coefficient;...' with odd powers")
    p.add_argument("--direction", choices=("forward", "inverse", "rho"), default="forward",
                   help="inverse reconstructs phi from its energy image")
    p.add_argument("--at", type=float, nargs="+", help="energies (forward/rho) or radii (inverse)")
    p.add_argument("--r-max", type=_positive_float, default=10.0)
    p.add_argument("--r-n", type=_positive_int, default=101)

    p = sub.add_parser("norms", parents=[common], allow_abbrev=False,
                       help="test-space norms ||phi||_{n,m}")
    p.add_argument("--fn", type=_function, required=True, metavar="SPEC")
    p.add_argument("--n-max", type=int, default=N_MAX)

    p = sub.add_parser("ket", parents=[common], allow_abbrev=False, help="ket functional <phi|E>")
    p.add_argument("--fn", type=_function, required=True, metavar="SPEC")
    p.add_argument("--at", type=float, nargs="+", required=True)

    p = sub.add_parser("propagate", parents=[common], allow_abbrev=False,
                       help="free time evolution exp(-i H0 t) phi")
    p.add_argument("--fn", type=_function, required=True, metavar="SPEC")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--r-max", type=_positive_float, default=10.0)
    p.add_argument("--r-n", type=_positive_int, default=101)

    p = sub.add_parser("verify", parents=[common], allow_abbrev=False,
                       help="run verification suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    return parser


def _config(args) -> RunConfig:
    for k, v in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if args.scale_c is not None:
        scale = PhysicalScale.from_c(args.scale_c)
    else:
        scale = PhysicalScale(args.hbar, args.mass)
    quad = DEFAULT_QUAD.with_tol(args.rel_tol, args.abs_tol)
    return RunConfig(scale=scale, quad=quad, grid_k_max=args.grid_k_max, grid_n=args.grid_n,
                     output_format=args.format, output_path=args.out, seed=args.seed,
                     tol=args.tol, parallel=args.parallel)


def _table(columns, rows, fmt: str, command: str, cfg: RunConfig) -> str:
    if fmt == "json":
        payload = {"command": command, "config": cfg.to_dict(), "columns": list(columns),
                   "rows": [dict(zip(columns, r, strict=True)) for r in rows]}
        return json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([cell(x) for x in r])
    return buf.getvalue()


def _sampled_rows(abscissa, values):
    values = np.asarray(values, dtype=complex)
    return [(i, float(x), float(v.real), float(v.imag))
            for i, (x, v) in enumerate(zip(abscissa, values, strict=True))]


_SAMPLED = ("index", "abscissa", "value_re", "value_im")


def _run(args, cfg: RunConfig):
    """Return ``(text, exit_code)`` for the parsed command."""
    sc, quad, fmt = cfg.scale, cfg.quad, cfg.output_format
    cmd = args.command
    if cmd == "green":
        ev = green_eval(args.r, args.s, args.energy, sc)
        rows = [(args.r, args.s, args.energy, ev.value.real, ev.value.imag, ev.region.value,
                 ev.ordering.value, ev.extension)]
        cols = ("r", "s", "energy", "value_re", "value_im", "region", "ordering", "extension")
        return _table(cols, rows, fmt, cmd, cfg), EXIT_OK
    if cmd == "rho":
        E = np.asarray(args.at if args.at else cfg.grid.nodes, dtype=float)
        return _table(_SAMPLED, _sampled_rows(E, rho_density(E, sc) * np.ones_like(E)), fmt, cmd,
                      cfg), EXIT_OK
    if cmd == "spectrum":
        if args.interval is None and not args.at:
            raise argparse.ArgumentTypeError("give --interval E1 E2 and/or --at E ...")
        rows = []
        if args.interval is not None:
            E1, E2 = args.interval
            rows.append(("mass", E1, E2, stieltjes_measure(E1, E2, cfg.limit, quad, sc), ""))
        for E in args.at or ():
            cl = classify_point(E, cfg.limit, sc)
            rows.append(("classify", E, E, abs(cl.jump_value), cl.verdict.value))
        return _table(("kind", "e1", "e2", "value", "verdict"), rows, fmt, cmd, cfg), EXIT_OK
    if cmd == "transform":
        phi = args.fn
        if args.direction == "inverse":
            r = np.asarray(args.at, float) if args.at else np.linspace(0.0, args.r_max, args.r_n)
            image = forward_transform(phi, EnergyGrid.at([1.0]), quad, sc)
            vals = inverse_transform(image, r, quad, sc)
            return _table(_SAMPLED, _sampled_rows(r, vals), fmt, cmd, cfg), EXIT_OK
        grid = EnergyGrid.at(sorted(args.at)) if args.at else cfg.grid
        fn = forward_transform_rho if args.direction == "rho" else forward_transform
        image = fn(phi, grid, quad, sc)
        return _table(_SAMPLED, _sampled_rows(grid.nodes, image.values), fmt, cmd, cfg), EXIT_OK
    if cmd == "norms":
        rows = [(n, m, norm_nm(args.fn, n, m, quad, sc))
                for n in range(args.n_max + 1) for m in range(args.n_max + 1)]
        return _table(("n", "m", "value"), rows, fmt, cmd, cfg), EXIT_OK
    if cmd == "ket":
        vals = [ket_action(args.fn, E, quad, sc).value for E in args.at]
        return _table(_SAMPLED, _sampled_rows(args.at, vals), fmt, cmd, cfg), EXIT_OK
    if cmd == "propagate":
        r = np.linspace(0.0, args.r_max, args.r_n)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RuntimeWarning)
            vals = propagate(args.fn, args.t, r, quad, sc)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return _table(_SAMPLED, _sampled_rows(r, vals), fmt, cmd, cfg), EXIT_OK
    if cmd == "verify":
        report = run_suite(args.suite, cfg)
        text = report.to_json() if fmt == "json" else report.to_csv()
        for c in report.failures():
            print(f"FAIL {c.id}: error {c.abs_error:.3e} > tolerance {c.tolerance:.3e}",
                  file=sys.stderr)
        s = report.summary
        print(f"{report.suite}: {s['pass']} passed, {s['fail']} failed", file=sys.stderr)
        return text, EXIT_OK if report.passed else EXIT_FAIL
    raise AssertionError(cmd)


def _join_negative_values(argv):
    # "--energy -1+i" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--energy" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--energy={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = _config(args)
        text, code = _run(args, cfg)
    except argparse.ArgumentTypeError as exc:
        print(f"halfline {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        print(f"halfline {args.command}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        print(f"halfline {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
