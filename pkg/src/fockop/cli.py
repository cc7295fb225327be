"""``fockop`` command-line interface.

Every subcommand writes ``{"config": ..., "results": [...], "diagnostics": ...}``
as JSON, or the flattened results as CSV.  Exit status: 0 success,
1 invalid input or usage, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .errors import FockopError, NumericalError, ParameterError, RangeError
from .quadrature import DEFAULT_N_R, DEFAULT_N_THETA, max_workers, moment_table
from .space import SpaceParams, moment

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2
DEFAULT_DEGREE = {"counterexample": 14, "kernel": 0}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# Helpers

def _complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    if t.endswith("*j"):
        t = t[:-2] + "j"
    try:
        return complex(t)
    except ValueError:
        raise ParameterError(f"cannot read {text!r} as a complex number") from None


def _complex_list(text: str) -> list[complex]:
    return [_complex(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParameterError(f"cannot read {text!r} as a list of integers") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParameterError(f"cannot read {text!r} as a list of numbers") from None


def _c(prefix: str, z) -> dict:
    z = complex(z)
    return {f"{prefix}_re": z.real, f"{prefix}_im": z.imag}


def _rel(a, b) -> float:
    a, b = complex(a), complex(b)
    return abs(a - b) / abs(b) if b != 0 else abs(a - b)


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def _space(args) -> SpaceParams:
    return SpaceParams(args.d, args.m, args.alpha, args.s)


# --------------------------------------------------------------------------
# Subcommands; each returns (results, diagnostics)

def cmd_moments(args):
    p = _space(args)
    D = args.max_degree if args.max_degree is not None else args.degree
    if p.d > 2:
        raise ParameterError("quadrature comparison needs d <= 2")
    table = moment_table(p, D, args.n_r, args.n_theta, args.n_y)
    rows, worst = [], 0.0
    for nu, quad in table.items():
        exact = moment(p, nu)
        err = abs(quad - exact) / exact
        worst = max(worst, err)
        rows.append({"nu": list(nu), "degree": sum(nu), "closed_form": exact,
                     "quadrature": quad, "rel_error": err})
    return rows, {"max_rel_error": worst, "passed": worst <= args.tol}


def cmd_kernel(args):
    from .special import kernel_series, kernel_value

    p = _space(args)
    x, y = _complex_list(args.x), _complex_list(args.y)
    kv = kernel_value(p, x, y, regime=args.regime)
    row = {"x": [[v.real, v.imag] for v in x], "y": [[v.real, v.imag] for v in y],
           **_c("value", kv.value), "regime": kv.regime}
    diag = {}
    if args.degree:
        trunc = kernel_series(p, x, y, args.degree)
        row.update(_c("truncated", trunc))
        diag["truncation_rel_diff"] = _rel(trunc, kv.value)
    return [row], diag


def cmd_eigenvalues(args):
    from .mellin import omega
    from .symbols import parse_symbol

    p = _space(args)
    f = parse_symbol(args.f, p.d)
    D = args.max_degree if args.max_degree is not None else args.degree
    rows = []
    for k in range(D + 1):
        val = omega(f, float(k), p, method=args.method)
        rows.append({"degree": k, **_c("omega", val)})
    return rows, {"symbol": f.label, "radiality": f.radiality, "method": args.method}


def cmd_matrix(args):
    from .toeplitz import build_matrix

    p = _space(args)
    T = build_matrix(args.g, p, args.degree, args.n_r, args.n_theta, args.n_y)
    rows = []
    for i, nu in enumerate(T.basis):
        for j, kappa in enumerate(T.basis):
            v = T.matrix[i, j]
            if args.all_entries or abs(v) > args.tol:
                rows.append({"nu": list(nu), "kappa": list(kappa), **_c("entry", v)})
    off = T.offblock_norm()
    tot = float(np.linalg.norm(T.matrix))
    return rows, {"size": len(T.basis), "offblock_mass": off / tot if tot else 0.0,
                  "hermitian_defect": T.hermitian_defect()}


def cmd_commute(args):
    from .toeplitz import commutator_residual, offblock_mass

    p = _space(args)
    rep = commutator_residual(args.f, args.g, p, args.degree, args.n_r, args.n_theta, args.n_y)
    off = offblock_mass(args.g, p, args.degree, args.n_r, args.n_theta, args.n_y)
    commutes = rep.residual <= args.tol
    return [rep.as_dict()], {"offblock_mass": off, "commutes": commutes,
                             "invariant": off <= args.tol, "consistent": commutes == (off <= args.tol)}


def cmd_zero_product(args):
    from .toeplitz import zero_product_residual

    p = _space(args)
    a, b = zero_product_residual(args.f, args.g, p, args.degree, args.n_r, args.n_theta, args.n_y)
    return [a.as_dict(), b.as_dict()], {"both_nonzero": a.residual > args.tol and b.residual > args.tol}


def cmd_equation(args):
    from .toeplitz import equation_residual

    p = _space(args)
    k = _int_list(args.k) if args.k else [0] * p.d
    n = _int_list(args.n) if args.n else [0] * p.d
    D_l = args.max_l if args.max_l is not None else args.degree
    rep = equation_residual(args.f1, args.f2, args.g, k, n, p, D_l, args.n_r, args.n_theta, args.n_y)
    return [rep.as_dict()], {"k": k, "n": n, "max_l": D_l}


def cmd_period_scan(args):
    from .mellin import period_scan_report
    from .symbols import parse_symbol

    p = _space(args)
    f1, f2 = parse_symbol(args.f1, p.d), parse_symbol(args.f2, p.d)
    grid = np.linspace(args.zeta_min, args.zeta_max, args.zeta_count)
    rep = period_scan_report(f1, f2, p, (args.n_min, args.n_max), grid, args.tol)
    rows = [{"n": n, "max_rel_deviation": rep.residuals[n], "in_set": n in rep.shifts}
            for n in range(args.n_min, args.n_max + 1)]
    return rows, {"shifts": sorted(rep.shifts), "shape": rep.shape}


def cmd_mellin_check(args):
    from .mellin import gamma_quotient, gamma_quotient_kernel, mellin_convolve, mellin_transform

    a, b, m = args.a, args.b, args.m
    rows = []
    for z in _complex_list(args.z):
        num = mellin_transform(lambda r: gamma_quotient_kernel(a, b, m, r), 2 * z, support=(0.0, 1.0))
        ex = gamma_quotient(a, b, m, z)
        rows.append({"check": "gamma_quotient", **_c("z", z), **_c("numeric", num), **_c("exact", ex),
                     "rel_error": _rel(num, ex)})

    def f(x):
        return np.exp(-np.asarray(x, dtype=float))

    zeta = args.conv_zeta
    lhs = mellin_transform(lambda x: mellin_convolve(f, f, float(x)), zeta)
    rhs = mellin_transform(f, zeta) ** 2
    rows.append({"check": "convolution", **_c("z", zeta), **_c("numeric", lhs), **_c("exact", rhs),
                 "rel_error": _rel(lhs, rhs)})
    worst = max(r["rel_error"] for r in rows)
    return rows, {"max_rel_error": worst, "passed": worst <= args.tol}


def cmd_scaling_check(args):
    from .symbols import g_transform, parse_symbol, v_transform

    p = _space(args)
    g = parse_symbol(args.g, p.d)
    rows, worst = [], 0.0
    for t in _float_list(args.t):
        Vg = v_transform(g, t, p)
        for z in _complex_list(args.z):
            zv = np.full(p.d, z)
            lhs = g_transform(Vg, zv, p, args.n_r, args.n_theta, args.n_y)
            rhs = t ** (-2 * (p.s + p.d) - 2 * complex(np.sum(zv))) * g_transform(g, zv, p, args.n_r,
                                                                                 args.n_theta, args.n_y)
            err = _rel(lhs, rhs)
            worst = max(worst, err)
            rows.append({"t": t, **_c("z", z), **_c("lhs", lhs), **_c("rhs", rhs), "rel_deviation": err})
    return rows, {"max_rel_deviation": worst, "passed": worst <= args.tol}


def cmd_counterexample(args):
    from .toeplitz import counterexample_check

    p = _space(args)
    rep = counterexample_check(args.N, p, args.degree, args.n_r, args.n_theta, args.n_y)
    return [rep.as_dict()], {"commutes": rep.commutator.residual <= args.tol,
                             "rotation_invariant": rep.offblock <= args.tol}


COMMANDS = {
    "moments": (cmd_moments, "closed-form moments vs quadrature"),
    "kernel": (cmd_kernel, "reproducing kernel K(x, y)"),
    "eigenvalues": (cmd_eigenvalues, "radial eigenvalues Omega(f, k)"),
    "matrix": (cmd_matrix, "truncated Toeplitz matrix of a symbol"),
    "commute": (cmd_commute, "commutator residual and off-block mass"),
    "zero-product": (cmd_zero_product, "residuals of T_f T_g and T_g T_f"),
    "equation": (cmd_equation, "residual of the shifted-eigenvalue equation"),
    "period-scan": (cmd_period_scan, "integer shifts n with Omega(f1, z) = Omega(f2, z+n)"),
    "mellin-check": (cmd_mellin_check, "Gamma-quotient and convolution identities"),
    "scaling-check": (cmd_scaling_check, "scaling law of the G transform under V_t"),
    "counterexample": (cmd_counterexample, "non-invariant symbol commuting with T_exp"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fockop", description="Toeplitz operators on generalized Fock spaces.")
    parser.add_argument("--version", action="version", version=f"fockop {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    common = _Parser(add_help=False)
    common.add_argument("--d", type=int, default=1, help="complex dimension")
    common.add_argument("--m", type=float, default=1.0, help="growth exponent m >= 1")
    common.add_argument("--alpha", type=float, default=1.0)
    common.add_argument("--s", type=float, default=0.0)
    common.add_argument("--degree", "-D", type=int, default=None,
                        help="truncation degree (default 10; 14 for counterexample)")
    common.add_argument("--n-r", type=int, default=DEFAULT_N_R)
    common.add_argument("--n-theta", type=int, default=DEFAULT_N_THETA)
    common.add_argument("--n-y", type=int, default=None)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None, help="output path (default stdout)")

    def add(name):
        return sub.add_parser(name, parents=[common], help=COMMANDS[name][1],
                              description=COMMANDS[name][1])

    sp = add("moments")
    sp.add_argument("--max-degree", type=int, default=None)
    sp = add("kernel")
    sp.add_argument("--x", required=True, help="comma-separated complex coordinates, e.g. 1+2i,0.5")
    sp.add_argument("--y", required=True)
    sp.add_argument("--regime", choices=("auto", "series", "asymptotic"), default="auto")
    sp = add("eigenvalues")
    sp.add_argument("--f", required=True, help="radial symbol")
    sp.add_argument("--max-degree", type=int, default=None)
    sp.add_argument("--method", choices=("auto", "closed_form", "quadrature"), default="auto")
    sp = add("matrix")
    sp.add_argument("--g", required=True)
    sp.add_argument("--all-entries", action="store_true", help="also list entries below --tol")
    sp = add("commute")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp = add("zero-product")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp = add("equation")
    sp.add_argument("--f1", required=True)
    sp.add_argument("--f2", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--k", default=None, help="multi-index, e.g. 0,1")
    sp.add_argument("--n", default=None)
    sp.add_argument("--max-l", type=int, default=None)
    sp = add("period-scan")
    sp.add_argument("--f1", required=True)
    sp.add_argument("--f2", required=True)
    sp.add_argument("--n-min", type=int, default=-5)
    sp.add_argument("--n-max", type=int, default=5)
    sp.add_argument("--zeta-min", type=float, default=5.0)
    sp.add_argument("--zeta-max", type=float, default=15.0)
    sp.add_argument("--zeta-count", type=int, default=11)
    sp = add("mellin-check")
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=2.0)
    sp.add_argument("--z", default="0.5,1,2,4")
    sp.add_argument("--conv-zeta", type=_complex, default=2.0)
    sp = add("scaling-check")
    sp.add_argument("--g", required=True)
    sp.add_argument("--t", default="0.5,2")
    sp.add_argument("--z", default="0,0.5,1.5+0.5i")
    sp = add("counterexample")
    sp.add_argument("--N", type=int, default=8)
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("output", "format")}
    for k, v in list(cfg.items()):
        if isinstance(v, complex):
            cfg[k] = [v.real, v.imag]
    cfg["space"] = {"d": args.d, "m": args.m, "alpha": args.alpha, "s": args.s}
    return dict(sorted(cfg.items()))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_clean(payload), indent=2, sort_keys=False) + "\n"
    rows = [_flatten(_clean(r)) for r in payload["results"]]
    fields: list[str] = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def run(argv=None) -> int:
    """Parse ``argv``, run one subcommand, write its output; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_INPUT
    if args.degree is None:
        args.degree = DEFAULT_DEGREE.get(args.command, 10)
    try:
        max_workers()
        _space(args)
        if args.degree < 0 or args.n_r < 1 or args.n_theta < 1 or (args.n_y is not None and args.n_y < 1):
            raise ParameterError("degree must be >= 0 and quadrature sizes positive")
        if not args.tol > 0:
            raise ParameterError("tol must be > 0")
        func = COMMANDS[args.command][0]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            results, diag = func(args)
        diag = dict(diag)
        diag["warnings"] = sorted({str(w.message) for w in caught})
    except (NumericalError, RangeError) as exc:
        print(f"fockop {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FockopError, ValueError) as exc:
        print(f"fockop {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = {"config": _config(args), "results": results, "diagnostics": diag}
    text = render(payload, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
