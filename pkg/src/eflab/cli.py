"""Command-line driver: zero management, explicit-formula checks, per-place
term reports, conductor spectra; deterministic CSV on stdout or --out.

Exit codes: 0 success, 1 input/parse/certification errors, 2 tolerance or
spectrum breaches.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import weil
from .errors import (AdmissibilityError, AmbiguityError, CertificationError,
                     ConvergenceError, DomainError, ParseError, PoleError)
from .padic import commutation_check, cuspidal_spectrum
from .special import Place, is_prime
from .testfn import parse_test_function
from .zeta import ZeroTable, find_zeros, read_zero_table, zero_table_to_string

_INPUT_ERRORS = (ParseError, DomainError, AdmissibilityError, CertificationError,
                 PoleError, AmbiguityError, ConvergenceError, OSError, ValueError)


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_zeros(path: str) -> ZeroTable:
    return read_zero_table(path)


def _cmd_zeros(args) -> int:
    if args.action == "find":
        table = find_zeros(args.t_max)
        _emit(zero_table_to_string(table), args.out)
        print(f"count={len(table)} accuracy={table.accuracy:.3g} t_max={table.t_max:g}",
              file=sys.stderr)
        return 0
    table = _load_zeros(args.infile)
    print(f"count={len(table)} accuracy={table.accuracy:.3g} t_max={table.t_max:g}",
          file=sys.stderr)
    if args.action == "export" or args.out:
        _emit(zero_table_to_string(table), args.out)
    return 0


def _cmd_ef(args) -> int:
    zeros = _load_zeros(args.zeros)
    if args.action == "check":
        g = parse_test_function(args.testfn)
        rep = weil.explicit_formula_check(g, zeros)
        _emit(weil.rows_to_csv(weil.ef_report_rows(rep, tol=args.tol)), args.out)
        return 0 if abs(rep.residual) <= args.tol else 2
    if args.action == "vonmangoldt":
        rep = weil.vonmangoldt_check(args.X, zeros)
        _emit(weil.rows_to_csv(weil.ef_report_rows(rep, tol=args.tol)), args.out)
        return 0 if abs(rep.residual) <= args.tol else 2
    # positivity
    g = parse_test_function(args.testfn)
    pq, zq = weil.positivity_q(g, zeros)
    rows = [("prime_side_q", "autocorrelation", pq, 0.0, -1e-6, ""),
            ("zero_side_q", "mellin", zq, 0.0, None, "")]
    status = "ok" if pq >= -1e-6 else "fail"
    rows[0] = ("prime_side_q", "autocorrelation", pq, 0.0, -1e-6, status)
    _emit(weil.rows_to_csv(rows), args.out)
    return 0 if pq >= -1e-6 else 2


def _cmd_weil(args) -> int:
    g = parse_test_function(args.testfn)
    if args.place == "r":
        place = Place.real()
        known = weil.W_R_FORMS
    else:
        p = int(args.place)
        if not is_prime(p):
            raise DomainError(f"place must be 'r' or a prime, got {args.place}")
        place = Place.prime(p)
        known = weil.PRIME_METHODS
    if args.form == "all":
        rep = weil.place_term_report(g, place)
        _emit(weil.rows_to_csv(weil.place_report_rows(rep, tol=args.tol)), args.out)
        if args.tol is not None and rep.spread > args.tol:
            return 2
        return 0
    if args.form not in known:
        raise DomainError(f"form {args.form!r} is not defined at place {place}; "
                          f"expected one of {known} or 'all'")
    if place.is_real:
        val = weil.w_r(g, args.form)
    elif args.form == "direct":
        val = weil.w_p(g, place.p)
    elif args.form == "contour":
        val = weil.w_p_contour(g, place.p)
    else:
        from .padic import haran_term
        val = haran_term(g, place)
    rows = [(f"w_{place.label}", args.form, val.real, val.imag, None, "ok")]
    _emit(weil.rows_to_csv(rows), args.out)
    return 0


def _cmd_conductor(args) -> int:
    p, n = args.p, args.n
    if not is_prime(p):
        raise DomainError(f"--p must be prime, got {p}")
    if p ** n > 2048:
        raise DomainError(f"p^n = {p ** n} exceeds the desk-scale cap 2048")
    ev = cuspidal_spectrum(p, n)
    logp = math.log(p)
    rows = []
    worst = 0.0
    for i, lam in enumerate(ev):
        ratio = lam / logp
        defect = abs(ratio - round(ratio))
        worst = max(worst, defect)
        rows.append((f"eigenvalue_{i:03d}", "eigensolve", float(lam), 0.0, None, ""))
        rows.append((f"ratio_{i:03d}", "eigenvalue/log(p)", float(ratio), 0.0,
                     1e-8, "ok" if defect <= 1e-8 else "fail"))
    if args.check_inversion:
        d = commutation_check(p, n)
        rows.append(("commutation_defect", "inversion", float(d), 0.0, 1e-9,
                     "ok" if d <= 1e-9 else "fail"))
    _emit(weil.rows_to_csv(rows), args.out)
    return 0 if worst <= 1e-8 else 2


def build_parser() -> _Parser:
    ap = _Parser(prog="eflab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    zp = sub.add_parser("zeros", help="find, import, or export zero tables")
    zsub = zp.add_subparsers(dest="action", required=True)
    zf = zsub.add_parser("find")
    zf.add_argument("--t-max", dest="t_max", type=float, required=True)
    zf.add_argument("--out", default=None)
    zf.set_defaults(func=_cmd_zeros)
    for name in ("import", "export"):
        zi = zsub.add_parser(name)
        zi.add_argument("--in", dest="infile", required=True)
        zi.add_argument("--out", default=None, required=(name == "export"))
        zi.set_defaults(func=_cmd_zeros)

    ep = sub.add_parser("ef", help="explicit-formula balance checks")
    esub = ep.add_subparsers(dest="action", required=True)
    ec = esub.add_parser("check")
    ec.add_argument("--testfn", required=True)
    ec.add_argument("--zeros", required=True)
    ec.add_argument("--tol", type=float, default=1e-4)
    ec.add_argument("--out", default=None)
    ec.set_defaults(func=_cmd_ef)
    ev = esub.add_parser("vonmangoldt")
    ev.add_argument("--X", type=float, required=True)
    ev.add_argument("--zeros", required=True)
    ev.add_argument("--tol", type=float, default=0.1)
    ev.add_argument("--out", default=None)
    ev.set_defaults(func=_cmd_ef)
    eq = esub.add_parser("positivity")
    eq.add_argument("--testfn", required=True)
    eq.add_argument("--zeros", required=True)
    eq.add_argument("--out", default=None)
    eq.set_defaults(func=_cmd_ef)

    wp = sub.add_parser("weil", help="per-place local terms by each method")
    wp.add_argument("--place", required=True)
    wp.add_argument("--form", default="all")
    wp.add_argument("--testfn", required=True)
    wp.add_argument("--tol", type=float, default=None)
    wp.add_argument("--out", default=None)
    wp.set_defaults(func=_cmd_weil)

    cp = sub.add_parser("conductor", help="cuspidal spectrum of the conductor operator")
    cp.add_argument("--p", type=int, required=True)
    cp.add_argument("--n", type=int, required=True)
    cp.add_argument("--check-inversion", action="store_true", dest="check_inversion")
    cp.add_argument("--out", default=None)
    cp.set_defaults(func=_cmd_conductor)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
