"""``slq`` command-line front end.

Exit codes: 0 on success (any verdict, including "violated"), 1 on domain,
I/O, parse or numerical errors, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .bracket import bracket_values
from .coeffs import load_problem, validate_local_integrability
from .errors import SLQError
from .integrator import QuasiState, Tolerances, fundamental_pair, solve_system
from .quadform import TestFunction, form_value, norm_squared
from .sacheck import (
    DEFAULT_PROBE_WINDOWS,
    IntervalSequence,
    check_clark,
    check_hartman_rellich,
    check_theorem_b,
    check_theorem_c,
    kernel_probe,
    rho_transform,
)
from .spectral import eigenvalues_on_interval

FMT = "{:.12g}"

_DIRICHLET_NOTE = (
    "Eigenvalues are for the Dirichlet restriction u(alpha) = u(beta) = 0 only; the minimal "
    "operator's conditions on u and u[1] together admit no eigenfunctions in general."
)


def _num(v):
    return FMT.format(v)


def _table(header, rows, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, str) else _num(r) for r in row])
        return buf.getvalue()
    lines = [" ".join(header)]
    lines += [" ".join(r if isinstance(r, str) else _num(r) for r in row) for row in rows]
    return "\n".join(lines) + "\n"


def _report(rep, fmt):
    return rep.to_csv(FMT) if fmt == "csv" else rep.to_text(FMT)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", required=True, type=Path, help="problem file (.slq)")
    common.add_argument("--span", nargs=2, type=float, metavar=("A", "B"),
                        help="interval; defaults to the problem's domain")
    common.add_argument("--lambda", dest="lam", type=float, default=None, help="spectral parameter")
    common.add_argument("--tol-rel", type=float, default=1e-10)
    common.add_argument("--tol-abs", type=float, default=1e-12)
    common.add_argument("--format", choices=("text", "csv"), default="text")
    common.add_argument("--output", type=Path, default=None, help="write here instead of stdout")

    parser = argparse.ArgumentParser(prog="slq", description="Sturm-Liouville operators with distributional coefficients")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check local integrability of the coefficients on the span")

    p = sub.add_parser("solve", parents=[common], help="integrate l[u] = lambda u (+ f) across the span")
    p.add_argument("--init", nargs=2, type=float, default=(0.0, 1.0), metavar=("U", "U1"),
                   help="(u, u[1]) at the start of the span")
    p.add_argument("--forcing", default=None, help="expression f(x) for l[u] = lambda u + f")

    p = sub.add_parser("eig", parents=[common], help="Dirichlet eigenvalues on the span", epilog=_DIRICHLET_NOTE)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--scan", nargs=3, type=float, metavar=("LO", "HI", "STEP"), default=None,
                   help="lambda scan; default [-50, 50 count^2/L^2] with 400 count steps")

    p = sub.add_parser("bracket", parents=[common], help="bracket of the fundamental pair theta, phi")
    p.add_argument("--points", nargs="+", type=float, default=None, help="evaluation points t")

    p = sub.add_parser("form", parents=[common], help="quadratic form of a test function")
    p.add_argument("--u", required=True, help="expression for u")
    p.add_argument("--du", required=True, help="expression for u'")
    p.add_argument("--u-im", default=None)
    p.add_argument("--du-im", default=None)
    p.add_argument("--support", nargs=2, type=float, required=True, metavar=("A", "B"))

    p = sub.add_parser("check", parents=[common], help="audit a self-adjointness hypothesis")
    p.add_argument("--criterion", choices=("hr", "clark", "thmB", "thmC"), required=True)
    p.add_argument("--intervals", type=Path, default=None, help="CSV n,a,b (thmC)")

    p = sub.add_parser("probe", parents=[common], help="kernel probe for square-integrable solutions")
    p.add_argument("--windows", nargs="+", type=float, default=list(DEFAULT_PROBE_WINDOWS),
                   help="radii in rho units")

    p = sub.add_parser("rho", parents=[common], help="rho(x) = int_0^x p^(-1/2)")
    p.add_argument("--points", nargs="+", type=float, default=None)
    return parser


def _tol(args):
    return Tolerances(args.tol_rel, args.tol_abs)


def _cmd_validate(args, prob, span):
    return _report(validate_local_integrability(prob.coeffs, span), args.format)


def _cmd_solve(args, prob, span):
    lam = 0.0 if args.lam is None else args.lam
    traj = solve_system(prob.coeffs, lam, span, QuasiState(span[0], *args.init), args.forcing, _tol(args))
    if args.format == "csv":
        return traj.to_csv(fmt=FMT)
    rows = [(x, y[0].real, y[0].imag, y[1].real, y[1].imag) for x, y in zip(traj.xs, traj.ys)]
    return _table(["x", "re_u", "im_u", "re_u1", "im_u1"], rows, "text")


def _cmd_eig(args, prob, span):
    res = eigenvalues_on_interval(prob.coeffs, span, args.count, args.scan, _tol(args))
    return res.to_csv(FMT) if args.format == "csv" else res.to_text(FMT)


def _cmd_bracket(args, prob, span):
    lam = 0.0 if args.lam is None else args.lam
    theta, phi = fundamental_pair(prob.coeffs, lam, span, _tol(args))
    pts = args.points if args.points else [span[0], 0.5 * (span[0] + span[1]), span[1]]
    vals = bracket_values(theta, phi, np.array(pts, dtype=float))
    rows = [(t, v.real, v.imag) for t, v in zip(pts, vals)]
    return _table(["t", "re_bracket", "im_bracket"], rows, args.format)


def _cmd_form(args, prob, span):
    tf = TestFunction(args.u, args.du, tuple(args.support), args.u_im, args.du_im)
    val = form_value(prob.coeffs, tf)
    nrm = norm_squared(tf)
    return _table(["form", "norm_squared", "quotient"], [(val, nrm, val / nrm)], args.format)


def _cmd_check(args, prob, span):
    c = prob.coeffs
    if args.criterion == "hr":
        rep = check_hartman_rellich(c)
    elif args.criterion == "clark":
        rep = check_clark(c)
    elif args.criterion == "thmB":
        rep = check_theorem_b(c)
    else:
        if args.intervals is None:
            raise _Usage("--criterion thmC needs --intervals")
        rep = check_theorem_c(c, IntervalSequence.from_csv(args.intervals.read_text(encoding="utf-8")))
    return _report(rep, args.format)


def _cmd_probe(args, prob, span):
    return _report(kernel_probe(prob.coeffs, args.windows, _tol(args), args.lam), args.format)


def _cmd_rho(args, prob, span):
    rm = rho_transform(prob.coeffs, span, _tol(args))
    pts = args.points if args.points else list(np.linspace(span[0], span[1], 11))
    rows = [(x, rm(x)) for x in pts]
    return _table(["x", "rho"], rows, args.format)


_COMMANDS = {
    "validate": _cmd_validate, "solve": _cmd_solve, "eig": _cmd_eig, "bracket": _cmd_bracket,
    "form": _cmd_form, "check": _cmd_check, "probe": _cmd_probe, "rho": _cmd_rho,
}


class _Usage(Exception):
    pass


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        prob = load_problem(args.problem)
        span = tuple(args.span) if args.span else prob.domain
        text = _COMMANDS[args.command](args, prob, span)
        if args.output is not None:
            args.output.write_text(text, encoding="utf-8")
        else:
            stdout.write(text)
    except _Usage as exc:
        parser.print_usage(stderr)
        print(f"slq: error: {exc}", file=stderr)
        return 2
    except (SLQError, ValueError, OSError) as exc:
        print(f"slq: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
