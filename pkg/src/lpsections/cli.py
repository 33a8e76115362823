"""Command-line front end.

Subcommands: volume, kernel, crossing, verify, clt, optimize.  Tables go
to standard output (or --output-path) as CSV (default) or JSON with the
fixed schemas from lpsections.schemas; diagnostics go to standard error
only.  All state is in flags (no environment variables), so a recorded
command line reproduces its output byte for byte.

Exit codes: 0 success, 1 an inequality/assertion suite failed,
2 usage error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import analysis
from .direction import Direction
from .hankel import NonConvergenceError, QuadSpec, gamma_kernel, section_volume_quadrature
from .montecarlo import McSpec, clt_experiment, estimate_section_volume
from .optimize import maximize_direction
from .schemas import SCHEMAS, validate_output

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3


class UsageError(ValueError):
    pass


def _parse_p(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    try:
        p = float(text)
    except ValueError:
        raise UsageError(f"cannot parse exponent {text!r}")
    if math.isinf(p) or not p >= 1.0:
        raise UsageError("exponent must be a float >= 1 or the literal 'inf'")
    return p


def _format_p(p: float) -> str:
    return "inf" if math.isinf(p) else repr(float(p))


def _parse_direction(args) -> tuple[Direction, str]:
    picked = [x for x in (args.a, args.diag, args.a2) if x is not None]
    if len(picked) != 1:
        raise UsageError("exactly one of --a, --diag, --a2 is required")
    if args.diag is not None:
        if args.diag < 1:
            raise UsageError("--diag needs n >= 1")
        return Direction.diagonal(args.diag), f"diag:{args.diag}"
    if args.a2 is not None:
        if args.a2 < 2:
            raise UsageError("--a2 needs n >= 2")
        return Direction.two_equal(args.a2), f"a2:{args.a2}"
    try:
        entries = [float(v) for v in args.a.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse --a {args.a!r}")
    d = Direction(entries)
    return d, "custom:" + ";".join(repr(v) for v in d.entries)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(args, subcommand: str, rows: list[dict]) -> None:
    payload = {"subcommand": subcommand, "rows": rows}
    validate_output(subcommand, payload)
    cols = list(SCHEMAS[subcommand])
    if args.format == "json":
        text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    else:
        lines = [",".join(cols)]
        for row in rows:
            lines.append(",".join(_cell(row[c]) for c in cols))
        text = "\n".join(lines) + "\n"
    if args.output_path:
        with open(args.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_volume(args) -> int:
    p = _parse_p(args.p)
    direction, a_spec = _parse_direction(args)
    if args.engine == "closed":
        nz = direction.nonzero()
        if len(nz) > 2:
            raise UsageError("closed engine needs a direction with at most 2 nonzero entries")
        if len(nz) == 1:
            value = 1.0
        elif nz[0] == nz[1]:
            value = analysis.a2_closed_form(p)
        else:
            value = analysis.a2_general(p, nz[0], nz[1])
        row = dict(engine="closed_form", value=value, err_bound=0.0, samples=None, seed=None)
    elif args.engine == "quad":
        res = section_volume_quadrature(p, direction, QuadSpec(tol_abs=args.tol))
        row = dict(engine=res.engine, value=res.value, err_bound=res.err_bound,
                   samples=None, seed=None)
    else:
        res = estimate_section_volume(p, direction, McSpec(samples=args.samples, seed=args.seed))
        row = dict(engine=res.engine, value=res.value, err_bound=res.err_bound,
                   samples=args.samples, seed=args.seed)
    row.update(p=_format_p(p), n=direction.n, a_spec=a_spec)
    _emit(args, "volume", [row])
    return EXIT_OK


def _cmd_kernel(args) -> int:
    p = _parse_p(args.p)
    if args.s_max <= 0 or args.step <= 0:
        raise UsageError("--s-max and --step must be positive")
    rows = []
    s = 0.0
    while s <= args.s_max + 1e-12:
        kv = gamma_kernel(p, s, inner_tol=max(args.tol, 1e-12))
        rows.append(dict(p=_format_p(p), s=float(s), value=kv.value, err_bound=kv.err_bound))
        s += args.step
    _emit(args, "kernel", rows)
    return EXIT_OK


def _cmd_crossing(args) -> int:
    p = _parse_p(args.p)
    report = analysis.crossing_scan(p, args.n_max, QuadSpec(tol_abs=args.tol))
    rows = []
    for e in report.per_n:
        rows.append(dict(
            p=_format_p(p), n=e.n, a_diag=e.a_diag.value, a_diag_err=e.a_diag.err_bound,
            a2=e.a_two, holds=e.holds, indeterminate=e.indeterminate,
            first_n_holds=report.first_n_holds,
            holds_for_all_tail=report.holds_for_all_tail,
        ))
    _emit(args, "crossing", rows)
    return EXIT_OK


def _cmd_verify(args) -> int:
    suites = ("lemma1", "lipschitz", "sufficient") if args.suite == "all" else (args.suite,)
    rows = []
    ok = True
    for suite in suites:
        if suite == "lemma1":
            ineqs = analysis.verify_lemma1()
        elif suite == "sufficient":
            ineqs = analysis.verify_sufficient()
        else:
            ineqs = analysis.verify_lipschitz(QuadSpec(tol_abs=args.tol))
        for q in ineqs:
            ok = ok and q.satisfied
            rows.append(dict(suite=suite, name=q.name, p=_format_p(q.p), n=q.n,
                             lhs=q.lhs, rhs=q.rhs, satisfied=q.satisfied, margin=q.margin))
    _emit(args, "verify", rows)
    return EXIT_OK if ok else EXIT_FAILED_CHECK


def _cmd_clt(args) -> int:
    p = _parse_p(args.p)
    try:
        n_list = [int(v) for v in args.n_list.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse --n-list {args.n_list!r}")
    rows_out = []
    for row in clt_experiment(p, n_list, McSpec(samples=args.samples, seed=args.seed)):
        rows_out.append(dict(p=_format_p(p), n=row.n, estimate=row.estimate,
                             std_err=row.std_err, c_p=row.c_p_target))
    _emit(args, "clt", rows_out)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    p = _parse_p(args.p)
    engine = {"quad": "quadrature", "mc": "montecarlo"}[args.engine]
    mc = McSpec(samples=args.samples, seed=args.seed) if engine == "montecarlo" else None
    report = maximize_direction(p, args.n, engine=engine, budget=args.budget,
                                tol=args.tol, seed=args.seed, mc=mc)
    rows = []
    base = dict(p=_format_p(p), n=args.n, engine=engine, converged=report.converged)
    for it, val in report.trace:
        rows.append(dict(base, record="trace", iteration=it, value=val,
                         err_bound=None, coords=None))
    rows.append(dict(base, record="best", iteration=report.iterations,
                     value=report.best_value.value,
                     err_bound=report.best_value.err_bound,
                     coords=";".join(repr(v) for v in report.best.entries)))
    _emit(args, "optimize", rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="lpsec",
        description="Section volumes of complex l_p balls: engines, scans, and checks.",
    )
    sub = top.add_subparsers(dest="subcommand", required=True)

    def common(sp, tol_default=1e-8):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output-path", default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=tol_default)
        sp.add_argument("--samples", type=int, default=10 ** 6)

    sp = sub.add_parser("volume", help="one section volume")
    sp.add_argument("--p", required=True)
    sp.add_argument("--a", default=None, help="comma-separated coordinates")
    sp.add_argument("--diag", type=int, default=None, help="main diagonal of dimension n")
    sp.add_argument("--a2", type=int, default=None, help="two equal coordinates padded to n")
    sp.add_argument("--engine", choices=("quad", "mc", "closed"), required=True)
    common(sp)
    sp.set_defaults(fn=_cmd_volume)

    sp = sub.add_parser("kernel", help="kernel table on an s grid")
    sp.add_argument("--p", required=True)
    sp.add_argument("--s-max", type=float, required=True)
    sp.add_argument("--step", type=float, required=True)
    common(sp)
    sp.set_defaults(fn=_cmd_kernel)

    sp = sub.add_parser("crossing", help="diagonal-vs-two-coordinate crossing scan")
    sp.add_argument("--p", required=True)
    sp.add_argument("--n-max", type=int, required=True)
    common(sp, tol_default=1e-5)
    sp.set_defaults(fn=_cmd_crossing)

    sp = sub.add_parser("verify", help="inequality suites; exit 1 on any violation "
                        "(--tol sets the quadrature budget of the lipschitz rows)")
    sp.add_argument("--suite", choices=("lemma1", "lipschitz", "sufficient", "all"),
                    default="all")
    common(sp, tol_default=1e-4)
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("clt", help="second-negative-moment scaling experiment")
    sp.add_argument("--p", required=True)
    sp.add_argument("--n-list", required=True, help="comma-separated dimensions")
    common(sp)
    sp.set_defaults(fn=_cmd_clt)

    sp = sub.add_parser("optimize", help="maximize the volume over directions")
    sp.add_argument("--p", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--engine", choices=("quad", "mc"), required=True)
    sp.add_argument("--budget", type=int, default=240)
    common(sp, tol_default=1e-2)
    sp.set_defaults(fn=_cmd_optimize)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


# entry point under its interface name
run = main


if __name__ == "__main__":
    sys.exit(main())
