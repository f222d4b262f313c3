"""Command-line front end: ``cliffsheaf {eval,verify,hessian,dirac-check,trace-table}``.

Exit codes: 0 ok, 2 usage or input error, 3 identity audit failure,
4 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import audit, diracop, dsl
from .errors import CliffsheafError, NumericalBreakdown
from .finsler import RandersData, angular_fundamental_tensor
from .gamma import REP_IDS, build_representation
from .metric import DEFAULT_SIGNATURE, parse_signature
from .trace import display_value, gamma_word_matrix, numeric_trace, symbolic_trace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_AUDIT = 3
EXIT_BREAKDOWN = 4

DEFAULT_Y = (1.0, 0.0, 0.0, 0.0)
DEFAULT_A = (0.1, 0.0, 0.0, 0.0)


class _UsageError(Exception):
    pass


def _floats(n):
    def conv(text):
        parts = text.replace(",", " ").split()
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {n} numbers, got {text!r}") from None
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} numbers, got {len(vals)}")
        return tuple(vals)
    return conv


def _signature(text):
    try:
        return parse_signature(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _scalar_json(z):
    z = display_value(z)
    return z if isinstance(z, float) else [z.real, z.imag]


def _scalar_text(z):
    z = display_value(z)
    return repr(z) if isinstance(z, float) else str(z)


def _emit(args, payload: dict, text: str):
    print(json.dumps(payload) if args.json else text)


def _context(args) -> dsl.ContextFile:
    """Context from --context, then --y/--A/--signature overrides."""
    if args.context:
        try:
            cf = dsl.load_context(args.context)
        except (OSError, json.JSONDecodeError) as exc:
            raise _UsageError(f"cannot read context: {exc}") from None
    else:
        cf = dsl.load_context({
            "metric": {"signature": list(args.signature or DEFAULT_SIGNATURE)},
            "forms": {"A": list(args.A if args.A is not None else DEFAULT_A)},
            "y": list(args.y if args.y is not None else DEFAULT_Y),
        })
    if args.context and args.signature is not None:
        if tuple(cf.metric.signature) != tuple(args.signature):
            raise _UsageError(f"--signature {args.signature} contradicts the context metric "
                              f"{cf.metric.signature}")
    forms = dict(cf.forms)
    if args.context and args.A is not None:
        forms["A"] = tuple(args.A)
    y = tuple(args.y) if (args.context and args.y is not None) else cf.y
    return dsl.ContextFile(cf.metric, forms, y, cf.rep_id, cf.tolerances)


def _rep_id(args, cf: dsl.ContextFile | None = None) -> str:
    # explicit flag > CF_REP (already folded into cf) > context > dirac
    if args.rep:
        return args.rep
    if cf is not None:
        return cf.rep_id
    return os.environ.get(dsl.REP_ENV_VAR) or "dirac"


# subcommands -------------------------------------------------------------------


def cmd_eval(args) -> int:
    cf = _context(args)
    ctx = cf.to_eval_context(_rep_id(args, cf))
    expr = dsl.parse(args.expr)
    canon = dsl.print_canonical(expr)
    if isinstance(expr, dsl.TraceOf):
        rep = dsl.trace_report(expr, ctx)
        payload = rep.to_json()
        payload["value"] = _scalar_json(rep.numeric_value)
        _emit(args, payload, f"{canon} = {_scalar_text(rep.numeric_value)}"
                             f"  (symbolic residual {rep.residual:.2e})")
        return EXIT_OK
    val = dsl.eval_expr(expr, ctx)
    if isinstance(val, complex):
        _emit(args, {"expr": canon, "value": _scalar_json(val)}, f"{canon} = {_scalar_text(val)}")
    else:
        with np.printoptions(precision=6, suppress=True):
            _emit(args, {"expr": canon, "matrix": dsl.matrix_to_json(val)}, f"{canon} =\n{val}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cf = _context(args)
    ctx = cf.to_eval_context(_rep_id(args, cf))
    entries = audit.audit_identities(ctx)
    for e in entries:
        print(json.dumps(e.to_json()))
    ok = audit.audit_passed(entries)
    if not args.json:
        print()
        print(audit.summary_table(entries))
        n_fail = sum(1 for e in entries if e.expected_to_hold and not e.holds)
        n_doc = sum(1 for e in entries if not e.expected_to_hold)
        print(f"\n{len(entries)} identities, {n_fail} unexpected failures, "
              f"{n_doc} documented discrepancies")
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_hessian(args) -> int:
    cf = _context(args)
    if "A" not in cf.forms:
        raise _UsageError("hessian needs a one-form named 'A'")
    d = RandersData.create(cf.forms["A"], cf.metric)
    ft = angular_fundamental_tensor(d, cf.y, args.variant, _rep_id(args, cf), args.h)
    payload = ft.to_json()
    payload["variant"] = args.variant
    with np.printoptions(precision=10, suppress=True):
        text = (f"g_ij ({args.variant} angular Lagrangian) at y={list(cf.y)}:\n{ft.components}\n"
                f"det={ft.det:.6g} regular={ft.regular} g*(A,A)={ft.condition_value:.6g} "
                f"recommended={ft.recommended} step={ft.step:g} step_change={ft.step_change:.2e}")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_dirac_check(args) -> int:
    sig = args.signature or DEFAULT_SIGNATURE
    rep = build_representation(_rep_id(args), sig)
    A = args.A
    if args.kind != "dirac_mass" and A is None:
        A = (0.0, 0.0, 0.0, 0.0)
    op = diracop.FlatOperator(args.kind, args.m, A)
    w = diracop.PlaneWave(args.p, np.array([1.0, 0.5, -0.25j, 0.125]))
    report = diracop.convergence_study(op, w, rep, args.h_levels, args.base_extent)
    eta = np.array(sig, dtype=float)
    p = np.asarray(args.p)
    if abs(np.sum(eta * p * p)) > 1e-12:
        report.symbol_residual = diracop.mass_shell_symbol_residual(p, rep)
    payload = report.to_json()
    payload["kind"] = args.kind
    text = (f"{args.kind}: errors {['%.3e' % e for e in report.max_errors]} "
            f"orders {['%.3f' % o for o in report.orders]} "
            f"estimate {report.order_estimate:.3f}; symbol residual {report.symbol_residual}")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_trace_table(args) -> int:
    sig = args.signature or DEFAULT_SIGNATURE
    # "1 2 1 2", "1212" and "1,2,1,2" all name the same word
    chars = "".join(args.word).replace(",", "")
    if not chars or any(c not in "1234" for c in chars):
        raise _UsageError("word must be gamma indices in 1..4")
    idx = [int(c) for c in chars]
    sym = symbolic_trace(idx, sig)
    reps = [args.rep] if args.rep else list(REP_IDS)
    rows = {}
    for r in reps:
        rows[r] = _scalar_json(numeric_trace(gamma_word_matrix(build_representation(r, sig), idx)))
    payload = {"word": idx, "signature": list(sig), "symbolic": sym, "numeric": rows}
    lines = ["Tr(" + " ".join(f"g{i}" for i in idx) + f") with eta={list(sig)}",
             f"  symbolic  {sym!r}"]
    lines += [f"  {r:<9} {v!r}" for r, v in rows.items()]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


# parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--rep", choices=REP_IDS, default=None,
                        help=f"gamma representation (default: ${dsl.REP_ENV_VAR} or dirac)")
    common.add_argument("--signature", type=_signature, default=None,
                        help="metric signature, e.g. -+++ or -1,1,1,1")

    point = argparse.ArgumentParser(add_help=False)
    point.add_argument("--context", help="context JSON file")
    point.add_argument("--y", type=_floats(4), default=None, help="tangent vector, four reals")
    point.add_argument("--A", type=_floats(4), default=None, help="one-form A, four reals")

    ap = argparse.ArgumentParser(prog="cliffsheaf", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common, point], help="evaluate an expression")
    p.add_argument("expr")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", parents=[common, point], help="run the identity audit")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hessian", parents=[common, point],
                       help="fundamental tensor of the angular Lagrangian")
    p.add_argument("--variant", choices=("minus", "plus"), default="minus")
    p.add_argument("--h", type=float, default=None, help="difference step")
    p.set_defaults(func=cmd_hessian)

    p = sub.add_parser("dirac-check", parents=[common], help="lattice check of a flat operator")
    p.add_argument("--kind", choices=diracop.KINDS, default="dirac_mass")
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--p", type=_floats(4), default=(1.0, 1.0, 0.0, 1.0))
    p.add_argument("--A", type=_floats(4), default=None)
    p.add_argument("--h-levels", type=int, default=3)
    p.add_argument("--base-extent", type=int, default=diracop.BASE_EXTENT)
    p.set_defaults(func=cmd_dirac_check)

    p = sub.add_parser("trace-table", parents=[common], help="trace of a gamma index word")
    p.add_argument("word", nargs="+", help="indices in 1..4, e.g. 1 2 1 2 or 1212")
    p.set_defaults(func=cmd_trace_table)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NumericalBreakdown as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except dsl.ExprSyntaxError as exc:
        print(f"<expr>:{exc}", file=sys.stderr)
        return EXIT_USAGE
    except (_UsageError, CliffsheafError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
