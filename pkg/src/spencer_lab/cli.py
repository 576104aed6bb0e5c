"""Command-line front end: ``spencer-lab <group> <command> INPUT... [options]``.

Exit codes: 0 success, 2 unreadable or malformed input, 3 a mathematical
precondition failed, 4 internal error.
"""
from __future__ import annotations

import argparse
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from . import io as sio
from .exactla import DimensionMismatch, to_rational
from .multilinear import DegreeError, multi_indices
from .oracle import compare_with_tower
from .pfaffian import check_pfaffian, kernel_distribution, pullback, to_connection, to_form
from .polynomial import VectorPolynomial
from .relconn import (
    ConstantRelativeConnection,
    PreconditionError,
    curvature,
    finite_type_analysis,
    formal_integrability_report,
    partial_prolongation,
    pr_cokernel,
    prolong_tower,
    prolongation_space,
    reduced_curvature_dim,
    symbol,
    tower_connections,
    validate_compatible,
)
from .tableau import (
    InvalidTower,
    Tableau,
    Tower,
    acyclicity_report,
    prolongations,
    spencer_cohomology,
    stabilization_order,
    validate_tower,
)

EXIT_OK, EXIT_SCHEMA, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def _positive(name: str, value: int, minimum: int = 1) -> int:
    if value < minimum:
        raise UsageError(f"--{name} must be >= {minimum}")
    return value


def _expect(obj, kind, what: str):
    if not isinstance(obj, kind):
        raise sio.SchemaError(f"expected a {what} file")
    return obj


# ---------------------------------------------------------------------------
# tableau commands


def tableau_prolong(obj, args) -> dict:
    t = _expect(obj, Tableau, "tableau")
    levels = _positive("levels", args.levels)
    return {"dim": t.dim, "dims": [g.dim for g in prolongations(t, levels)]}


def tableau_cohomology(obj, args) -> dict:
    t = _expect(obj, Tableau, "tableau")
    table = spencer_cohomology(t, _positive("pmax", args.pmax, 0))
    rows = [{"sym": s, "ext": j, "kernel": e.kernel, "image": e.image, "dim": e.dim,
             "terminal": e.terminal} for s, j, e in table.as_rows()]
    return {"entries": rows, "interior_vanishes": table.interior_vanishes()}


def tableau_acyclicity(obj, args) -> dict:
    t = _expect(obj, Tableau, "tableau")
    rep = acyclicity_report(t, _positive("r", args.r, 0), _positive("pmax", args.pmax, 0))
    rep["verdicts"] = [{"p": p, "j": j, "vanishes": v} for (p, j), v in sorted(rep["verdicts"].items())]
    return rep


def tableau_stabilize(obj, args) -> dict:
    t = _expect(obj, Tableau, "tableau")
    bound = _positive("bound", args.bound)
    p = stabilization_order(t, bound, window=_positive("window", args.window, 0))
    return {"bound": bound, "window": args.window, "stabilization_order": p, "found": p is not None}


def tableau_tower(obj, args) -> dict:
    if isinstance(obj, Tableau):
        obj = Tower((obj,))
    return validate_tower(_expect(obj, Tower, "tower"))


# ---------------------------------------------------------------------------
# connection commands


def _levels(rep) -> list[dict]:
    return [vars(lv).copy() for lv in rep.levels]


def conn_analyze(obj, args) -> dict:
    c = _expect(obj, ConstantRelativeConnection, "connection")
    N = _positive("max-order", args.max_order)
    rep = prolong_tower(c, N, strict=False)
    integ = formal_integrability_report(c, N)
    cmp = compare_with_tower(c, _positive("oracle-degree", args.oracle_degree))
    if rep.failed_at is not None:
        verdict = "obstructed"
    elif integ["certified"] and not cmp["disagreements"]:
        verdict = "certified"
    else:
        verdict = "inconclusive"
    return {
        "tower": {"ranks": rep.ranks, "levels": _levels(rep), "failed_at": rep.failed_at,
                  "cokernel_dim": rep.cokernel_dim},
        "integrability": integ,
        "finite_type": finite_type_analysis(c, N),
        "oracle": cmp,
        "verdict": verdict,
    }


def conn_curvature(obj, args) -> dict:
    c = _expect(obj, ConstantRelativeConnection, "connection")
    P = prolongation_space(c)
    return {
        "symbol_dim": symbol(c).dim,
        "J1D_dim": partial_prolongation(c).dim,
        "curvature_rank": curvature(c).rank(),
        "P_dim": P.dim,
        "pr_cokernel": pr_cokernel(c, P),
        "reduced_curvature_dim": reduced_curvature_dim(c),
    }


def conn_finite_type(obj, args) -> dict:
    c = _expect(obj, ConstantRelativeConnection, "connection")
    rep = finite_type_analysis(c, _positive("bound", args.bound))
    rep["found"] = rep["order"] is not None
    return rep


def conn_compatible(obj, args) -> dict:
    c = _expect(obj, ConstantRelativeConnection, "connection")
    if args.upper:
        upper = _expect(sio.load(args.upper), ConstantRelativeConnection, "connection")
        return {"pairs": [dict(validate_compatible(upper, c), k=0)]}
    conns = tower_connections(c, _positive("levels", args.levels))
    pairs = [dict(validate_compatible(up, low), k=k) for k, (low, up) in enumerate(zip(conns, conns[1:]))]
    return {"pairs": pairs, "all_compatible": all(p["compat1"] and p["compat2"] for p in pairs)}


def conn_oracle(obj, args) -> dict:
    c = _expect(obj, ConstantRelativeConnection, "connection")
    return compare_with_tower(c, _positive("degree", args.degree))


# ---------------------------------------------------------------------------
# pfaffian commands


def _form_doc(f) -> dict:
    return {"n": f.n, "a": f.a, "b": f.b, "l": f.l.flat(), "C": [m.flat() for m in f.C]}


def pfaffian_to_form(obj, args) -> dict:
    return {"form": _form_doc(to_form(_expect(obj, ConstantRelativeConnection, "connection")))}


def _fiber_point(text, a: int) -> list[Fraction]:
    if text is None:
        return [Fraction(0)] * a
    try:
        e = [to_rational(x) for x in text.split(",")]
    except (ValueError, ZeroDivisionError, TypeError):
        raise UsageError(f"--at-fiber: cannot parse {text!r} as a rational vector")
    if len(e) != a:
        raise DimensionMismatch(f"--at-fiber needs {a} entries, got {len(e)}")
    return e


def pfaffian_kernel(obj, args) -> dict:
    f = to_form(_expect(obj, ConstantRelativeConnection, "connection"))
    e = _fiber_point(args.at_fiber, f.a)
    H = kernel_distribution(f, e)
    return {"at_fiber": e, "dim": H.dim, "basis": [list(v) for v in H.vectors()]}


def pfaffian_check(obj, args) -> dict:
    f = to_form(_expect(obj, ConstantRelativeConnection, "connection"))
    return check_pfaffian(f, _fiber_point(args.at_fiber, f.a))


def pfaffian_roundtrip(obj, args) -> dict:
    c = _expect(obj, ConstantRelativeConnection, "connection")
    f = to_form(c)
    # pull back along every monomial section x^α e_r with |α| <= 2
    sections = []
    for d in range(3):
        for alpha in multi_indices(c.n, d):
            for r in range(c.F_rank):
                v = [0] * c.F_rank
                v[r] = 1
                sections.append(VectorPolynomial.from_dict(c.n, c.F_rank, {alpha: v}))
    ok = all(pullback(f, s) == c.apply(s) for s in sections)
    return {"identity": to_connection(f) == c, "pullback_matches": ok, "sections_checked": len(sections)}


COMMANDS = {
    ("tableau", "prolong"): tableau_prolong,
    ("tableau", "cohomology"): tableau_cohomology,
    ("tableau", "acyclicity"): tableau_acyclicity,
    ("tableau", "stabilize"): tableau_stabilize,
    ("tableau", "tower"): tableau_tower,
    ("conn", "analyze"): conn_analyze,
    ("conn", "curvature"): conn_curvature,
    ("conn", "finite-type"): conn_finite_type,
    ("conn", "compatible"): conn_compatible,
    ("conn", "oracle"): conn_oracle,
    ("pfaffian", "to-form"): pfaffian_to_form,
    ("pfaffian", "kernel"): pfaffian_kernel,
    ("pfaffian", "check"): pfaffian_check,
    ("pfaffian", "roundtrip"): pfaffian_roundtrip,
}


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="+", metavar="INPUT", help="input JSON file(s)")
    common.add_argument("--format", choices=["json", "table"], default="json")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="spencer-lab", description="Exact Spencer-theory computations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    tab = groups.add_parser("tableau", help="tableau computations").add_subparsers(dest="command", required=True)
    p = tab.add_parser("prolong", parents=[common])
    p.add_argument("--levels", type=int, default=3)
    p = tab.add_parser("cohomology", parents=[common])
    p.add_argument("--pmax", type=int, default=2)
    p = tab.add_parser("acyclicity", parents=[common])
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--pmax", type=int, default=2)
    p = tab.add_parser("stabilize", parents=[common])
    p.add_argument("--bound", type=int, default=4)
    p.add_argument("--window", type=int, default=2)
    tab.add_parser("tower", parents=[common])

    con = groups.add_parser("conn", help="relative connections").add_subparsers(dest="command", required=True)
    p = con.add_parser("analyze", parents=[common])
    p.add_argument("--max-order", type=int, default=3)
    p.add_argument("--oracle-degree", type=int, default=3)
    con.add_parser("curvature", parents=[common])
    p = con.add_parser("finite-type", parents=[common])
    p.add_argument("--bound", type=int, default=6)
    p = con.add_parser("compatible", parents=[common])
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--upper", help="connection file for the upper operator")
    p = con.add_parser("oracle", parents=[common])
    p.add_argument("--degree", type=int, default=3)

    pf = groups.add_parser("pfaffian", help="linear Pfaffian forms").add_subparsers(dest="command", required=True)
    pf.add_parser("to-form", parents=[common])
    p = pf.add_parser("kernel", parents=[common])
    p.add_argument("--at-fiber", help="comma-separated rationals, e.g. 1,0,1/2")
    p = pf.add_parser("check", parents=[common])
    p.add_argument("--at-fiber")
    pf.add_parser("roundtrip", parents=[common])
    return parser


def _request(args) -> dict:
    skip = {"inputs", "group", "command", "format", "out"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {"group": args.group, "command": args.command, "inputs": list(args.inputs),
            "format": args.format, "params": params}


def _run_one(fn, path, args):
    """Returns (exit code, result or error payload)."""
    try:
        obj = sio.load(path)
        return EXIT_OK, fn(obj, args)
    except FileNotFoundError as exc:
        return EXIT_SCHEMA, {"error": "unreadable input", "detail": str(exc)}
    except (sio.SchemaError, UsageError) as exc:
        return EXIT_SCHEMA, {"error": "schema", "location": getattr(exc, "location", None),
                             "detail": getattr(exc, "message", str(exc))}
    except (PreconditionError, DimensionMismatch, InvalidTower, DegreeError) as exc:
        return EXIT_PRECONDITION, {"error": "precondition", "kind": type(exc).__name__, "detail": str(exc)}
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        return EXIT_INTERNAL, {"error": "internal", "kind": type(exc).__name__, "detail": str(exc),
                               "trace": traceback.format_exc(limit=3)}


def thread_cap() -> int:
    raw = os.environ.get("SPENCER_LAB_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run(args) -> tuple[int, dict]:
    fn = COMMANDS[(args.group, args.command)]
    workers = min(thread_cap(), len(args.inputs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda p: _run_one(fn, p, args), args.inputs))
    else:
        outcomes = [_run_one(fn, p, args) for p in args.inputs]
    results = [{"input": p, "ok": code == 0, "result": res if code == 0 else None,
                "error": None if code == 0 else res}
               for p, (code, res) in zip(args.inputs, outcomes)]
    code = next((c for c, _ in outcomes if c), EXIT_OK)
    return code, sio.make_report(_request(args), results, __version__)


def _cell(v) -> str:
    if v is None:
        return "null"
    return str(v).lower() if isinstance(v, bool) else str(v)


def _table(report: dict) -> str:
    lines = [f"spencer-lab {report['version']}  {report['request']['group']} {report['request']['command']}"]

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else k, v[k])
        elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
            for i, x in enumerate(v):
                walk(f"{prefix}[{i}]", x)
        else:
            val = ", ".join(map(_cell, v)) if isinstance(v, list) else _cell(v)
            lines.append(f"  {prefix:<40} {val}")

    for r in report["results"]:
        lines.append(f"[{r['input']}] {'ok' if r['ok'] else 'FAILED'}")
        walk("", r["result"] if r["ok"] else r["error"])
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, report = run(args)
    text = sio.dumps(report) if args.format == "json" else _table(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for r in report["results"]:
        if not r["ok"]:
            err = r["error"]
            where = f" at {err['location']}" if err.get("location") else ""
            print(f"spencer-lab: {r['input']}: {err['error']} error{where}: {err['detail']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
