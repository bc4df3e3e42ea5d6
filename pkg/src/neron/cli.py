"""Command-line entry point.

Every subcommand produces one report {"p", "command", "verdict", "witnesses",
"values"}; ``--json`` prints it as JSON, otherwise a short text form is
printed.  Commands taking a prime accept ``--sweep PMAX`` to run over all
primes 23 <= p <= PMAX instead.  Exit codes: 0 success, 1 a verification
failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable

from sympy import primerange

from .compgroup import component_group, vertex_difference
from .cx import CONVENTIONS, TransportError, propagate_cx, theorem76_alpha
from .divisors import analyse_divisor, load_divisor
from .dualgraph import GraphError, load_graph
from .ff import GF, FieldElement, is_probable_prime
from .immersion import closed_immersion
from .ssgraph import mass_check, supersingular_j_invariants
from .x0p import FCheck, build_x0p_model, verify_theorem82

__all__ = ["main", "run", "build_parser"]

PRIME_COMMANDS = ("ss", "cx", "cuspidal", "t76", "mass")
SWEEP_MAX = 10_000


class UsageError(Exception):
    pass


def _fmt(x: Any) -> str:
    """F_p values as signed representatives, anything else as text."""
    if isinstance(x, FieldElement) and x.is_rational():
        return str(x.signed())
    return str(x)


def _report(p, command: str, verdict: str, witnesses: dict | None = None, values: dict | None = None) -> dict:
    return {"p": p, "command": command, "verdict": verdict, "witnesses": witnesses or {}, "values": values or {}}


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise UsageError(f"not an integer: {text!r}") from None
    if not is_probable_prime(p):
        raise UsageError(f"{p} is not prime")
    return p


def _base(p: int, args) -> FieldElement | None:
    if args.base is None:
        return None
    try:
        return GF(p, 2).parse(args.base)
    except ValueError:
        raise UsageError(f"cannot parse base point {args.base!r}") from None


# -- per-prime commands ------------------------------------------------------


def cmd_ss(p: int, args) -> tuple[dict, list[str]]:
    locus = supersingular_j_invariants(p)
    mass = mass_check(locus)
    ok = mass * 12 == p - 1
    points = [{"j": str(pt.j), "e": pt.e, "rational": pt.rational} for pt in locus]
    rep = _report(p, "ss", "Pass" if ok else "Fail", {"mass": str(mass)}, {"points": points})
    return rep, [str(pt) for pt in locus]


def cmd_mass(p: int, args) -> tuple[dict, list[str]]:
    locus = supersingular_j_invariants(p)
    mass = mass_check(locus)
    ok = mass * 12 == p - 1
    rep = _report(p, "mass", "Pass" if ok else "Fail", {"expected": f"{p - 1}/12"}, {"mass": str(mass)})
    return rep, [f"p={p} mass={mass} {'ok' if ok else 'MISMATCH'}"]


def cmd_cx(p: int, args) -> tuple[dict, list[str]]:
    table = propagate_cx(p, base=_base(p, args), convention=args.convention)
    entries = [{"j": str(j), "e": table.e(j), "c": str(c)} for j, c in table.items()]
    try:
        alpha = theorem76_alpha(table)
    except TransportError:
        alpha = None
    rep = _report(
        p,
        "cx",
        "Pass" if alpha is not None else "Fail",
        {"base": str(table.base_point), "convention": table.convention},
        {"entries": entries, "alpha": str(alpha) if alpha is not None else None},
    )
    lines = [f"base={table.base_point} convention={table.convention}"]
    lines += [f"j={j} e={table.e(j)} c={_fmt(c)}" for j, c in table.items()]
    lines.append(f"alpha={_fmt(alpha)}" if alpha is not None else "alpha=not constant")
    return rep, lines


def cmd_t76(p: int, args) -> tuple[dict, list[str]]:
    table = propagate_cx(p, base=_base(p, args), convention=args.convention)
    try:
        alpha = theorem76_alpha(table)
    except TransportError as exc:
        rep = _report(p, "t76", "Fail", {"error": str(exc), "convention": table.convention})
        return rep, [f"p={p} not constant: {exc}"]
    rep = _report(p, "t76", "Pass", {"convention": table.convention}, {"alpha": str(alpha)})
    return rep, [f"p={p} alpha={_fmt(alpha)}"]


def _fcheck_dict(chk: FCheck) -> dict:
    return {
        "verdict": str(chk.verdict),
        "m": chk.m,
        "pair": [str(j) for j in chk.pair] if chk.pair else None,
        "a": chk.a,
        "factors": [[eid, str(f)] for eid, f in chk.factors],
        "cycle_scalar": str(chk.product) if chk.product is not None else None,
        "note": chk.note,
    }


def cmd_cuspidal(p: int, args) -> tuple[dict, list[str]]:
    pair = None
    if args.pair:
        F = GF(p, 2)
        try:
            pair = (F.parse(args.pair[0]), F.parse(args.pair[1]))
        except ValueError:
            raise UsageError(f"cannot parse pair {args.pair}") from None
    report = verify_theorem82(p, convention=args.convention, pair=pair, base=_base(p, args))
    wit: dict[str, Any] = {
        "n": report.witnesses["n"],
        "convention": report.convention,
        "components": {k: str(v) for k, v in report.verdicts.items()},
        "images": report.witnesses["images"],
        "supersingular_count": report.witnesses["supersingular_count"],
    }
    if "GH_distinct_powers" in report.witnesses:
        wit["GH_distinct_powers"] = report.witnesses["GH_distinct_powers"]
    lines = [f"p={p} n={report.witnesses['n']} convention={report.convention}"]
    lines += [f"{k}: {v}" for k, v in report.verdicts.items()]
    values: dict[str, Any] = {}
    f = report.witnesses.get("F")
    if isinstance(f, FCheck):
        values["F"] = _fcheck_dict(f)
        if f.pair:
            lines.append(f"cycle: X_inf x_{f.pair[0]} X_0 x_{f.pair[1]} X_inf")
            lines.append("factors: " + " ".join(f"{eid}={_fmt(v)}" for eid, v in f.factors))
            lines.append(f"cycle scalar: {_fmt(f.product)}")
    elif f is not None:
        wit["F"] = f
    lines.append(f"verdict: {report.overall}")
    return _report(p, "cuspidal", str(report.overall), wit, values), lines


PRIME_HANDLERS: dict[str, Callable] = {
    "ss": cmd_ss,
    "mass": cmd_mass,
    "cx": cmd_cx,
    "t76": cmd_t76,
    "cuspidal": cmd_cuspidal,
}

FAILING = {"Fail", "Inconclusive"}


# -- graph commands ----------------------------------------------------------


def _graph_arg(text: str, args):
    """A graph JSON file, or a prime p for the X0(p) model."""
    if text.isdigit():
        p = _prime(text)
        return build_x0p_model(p, convention=args.convention, base=_base(p, args)).graph
    path = Path(text)
    if not path.exists():
        raise UsageError(f"no such file: {text}")
    return load_graph(path)


def cmd_phi(args) -> tuple[dict, list[str]]:
    g = _graph_arg(args.graph, args)
    phi = component_group(g)
    factors = list(phi.invariant_factors)
    first = g.vertex_ids[0]
    classes = {f"{c} - {first}": list(phi.project(vertex_difference(c, first))) for c in g.vertex_ids[1:]}
    rep = _report(
        g.p,
        "phi",
        "Pass",
        {"vertices": len(g.vertices), "edges": len(g.edges)},
        {"invariant_factors": factors, "order": phi.order, "classes": classes},
    )
    lines = [f"invariant factors: {factors}", f"order: {phi.order}"]
    lines += [f"class of {k}: {v}" for k, v in classes.items()]
    return rep, lines


def cmd_immersion(args) -> tuple[dict, list[str]]:
    g = _graph_arg(args.graph, args)
    rep = closed_immersion(g)
    verdict = "ClosedImmersion" if rep.closed_immersion else "NotClosedImmersion"
    lines = [
        f"closed immersion: {str(rep.closed_immersion).lower()}",
        f"injectivity: {str(rep.injectivity_ok).lower()}"
        + (f" (fails at {rep.injectivity_counterexample})" if rep.injectivity_counterexample else ""),
        f"properness: {str(rep.properness_ok).lower()}"
        + (
            f" (fails at {rep.properness_counterexample[0]}, q={rep.properness_counterexample[1]})"
            if rep.properness_counterexample
            else ""
        ),
    ]
    for d in rep.edges:
        extra = f" failing_prime={d.failing_prime}" if d.failing_prime else ""
        lines.append(f"  {d.edge} e={d.e} bridge={str(d.bridge).lower()}{extra}")
    return _report(g.p, "immersion", verdict, {}, rep.to_dict()), lines


def cmd_divisor(args) -> tuple[dict, list[str]]:
    g = _graph_arg(args.graph, args)
    source = args.divisor_file or args.divisor
    if source is None:
        raise UsageError("a divisor file is required (--divisor)")
    if not Path(source).exists():
        raise UsageError(f"no such file: {source}")
    E = load_divisor(source, g.p)
    rep = analyse_divisor(g, E)
    values: dict[str, Any] = {"decision": str(rep.decision), "multidegree": rep.multidegree}
    lines = [f"decision: {rep.decision}"]
    if rep.a is not None:
        values["a"] = rep.a
        lines.append("a: " + " ".join(f"{k}={v}" for k, v in rep.a.items()))
    if rep.cycle is not None:
        values["cycle"] = rep.cycle.edge_ids
        values["cycle_scalar"] = str(rep.scalar)
        lines.append(f"cycle scalar: {_fmt(rep.scalar)} on {' '.join(rep.cycle.edge_ids)}")
    return _report(g.p, "divisor", str(rep.decision), {}, values), lines


GRAPH_HANDLERS: dict[str, Callable] = {"phi": cmd_phi, "immersion": cmd_immersion, "divisor": cmd_divisor}


# -- parsing and dispatch ----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--out", help="write the output to this file instead of stdout")
    common.add_argument("--convention", choices=CONVENTIONS, default="derived", help="glueing-table transport rule")
    common.add_argument("--base", help="base point of the glueing table (entry 1 there)")

    parser = argparse.ArgumentParser(prog="neron", description="Néron models, supersingular points and X0(p).")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ss": "supersingular j-invariants mod p with thickness",
        "mass": "mass formula check",
        "cx": "glueing table c(x) propagated along T_2",
        "t76": "constancy of the normalised glueing table",
        "cuspidal": "which components meet the cuspidal subgroup",
    }
    for name in PRIME_COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=helps[name])
        sp.add_argument("p", nargs="?", help="a prime (omit with --sweep)")
        sp.add_argument("--sweep", type=int, metavar="PMAX", help="run for all primes 23 <= p <= PMAX")
        if name == "cuspidal":
            sp.add_argument("--pair", nargs=2, metavar=("A", "B"), help="supersingular pair for the F cycle")
    sp = sub.add_parser("phi", parents=[common], help="component group of a dual graph (file or prime)")
    sp.add_argument("graph")
    sp = sub.add_parser("immersion", parents=[common], help="closed-immersion criteria for a dual graph")
    sp.add_argument("graph")
    sp = sub.add_parser("divisor", parents=[common], help="decide whether a divisor is trivial")
    sp.add_argument("graph")
    sp.add_argument("divisor_file", nargs="?", metavar="DIVISOR")
    sp.add_argument("--divisor", help="divisor JSON file")
    return parser


def _emit(args, reports: list[dict], lines: list[str], sweep: dict | None) -> str:
    if args.json:
        doc: Any = sweep if sweep is not None else reports[0]
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    return "\n".join(lines) + "\n"


def run(argv: list[str] | None = None) -> tuple[int, str]:
    """Parse ``argv`` and return (exit code, output text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (2 if exc.code else 0), ""
    return _dispatch(args)


def _dispatch(args) -> tuple[int, str]:
    try:
        if args.command in PRIME_HANDLERS:
            handler = PRIME_HANDLERS[args.command]
            if args.sweep is not None:
                if args.p is not None:
                    raise UsageError("give either p or --sweep, not both")
                if args.base is not None or getattr(args, "pair", None):
                    raise UsageError("--base and --pair apply to a single prime")
                if not 23 <= args.sweep <= SWEEP_MAX:
                    raise UsageError(f"--sweep needs 23 <= PMAX <= {SWEEP_MAX}")
                reports, lines = [], []
                for p in primerange(23, args.sweep + 1):
                    rep, text = handler(int(p), args)
                    reports.append(rep)
                    lines.extend(text if args.command in ("mass", "t76") else [f"p={p}: {rep['verdict']}"])
                failed = [r["p"] for r in reports if r["verdict"] in FAILING]
                lines.append(f"{len(reports)} primes, {len(failed)} failed" + (f": {failed}" if failed else ""))
                sweep = {
                    "command": args.command,
                    "sweep": args.sweep,
                    "primes": len(reports),
                    "failed": failed,
                    "reports": reports,
                }
                return (1 if failed else 0), _emit(args, reports, lines, sweep)
            if args.p is None:
                raise UsageError("a prime p is required")
            p = _prime(args.p)
            if p < 23 and args.command not in ("ss", "mass"):
                raise UsageError("X0(p) computations need p >= 23")
            rep, lines = handler(p, args)
            return (1 if rep["verdict"] in FAILING else 0), _emit(args, [rep], lines, None)
        rep, lines = GRAPH_HANDLERS[args.command](args)
        code = 1 if rep["verdict"] in FAILING or rep["verdict"] == "NotClosedImmersion" else 0
        return code, _emit(args, [rep], lines, None)
    except (TransportError, AssertionError, RuntimeError) as exc:
        return 1, f"verification failed: {exc}\n"
    except (UsageError, GraphError, ValueError, KeyError, json.JSONDecodeError) as exc:
        return 2, f"error: {exc}\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    code, text = _dispatch(args)
    if code == 2:
        sys.stderr.write(text)
    elif args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
