"""Command-line front end emitting JSON reports."""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Callable

from . import io
from .classify import c_fixing_scan, classify
from .errors import (
    ArityMismatch,
    EmptyRelation,
    LengthMismatch,
    ParseError,
    PCSPError,
    PromiseViolation,
    SchemaError,
    WeightOutOfRange,
)
from .polymorphisms import (
    FamilyKind,
    brute_force_closure,
    check_weak_polymorphism,
    closure_join,
    closure_meet,
    closure_parity,
    closure_symmetric,
    default_enum_arity,
    enumerate_weak_polymorphisms,
    make_named,
)
from .reductions import (
    apply_ppp_gadget,
    check_ppp_bullets,
    galois_gadget,
    label_cover_gadget,
    remove_repetition,
)
from .relations import Family, Instance, brute_force_status, default_max_vars, symmetric_profile
from .solvers import solve

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65

_DATA_ERRORS = (
    ParseError,
    SchemaError,
    PromiseViolation,
    ArityMismatch,
    WeightOutOfRange,
    LengthMismatch,
    EmptyRelation,
    OSError,
    ValueError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise _UsageError(message)


def _family(args) -> Family:
    return io.parse_family(io.load_json(args.family))


def _instance(args, fam: Family) -> Instance:
    return io.parse_instance(io.load_json(args.instance), fam)


def cmd_classify(args) -> tuple[int, dict]:
    c = classify(_family(args), assume_folded=args.assume_folded)
    code = {"tractable": EXIT_OK, "np-hard": EXIT_NO}.get(c.verdict, EXIT_UNKNOWN)
    rep = io.classification_to_json(c)
    return code, {"result": rep, "trace": rep.pop("trace")}


def cmd_solve(args) -> tuple[int, dict]:
    fam = _family(args)
    inst = _instance(args, fam)
    v = solve(fam, inst, kind=args.kind, witness=args.witness, engine=args.engine)
    rep = io.verdict_to_json(v)
    return (EXIT_OK if v.yes else EXIT_NO), {"result": rep, "engine": rep.pop("engine")}


def cmd_oracle(args) -> tuple[int, dict]:
    fam = _family(args)
    inst = _instance(args, fam)
    status = brute_force_status(fam, inst, max_vars=args.max_vars)
    code = {"psat": EXIT_OK, "qunsat": EXIT_NO}.get(status.value, EXIT_UNKNOWN)
    return code, {"result": {"status": status.value}, "engine": "brute-force"}


def _function(args):
    if args.named:
        return make_named(FamilyKind(args.named), args.arity)
    if args.table is None:
        raise _UsageError("poly check needs --named or --table")
    return io.parse_boolfun({"arity": args.arity, "table": args.table})


def cmd_poly_check(args) -> tuple[int, dict]:
    fam = _family(args)
    f = _function(args)
    for name, pr in fam.items():
        stack = check_weak_polymorphism(f, pr)
        if stack is not None:
            rep = {"polymorphism": False, "relation": name, "counterexample": [list(t) for t in stack]}
            return EXIT_NO, {"result": rep}
    return EXIT_OK, {"result": {"polymorphism": True, "function": io.boolfun_to_json(f)}}


def cmd_poly_closure(args) -> tuple[int, dict]:
    fam = _family(args)
    r = fam[args.relation].p
    kind = FamilyKind(args.kind)
    if args.lmax is not None:
        out = brute_force_closure(r, kind, args.lmax)
        engine = f"brute-force L<={args.lmax}"
    elif kind is FamilyKind.PAR:
        out, engine = closure_parity(r), "parity fixpoint"
    elif kind is FamilyKind.AND:
        out, engine = closure_meet(r), "meet fixpoint"
    elif kind is FamilyKind.OR:
        out, engine = closure_join(r), "join fixpoint"
    elif kind in (FamilyKind.MAJ, FamilyKind.AT):
        prof = symmetric_profile(r)
        if prof is None:
            raise _UsageError("closed-form maj/at closures need a symmetric relation; pass --lmax")
        w = closure_symmetric(kind, prof).weights
        return EXIT_OK, {"result": {"sym": sorted(w)}, "engine": "closed form"}
    else:
        raise _UsageError(f"no closure for kind {kind.value}")
    prof = symmetric_profile(out)
    rep = {"sym": sorted(prof.weights)} if prof is not None else {"tuples": [list(t) for t in out.tuples()]}
    return EXIT_OK, {"result": rep, "engine": engine}


def cmd_poly_enumerate(args) -> tuple[int, dict]:
    fam = _family(args)
    funs = enumerate_weak_polymorphisms(
        fam, args.arity, folded_only=args.folded, idempotent_only=args.idempotent, max_arity=args.enum_arity
    )
    return EXIT_OK, {"result": {"count": len(funs), "functions": [f.to_hex() for f in funs]}}


def cmd_poly_cfix(args) -> tuple[int, dict]:
    rep = c_fixing_scan(_family(args), args.lmax, max_arity=args.enum_arity)
    out = {"C": rep.C, "counts": {str(L): n for L, n in rep.counts.items()}}
    if rep.worst is not None:
        out["worst"] = io.boolfun_to_json(rep.worst)
        out["worst_set"] = sorted(rep.worst_set)
    return EXIT_OK, {"result": out}


def cmd_gadget_labelcover(args) -> tuple[int, dict]:
    fam = _family(args)
    lc = io.parse_label_cover(io.load_json(args.game))
    g = label_cover_gadget(lc, fam)
    rep = {
        "instance": io.instance_to_json(g.instance, fam),
        "left_vars": {str(u): list(vs) for u, vs in g.left_vars.items()},
        "right_vars": {str(v): list(vs) for v, vs in g.right_vars.items()},
    }
    return EXIT_OK, {"result": rep}


def cmd_reduce_norep(args) -> tuple[int, dict]:
    fam = _family(args)
    out = remove_repetition(fam, _instance(args, fam))
    return EXIT_OK, {"result": io.instance_to_json(out, fam)}


def cmd_reduce_ppp(args) -> tuple[int, dict]:
    src = _family(args)
    dst = io.parse_family(io.load_json(args.target))
    inst = _instance(args, src)
    raw = io.load_json(args.gadgets)
    if not isinstance(raw, dict) or not isinstance(raw.get("gadgets"), dict):
        raise SchemaError("gadgets: expected {'gadgets': {name: gadget}}")
    gadgets = {name: io.parse_gadget(g, dst, f"gadgets.{name}") for name, g in raw["gadgets"].items()}
    out = apply_ppp_gadget(gadgets, src, dst, inst)
    return EXIT_OK, {"result": io.instance_to_json(out, dst)}


def cmd_reduce_galois(args) -> tuple[int, dict]:
    fam = _family(args)
    target = io.parse_promise_relation(io.load_json(args.target), "target")
    g = galois_gadget(fam, target, max_arity=args.enum_arity)
    completeness, soundness = check_ppp_bullets(g, fam, target)
    rep = {"gadget": io.gadget_to_json(g), "checks": {"p_side": completeness, "q_side": soundness}}
    return EXIT_OK, {"result": rep}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pcsp", description="Symmetric Boolean promise CSP toolkit.")
    p.add_argument("--max-vars", type=int, default=default_max_vars(), help="variable cap of the brute-force oracle")
    p.add_argument("--enum-arity", type=int, default=default_enum_arity(), help="arity cap for enumeration")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(subparsers, name: str, fn: Callable, help_: str, instance: bool = False):
        sp = subparsers.add_parser(name, help=help_)
        sp.add_argument("-f", "--family", required=True, help="family JSON")
        if instance:
            sp.add_argument("-i", "--instance", required=True, help="instance JSON")
        sp.set_defaults(fn=fn)
        return sp

    sp = add(sub, "classify", cmd_classify, "classify a family")
    sp.add_argument("--assume-folded", action="store_true")

    sp = add(sub, "solve", cmd_solve, "decide an instance", instance=True)
    sp.add_argument("--witness", action="store_true", help="ask for a q-side assignment")
    sp.add_argument("--kind", choices=[k.value for k in FamilyKind], help="force a polymorphism kind")
    sp.add_argument("--engine", choices=["lp", "at-affine"], help="engine for AT families")

    poly = sub.add_parser("poly", help="polymorphism queries").add_subparsers(
        dest="poly", required=True, parser_class=_Parser
    )
    sp = add(poly, "check", cmd_poly_check, "check one function")
    sp.add_argument("--arity", type=int, required=True)
    sp.add_argument("--named", choices=[k.value for k in FamilyKind])
    sp.add_argument("--table", help="hex truth table")
    sp = add(poly, "closure", cmd_poly_closure, "closure of a relation's p side")
    sp.add_argument("--relation", required=True)
    sp.add_argument("--kind", required=True, choices=["par", "and", "or", "maj", "at"])
    sp.add_argument("--lmax", type=int, help="brute force up to this arity instead of a closed form")
    sp = add(poly, "enumerate", cmd_poly_enumerate, "list weak polymorphisms")
    sp.add_argument("--arity", type=int, required=True)
    sp.add_argument("--folded", action="store_true")
    sp.add_argument("--idempotent", action="store_true")
    sp = add(poly, "cfix", cmd_poly_cfix, "C-fixing scan of a hard family")
    sp.add_argument("--lmax", type=int, required=True)

    gadget = sub.add_parser("gadget", help="gadget generation").add_subparsers(
        dest="gadget", required=True, parser_class=_Parser
    )
    sp = add(gadget, "labelcover", cmd_gadget_labelcover, "long-code gadget of a label cover game")
    sp.add_argument("-g", "--game", required=True, help="label cover JSON")

    reduce_ = sub.add_parser("reduce", help="reductions").add_subparsers(
        dest="reduce", required=True, parser_class=_Parser
    )
    add(reduce_, "norep", cmd_reduce_norep, "remove repeated variables", instance=True)
    sp = add(reduce_, "ppp", cmd_reduce_ppp, "apply gadgets clause by clause", instance=True)
    sp.add_argument("-t", "--target", required=True, help="target family JSON")
    sp.add_argument("-g", "--gadgets", required=True, help="JSON {'gadgets': {name: gadget}}")
    sp = add(reduce_, "galois", cmd_reduce_galois, "gadget for a target relation")
    sp.add_argument("-t", "--target", required=True, help="promise relation JSON")

    oracle = sub.add_parser("oracle", help="brute-force oracle").add_subparsers(
        dest="oracle", required=True, parser_class=_Parser
    )
    add(oracle, "status", cmd_oracle, "psat / qunsat / gap", instance=True)
    return p


def _command_name(args) -> str:
    parts = [args.command]
    for attr in ("poly", "gadget", "reduce", "oracle"):
        if getattr(args, attr, None):
            parts.append(getattr(args, attr))
    return " ".join(parts)


def run(argv: list[str] | None = None) -> tuple[int, dict[str, Any]]:
    """Parse argv and execute; returns the exit code and the report."""
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        return EXIT_USAGE, {"error": "usage", "message": str(exc)}
    report: dict[str, Any] = {"command": _command_name(args)}
    start = time.perf_counter()
    try:
        code, body = args.fn(args)
        report.update(body)
    except _UsageError as exc:
        code = EXIT_USAGE
        report.update({"error": "usage", "message": str(exc)})
    except _DATA_ERRORS as exc:
        code = EXIT_DATA
        report.update({"error": type(exc).__name__, "message": str(exc)})
    except PCSPError as exc:
        code = EXIT_UNKNOWN
        report.update({"error": type(exc).__name__, "message": str(exc)})
    report["timings"] = {"seconds": round(time.perf_counter() - start, 6)}
    return code, report


def main(argv: list[str] | None = None) -> int:
    try:
        code, report = run(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return code
