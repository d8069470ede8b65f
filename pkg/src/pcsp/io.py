"""JSON schemas for families, instances, games, gadgets and reports."""

from __future__ import annotations

import json
from typing import Any

from .classify import Classification
from .errors import ArityMismatch, ParseError, PromiseViolation, SchemaError, TooLarge, WeightOutOfRange
from .polymorphisms import BoolFun
from .reductions import Gadget, LabelCover
from .relations import (
    Family,
    Instance,
    PromiseRelation,
    Relation,
    make_ham,
    symmetric_profile,
)
from .solvers import Verdict

__all__ = [
    "load_json",
    "parse_family",
    "family_to_json",
    "parse_promise_relation",
    "promise_relation_to_json",
    "parse_instance",
    "instance_to_json",
    "parse_label_cover",
    "label_cover_to_json",
    "parse_gadget",
    "gadget_to_json",
    "parse_boolfun",
    "boolfun_to_json",
    "classification_to_json",
    "verdict_to_json",
]


def load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _expect(cond: bool, where: str, what: str) -> None:
    if not cond:
        raise SchemaError(f"{where}: {what}")


def _int(value: Any, where: str) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), where, "expected an integer")
    return value


def _relation(obj: Any, k: int, where: str) -> Relation:
    _expect(isinstance(obj, dict), where, "expected an object with 'sym' or 'tuples'")
    _expect(len(obj.keys() & {"sym", "tuples"}) == 1, where, "give exactly one of 'sym' or 'tuples'")
    if "sym" in obj:
        weights = obj["sym"]
        _expect(isinstance(weights, list), f"{where}.sym", "expected a list of weights")
        try:
            return make_ham(k, [_int(w, f"{where}.sym[{i}]") for i, w in enumerate(weights)])
        except WeightOutOfRange as exc:
            raise SchemaError(f"{where}.sym: {exc}") from None
    tuples = obj["tuples"]
    _expect(isinstance(tuples, list), f"{where}.tuples", "expected a list of tuples")
    for i, t in enumerate(tuples):
        loc = f"{where}.tuples[{i}]"
        _expect(isinstance(t, list) and len(t) == k, loc, f"expected a list of {k} bits")
        _expect(all(b in (0, 1) and not isinstance(b, bool) for b in t), loc, "entries must be 0 or 1")
    return Relation.from_tuples(k, tuples)


def _relation_to_json(r: Relation) -> dict:
    prof = symmetric_profile(r)
    if prof is not None:
        return {"sym": sorted(prof.weights)}
    return {"tuples": [list(t) for t in r.tuples()]}


def parse_promise_relation(obj: Any, where: str = "relation") -> PromiseRelation:
    _expect(isinstance(obj, dict), where, "expected an object")
    for key in ("arity", "p", "q"):
        _expect(key in obj, where, f"missing field '{key}'")
    k = _int(obj["arity"], f"{where}.arity")
    try:
        p = _relation(obj["p"], k, f"{where}.p")
        q = _relation(obj["q"], k, f"{where}.q")
    except (ArityMismatch, TooLarge) as exc:
        raise SchemaError(f"{where}: {exc}") from None
    try:
        return PromiseRelation(p, q)
    except PromiseViolation as exc:
        name = obj.get("name", where)
        raise PromiseViolation(f"relation {name!r}: {exc}") from None


def promise_relation_to_json(pr: PromiseRelation, name: str | None = None) -> dict:
    out: dict = {} if name is None else {"name": name}
    out.update({"arity": pr.arity, "p": _relation_to_json(pr.p), "q": _relation_to_json(pr.q)})
    return out


def parse_family(obj: Any) -> Family:
    _expect(isinstance(obj, dict) and isinstance(obj.get("relations"), list), "family", "expected {'relations': [...]}")
    rels, names = [], []
    _expect(len(obj["relations"]) > 0, "family.relations", "at least one relation is required")
    for i, entry in enumerate(obj["relations"]):
        where = f"relations[{i}]"
        _expect(isinstance(entry, dict), where, "expected an object")
        _expect(isinstance(entry.get("name"), str), where, "missing string field 'name'")
        _expect(entry["name"] not in names, f"{where}.name", f"duplicate name {entry['name']!r}")
        rels.append(parse_promise_relation(entry, where))
        names.append(entry["name"])
    return Family(tuple(rels), tuple(names))


def family_to_json(fam: Family) -> dict:
    return {"relations": [promise_relation_to_json(pr, name) for name, pr in fam.items()]}


def _clauses(obj: Any, names: list[str], arities: list[int], n: int, where: str) -> list[tuple[int, tuple[int, ...]]]:
    _expect(isinstance(obj, list), where, "expected a list of clauses")
    out = []
    for i, c in enumerate(obj):
        loc = f"{where}[{i}]"
        _expect(isinstance(c, dict), loc, "expected an object with 'rel' and 'vars'")
        _expect(c.get("rel") in names, f"{loc}.rel", f"unknown relation {c.get('rel')!r}")
        vs = c.get("vars")
        _expect(isinstance(vs, list), f"{loc}.vars", "expected a list of variable indices")
        vs = [_int(v, f"{loc}.vars") for v in vs]
        _expect(all(0 <= v < n for v in vs), f"{loc}.vars", f"variables must lie in 0..{n - 1}")
        r = names.index(c["rel"])
        _expect(len(vs) == arities[r], loc, f"relation {c['rel']!r} has arity {arities[r]}, got {len(vs)} variables")
        out.append((r, tuple(vs)))
    return out


def parse_instance(obj: Any, fam: Family) -> Instance:
    _expect(isinstance(obj, dict), "instance", "expected an object")
    n = _int(obj.get("num_vars"), "instance.num_vars")
    _expect(n >= 0, "instance.num_vars", "must be non-negative")
    names = list(fam.names)
    arities = [pr.arity for pr in fam.relations]
    return Instance(n, tuple(_clauses(obj.get("clauses"), names, arities, n, "clauses")))


def instance_to_json(inst: Instance, fam: Family) -> dict:
    return {
        "num_vars": inst.num_vars,
        "clauses": [{"rel": fam.names[r], "vars": list(vs)} for r, vs in inst.clauses],
    }


def parse_label_cover(obj: Any) -> LabelCover:
    _expect(isinstance(obj, dict), "labelcover", "expected an object")
    L = _int(obj.get("L"), "labelcover.L")
    R = _int(obj.get("R"), "labelcover.R")
    edges = obj.get("edges")
    _expect(isinstance(edges, list), "labelcover.edges", "expected a list")
    parsed = []
    for i, e in enumerate(edges):
        loc = f"edges[{i}]"
        _expect(isinstance(e, dict) and {"u", "v", "pi"} <= e.keys(), loc, "expected {'u', 'v', 'pi'}")
        pi = e["pi"]
        _expect(isinstance(pi, list), f"{loc}.pi", "expected a list")
        parsed.append((e["u"], e["v"], tuple(_int(t, f"{loc}.pi") for t in pi)))
    return LabelCover(L, R, tuple(parsed), obj.get("eta"))


def label_cover_to_json(lc: LabelCover) -> dict:
    out = {"L": lc.L, "R": lc.R, "edges": [{"u": u, "v": v, "pi": list(pi)} for u, v, pi in lc.edges]}
    if lc.eta is not None:
        out["eta"] = lc.eta
    return out


def parse_gadget(obj: Any, fam: Family, where: str = "gadget") -> Gadget:
    _expect(isinstance(obj, dict), where, "expected an object")
    k = _int(obj.get("arity"), f"{where}.arity")
    aux = _int(obj.get("aux"), f"{where}.aux")
    names = list(fam.names) + ["EQUAL"]
    arities = [pr.arity for pr in fam.relations] + [2]
    clauses = _clauses(obj.get("clauses"), names, arities, k + aux, f"{where}.clauses")
    return Gadget(k, aux, tuple((names[r], vs) for r, vs in clauses))


def gadget_to_json(g: Gadget) -> dict:
    return {
        "arity": g.arity,
        "aux": g.aux,
        "num_vars": g.arity + g.aux,
        "clauses": [{"rel": name, "vars": list(vs)} for name, vs in g.clauses],
    }


def parse_boolfun(obj: Any, where: str = "function") -> BoolFun:
    _expect(isinstance(obj, dict), where, "expected {'arity', 'table'}")
    L = _int(obj.get("arity"), f"{where}.arity")
    table = obj.get("table")
    _expect(isinstance(table, str), f"{where}.table", "expected a hex string")
    try:
        return BoolFun.from_hex(L, table)
    except ValueError as exc:
        raise SchemaError(f"{where}.table: {exc}") from None


def boolfun_to_json(f: BoolFun) -> dict:
    return {"arity": f.arity, "table": f.to_hex()}


def classification_to_json(c: Classification) -> dict:
    out: dict = {"verdict": c.verdict, "trace": list(c.trace)}
    if c.kind is not None:
        out["kind"] = c.kind.value
    if c.reason is not None:
        out["reason"] = c.reason
    return out


def verdict_to_json(v: Verdict) -> dict:
    out: dict = {"verdict": v.answer, "engine": v.engine}
    if v.witness is not None:
        out["witness"] = list(v.witness)
    return out
