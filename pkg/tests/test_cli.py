from __future__ import annotations

import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from _corpus import AT_FAM, HITTING, SAT_K1
from pcsp import io
from pcsp.cli import run
from pcsp.errors import ParseError, PromiseViolation, SchemaError
from pcsp.polymorphisms import BoolFun
from pcsp.reductions import Gadget, LabelCover
from pcsp.relations import Family, Instance, PromiseRelation, Relation


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def promise_relations():
    def build(k, p, extra):
        p = frozenset(x % (1 << k) for x in p)
        return PromiseRelation(Relation(k, p), Relation(k, p | {x % (1 << k) for x in extra}))

    return st.builds(build, st.integers(1, 4), st.frozensets(st.integers(0, 15)), st.frozensets(st.integers(0, 15)))


families = st.lists(promise_relations(), min_size=1, max_size=4).map(
    lambda rels: Family(tuple(rels), tuple(f"R{i}" for i in range(len(rels))))
)


@given(families)
def test_family_round_trip(fam):
    assert io.parse_family(json.loads(json.dumps(io.family_to_json(fam)))) == fam


@given(families, st.integers(1, 6), st.lists(st.tuples(st.integers(0, 3), st.lists(st.integers(0, 5), min_size=4, max_size=4)), max_size=5))
def test_instance_round_trip(fam, n, raw):
    clauses = []
    for r, vs in raw:
        r %= len(fam)
        clauses.append((r, tuple(v % n for v in vs[: fam.relations[r].arity])))
    inst = Instance(n, tuple(clauses))
    assert io.parse_instance(io.instance_to_json(inst, fam), fam) == inst


@given(st.integers(1, 4).flatmap(lambda L: st.integers(0, (1 << (1 << L)) - 1).map(lambda t: BoolFun(L, t))))
def test_boolfun_round_trip(f):
    assert io.parse_boolfun(io.boolfun_to_json(f)) == f


def test_label_cover_and_gadget_round_trip():
    lc = LabelCover(2, 3, (("a", "b", (1, 2, 2)), ("a", "c", (2, 1, 1))))
    assert io.parse_label_cover(io.label_cover_to_json(lc)) == lc
    g = Gadget(3, 2, (("HIT1", (0, 1, 3)), ("EQUAL", (2, 4))))
    assert io.parse_gadget(io.gadget_to_json(g), HITTING) == g


def test_parse_errors(tmp_path):
    with pytest.raises(ParseError, match="line 2"):
        io.load_json(write(tmp_path, "bad.json", '{"relations":\n ]'))
    with pytest.raises(PromiseViolation, match="'B'"):
        io.parse_family({"relations": [{"name": "B", "arity": 2, "p": {"sym": [0]}, "q": {"sym": [1]}}]})
    with pytest.raises(SchemaError, match=r"clauses\[1\]"):
        io.parse_instance({"num_vars": 3, "clauses": [{"rel": "HIT1", "vars": [0, 1, 2]}, {"rel": "HIT1", "vars": [0, 1]}]}, HITTING)
    with pytest.raises(SchemaError, match=r"relations\[0\].p.sym"):
        io.parse_family({"relations": [{"name": "X", "arity": 2, "p": {"sym": [3]}, "q": {"sym": [1]}}]})


def test_cli_classify_hard(tmp_path):
    code, rep = run(["classify", "-f", write(tmp_path, "f.json", io.family_to_json(SAT_K1))])
    assert code == 1 and rep["result"]["verdict"] == "np-hard"


def test_cli_solve_hitting_with_witness(tmp_path):
    fam = write(tmp_path, "f.json", io.family_to_json(HITTING))
    inst = write(tmp_path, "i.json", {"num_vars": 4, "clauses": [{"rel": "HIT1", "vars": [0, 1, 2]}, {"rel": "HIT2", "vars": [1, 2, 3]}]})
    code, rep = run(["solve", "-f", fam, "-i", inst, "--witness"])
    assert code == 0 and rep["result"]["verdict"] == "yes" and len(rep["result"]["witness"]) == 4
    assert rep["engine"] == "lp" and "seconds" in rep["timings"]


def test_cli_oracle_gap(tmp_path):
    fam = write(tmp_path, "f.json", {"relations": [{"name": "E", "arity": 1, "p": {"sym": []}, "q": {"sym": [0, 1]}}]})
    inst = write(tmp_path, "i.json", {"num_vars": 1, "clauses": [{"rel": "E", "vars": [0]}]})
    code, rep = run(["oracle", "status", "-f", fam, "-i", inst])
    assert code == 2 and rep["result"]["status"] == "gap"


def test_cli_error_codes(tmp_path):
    assert run(["frobnicate"])[0] == 64
    assert run(["classify"])[0] == 64
    assert run(["classify", "-f", str(tmp_path / "missing.json")])[0] == 65
    bad = write(tmp_path, "bad.json", {"relations": [{"name": "B", "arity": 2, "p": {"sym": [0]}, "q": {"sym": [1]}}]})
    code, rep = run(["classify", "-f", bad])
    assert code == 65 and rep["error"] == "PromiseViolation"
    hard = write(tmp_path, "hard.json", io.family_to_json(SAT_K1))
    inst = write(tmp_path, "i.json", {"num_vars": 3, "clauses": [{"rel": "R0", "vars": [0, 1, 2]}]})
    code, rep = run(["solve", "-f", hard, "-i", inst])
    assert code == 2 and rep["error"] == "NotTractable"


def test_cli_poly_and_reduce_commands(tmp_path):
    fam = write(tmp_path, "f.json", io.family_to_json(AT_FAM))
    assert run(["poly", "check", "-f", fam, "--arity", "3", "--named", "at"])[0] == 0
    code, rep = run(["poly", "check", "-f", fam, "--arity", "3", "--named", "par"])
    assert code == 1 and rep["result"]["counterexample"]
    code, rep = run(["poly", "closure", "-f", fam, "--relation", "HIT1", "--kind", "at"])
    assert rep["result"] == {"sym": [1, 2]}
    code, rep = run(["poly", "closure", "-f", fam, "--relation", "HIT1", "--kind", "at", "--lmax", "5"])
    assert rep["result"] == {"sym": [1, 2]}
    code, rep = run(["poly", "enumerate", "-f", fam, "--arity", "1", "--folded"])
    assert rep["result"]["count"] == 2  # identity and negation
    hard = write(tmp_path, "h.json", io.family_to_json(SAT_K1))
    code, rep = run(["poly", "cfix", "-f", hard, "--lmax", "3"])
    assert code == 0 and rep["result"]["C"] >= 1
    inst = write(tmp_path, "i.json", {"num_vars": 1, "clauses": [{"rel": "NOT", "vars": [0, 0]}]})
    code, rep = run(["reduce", "norep", "-f", fam, "-i", inst])
    assert code == 0 and rep["result"]["num_vars"] == 6
    target = write(tmp_path, "t.json", {"arity": 2, "p": {"sym": [1]}, "q": {"sym": [1]}})
    notfam = write(tmp_path, "n.json", {"relations": [{"name": "NOT", "arity": 2, "p": {"sym": [1]}, "q": {"sym": [1]}}]})
    code, rep = run(["reduce", "galois", "-f", notfam, "-t", target])
    assert rep["result"]["checks"] == {"p_side": True, "q_side": True}
    game = write(tmp_path, "g.json", {"L": 1, "R": 1, "edges": [{"u": "u", "v": "v", "pi": [1]}]})
    code, rep = run(["gadget", "labelcover", "-g", game, "-f", notfam])
    assert rep["result"]["instance"]["num_vars"] == 2
    gadgets = write(tmp_path, "gg.json", {"gadgets": {"NOT": {"arity": 2, "aux": 0, "clauses": [{"rel": "NOT", "vars": [0, 1]}]}}})
    inst2 = write(tmp_path, "i2.json", {"num_vars": 2, "clauses": [{"rel": "NOT", "vars": [0, 1]}]})
    code, rep = run(["reduce", "ppp", "-f", notfam, "-t", notfam, "-g", gadgets, "-i", inst2])
    assert rep["result"] == {"num_vars": 2, "clauses": [{"rel": "NOT", "vars": [0, 1]}]}


def test_cli_is_deterministic(tmp_path):
    fam = write(tmp_path, "f.json", io.family_to_json(AT_FAM))
    inst = write(tmp_path, "i.json", {"num_vars": 3, "clauses": [{"rel": "HIT1", "vars": [0, 1, 2]}]})
    reps = []
    for _ in range(2):
        _, rep = run(["solve", "-f", fam, "-i", inst, "--witness"])
        rep.pop("timings")
        reps.append(json.dumps(rep, sort_keys=True))
    assert reps[0] == reps[1]


def test_module_entry_point(tmp_path):
    fam = write(tmp_path, "f.json", io.family_to_json(SAT_K1))
    proc = subprocess.run([sys.executable, "-m", "pcsp", "classify", "-f", fam], capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["result"]["verdict"] == "np-hard"
