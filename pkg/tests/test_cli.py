import json
import subprocess
import sys

import pytest

from autostack.catalog import load_entry
from autostack.catalog.formats import write_rules, write_stacking, RulesFile
from autostack.cli import run
from autostack.stacking import ComponentPhi, PhiComponent, StackingStructure


def lines(argv):
    code, out, err = run(argv)
    return code, out.splitlines(), err


def test_reduce():
    assert run(["reduce", "z2", "ba"]) == (0, "ab\n", "")


def test_reduce_trace():
    code, out, _ = lines(["reduce", "z2", "ba", "--trace"])
    assert code == 0
    assert out == ["1: ba -> bBab  [ba -> bBab]", "2: bBab -> ab  [bB -> 1]", "ab"]


def test_nf_exit_codes():
    assert run(["nf", "z2", "ab"])[0] == 0
    code, out, _ = run(["nf", "z2", "ba"])
    assert code == 1 and out == "ab\n"


def test_word_problem():
    assert run(["wp", "free2", "aA"])[1] == "identity\n"
    assert run(["wp", "free2", "ab"])[1] == "non-identity\n"
    assert run(["wp", "klein", "baBa"])[1] == "identity\n"
    assert run(["wp", "z2", "baBA", "--async"])[1] == "identity\n"


def test_irr_prints_automaton():
    code, out, _ = run(["irr", "z2"])
    assert code == 0 and out.startswith("DFA")


def test_ball(tmp_path):
    dot = tmp_path / "ball.dot"
    code, out, _ = lines(["ball", "free2", "-r", "2", "--dot", str(dot)])
    assert code == 0
    assert "vertices 17" in out and "recursive_edges 0" in out
    assert dot.read_text().startswith("digraph")


def test_diagram(tmp_path):
    js = tmp_path / "d.json"
    code, out, _ = lines(["diagram", "z2", "baBA", "--json", str(js)])
    assert code == 0
    assert "face 0 BAba" in out
    assert json.loads(js.read_text())["boundary_word"] == "baBA"
    code, out, err = lines(["diagram", "z2", "ab"])
    assert code == 2
    assert json.loads(err)["error"] == "validation"


def test_check():
    code, out, _ = lines(["check", "z2", "-r", "3"])
    assert code == 0 and out[-1] == "result ok"
    code, out, _ = lines(["check", "z2", "-r", "3", "--async"])
    assert code == 0 and out[-1] == "result ok"


def test_fellow():
    code, out, _ = lines(["fellow", "free2", "-r", "3"])
    assert code == 0 and out[0] == "constant 1"
    code, out, err = lines(["fellow", "z2", "-r", "3", "--cap", "0"])
    assert code == 2


def _bundle(tmp_path, s, name="bundle.txt"):
    path = tmp_path / name
    path.write_text(write_stacking(s))
    return str(path)


def test_corrupted_bundle_reports_cycle(tmp_path):
    s = load_entry("z2").stacking
    comps = [
        PhiComponent(c.domain, c.letter, ("a", "B", "b") if c.value == ("B", "a", "b") else c.value)
        for c in s.phi.components()
    ]
    bad = StackingStructure(s.alphabet, s.normal_forms, ComponentPhi(s.alphabet, comps), s.bound)
    code, out, err = lines(["check", _bundle(tmp_path, bad), "-r", "3"])
    assert code == 2
    assert "descent FAIL cycle (b, a)" in out
    assert out[-1] == "error: 1 check failures"
    assert json.loads(err) == {"code": 2, "error": "validation", "message": "1 check failures"}


def test_conversions(tmp_path):
    e = load_entry("z2")
    rules = tmp_path / "z2.rules"
    rules.write_text(write_rules(RulesFile(e.alphabet, e.srs.rules)))
    cprs = tmp_path / "z2.cprs"
    stack = tmp_path / "z2.stack"
    back = tmp_path / "back.cprs"
    assert run(["convert", "srs2cprs", str(rules), str(cprs)])[0] == 0
    assert run(["convert", "cprs2stack", str(cprs), str(stack)])[0] == 0
    assert run(["convert", "stack2cprs", str(stack), str(back)])[0] == 0
    assert run(["check", str(stack), "-r", "3"])[0] == 0
    assert run(["reduce", str(back), "ba"])[1] == "ab\n"
    assert run(["reduce", str(rules), "bbaa"])[1] == "aabb\n"
    code, _, err = run(["convert", "stack2cprs", str(rules), str(back)])
    assert code == 4 and json.loads(err)["error"] == "parse"


def test_async_conversion(tmp_path):
    from autostack.catalog.formats import write_async_structure

    src = tmp_path / "free2.async"
    src.write_text(write_async_structure(load_entry("free2").async_structure))
    out = tmp_path / "free2.stack"
    assert run(["convert", "async2stack", str(src), str(out)])[0] == 0
    code, text, _ = lines(["check", str(out), "-r", "2"])
    assert code == 0 and text[-1] == "result ok"


def test_process(tmp_path):
    e = load_entry("s3")
    rules = tmp_path / "s3.rules"
    rules.write_text(write_rules(RulesFile(e.alphabet, e.srs.rules)))
    code, out, _ = run(["process", str(rules)])
    assert code == 0 and out.startswith("PREFIX-REWRITING")


def test_error_codes(tmp_path):
    code, out, err = run(["reduce", "z2", "xyz"])
    assert code == 4 and out.startswith("error: ")
    assert json.loads(err)["code"] == 4
    assert run(["reduce", "nosuchgroup", "a"])[0] == 2
    assert run(["reduce", "z2", "bbbbaaaa", "--max-steps", "2"])[0] == 3
    bad = tmp_path / "bad.rules"
    bad.write_text("LETTERS: a A\nINV: A a\nRULES:\naA -> 1\nA? -> 1\n")
    code, _, err = run(["reduce", str(bad), "a"])
    assert code == 4 and "line 5" in json.loads(err)["message"]
    assert run(["diagram", "z2", "bbbbaBBBBA", "--max-depth", "1"])[0] == 3
    assert run(["reduce", str(tmp_path / "missing.rules"), "a"])[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["reduce", "klein", "bababA", "--trace"],
        ["irr", "s3"],
        ["ball", "z2", "-r", "3"],
        ["diagram", "klein", "baBa"],
        ["check", "s3", "-r", "3"],
        ["fellow", "z2", "-r", "3"],
    ],
)
def test_reruns_are_identical(argv):
    assert run(argv) == run(argv)


def test_console_entry_point():
    p = subprocess.run(
        [sys.executable, "-m", "autostack.cli", "reduce", "z2", "ba"], capture_output=True, text=True, check=False
    )
    assert p.returncode == 0 and p.stdout == "ab\n"
