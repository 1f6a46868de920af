import json
import subprocess
import sys
from fractions import Fraction

import pytest

from hahn2d import ExprSequence, FiniteMatrix, FiniteSequence
from hahn2d.cli import (DocumentError, build_objects, decode, encode, main, parse_document,
                        parse_report, run)

DOC = """
# a small document
seq x = [[1, 1/2],
         [0, -3/4]]
seq tele = 1/(l*(l+1)) where k==1
seq diag float = piece(k==l, 1/(k*l)) piece(true, 0)
seq u = e_unit(2, 3)
mat A = [[[[1, 0], [0, 2]]]]
mat Tm = 1/(m*n) where k<=m and l<=n
"""


def test_parse_document_kinds():
    specs = {s.name: s for s in parse_document(DOC)}
    assert specs["x"].form == "grid" and specs["x"].line == 3
    assert specs["tele"].form == "expr"
    assert specs["diag"].mode == "float"
    assert specs["u"].form == "special"
    assert specs["A"].kind == "matrix"
    objs = build_objects(parse_document(DOC))
    assert objs["x"] == FiniteSequence([[1, Fraction(1, 2)], [0, Fraction(-3, 4)]])
    assert objs["tele"].eval(1, 2) == Fraction(1, 6) and objs["tele"].eval(2, 2) == 0
    assert objs["Tm"].entry(2, 3, 1, 1) == Fraction(1, 6)
    assert objs["Tm"].entry(2, 3, 3, 1) == 0
    assert isinstance(objs["A"], FiniteMatrix)


def test_grammar_examples_from_text():
    objs = build_objects(parse_document("seq r = piece(k==1, 1/l) piece(true, 0)\n"
                                        "seq d = piece(k==l, 1/(k*l)) piece(true, 0)"))
    assert objs["r"].eval(1, 4) == Fraction(1, 4) and objs["r"].eval(2, 4) == 0
    assert objs["d"].eval(3, 3) == Fraction(1, 9) and objs["d"].eval(3, 2) == 0


@pytest.mark.parametrize("text,line", [
    ("seq a = [[1, 2], [3]]", 1),
    ("seq a = 1\nseq a = 2", 2),
    ("seq a = k +", 1),
    ("seq a = 1/(k*z)", 1),
    ("\n\nvec a = 1", 3),
    ("seq a = piece(k==1, 1)", 1),
])
def test_document_errors_have_positions(text, line):
    with pytest.raises(DocumentError) as info:
        build_objects(parse_document(text))
    assert info.value.line == line
    assert info.value.col >= 1


def test_encoding_round_trip():
    values = [Fraction(-7, 3), 0.1, 1e-300, 5, True, None, "s", [Fraction(1, 2), 2.5]]
    for v in values:
        assert decode(json.loads(json.dumps(encode(v)))) == v
    assert encode(Fraction(3, 4)) == {"rational": "3/4"}
    assert encode(0.1) == {"float": "0.10000000000000001"}


def _run(*argv):
    return run(list(argv))


def test_norm_example():
    rep = _run("norm", "rowones", "--norm", "hahn")
    assert rep.status == 0
    assert "Holds(0)" in "\n".join(rep.lines)


def test_member_example():
    rep = _run("member", "rowinv", "--space", "H", "--theta", "bp")
    assert rep.status == 1
    body = [r for r in parse_report(rep.machine()) if r["kind"] == "member"][0]
    assert body["verdict"]["witness"] == "hahn series diverges"


def test_verify_example():
    rep = _run("verify", "--suite", "all", "--seed", "42")
    assert rep.status == 0
    cases = [r for r in parse_report(rep.machine()) if r["kind"] == "oracle"]
    assert cases and all(c["passed"] for c in cases)


def test_commands_and_exit_codes(tmp_path):
    doc = tmp_path / "objs.txt"
    doc.write_text(DOC)
    f = ["--file", str(doc)]
    assert _run("eval", "x", "1", "2", *f).status == 0
    assert _run("eval", "tele", "1", "3", *f).records[1]["value"] == Fraction(1, 12)
    assert '{"rational": "1/12"}' in _run("eval", "tele", "1", "3", *f).machine()
    assert _run("dual", "kseq", "--dual", "alpha").status == 1
    assert _run("dual", "ones", "--dual", "beta-bp").status == 0
    assert _run("apply", "T", "ones", "--at", "3,4").status == 0
    assert _run("apply", "A", "x", "--grid", "2x2", *f).status == 0
    assert _run("derive", "ET", "--as", "E", "--from", "T").status == 0
    assert _run("derive", "Dx", "--as", "D", "--from", "x", *f).status == 0
    assert _run("classify", "T", "--class", "H->Mu").status == 0
    assert _run("classify", "T", "--class", "H->H").status == 1
    assert _run("classify", "T", "--class", "H->BV").status == 2
    assert _run("norm", "diag", "--norm", "lq", "--q", "1", "--mode", "float").status in (0, 2)
    assert _run("eval", "missing", "1", "1").status == 3
    assert _run("classify", "T", "--class", "H->Zz").status == 3
    assert _run("member", "x", "--space", "Q", *f).status == 3


def test_inline_definitions_and_shadowing():
    rep = _run("eval", "ones", "2", "2", "-D", "seq ones = 7")
    assert rep.records[1]["value"] == 7


def test_usage_errors_exit_3(capsys):
    with pytest.raises(SystemExit) as info:
        main(["norm"])
    assert info.value.code == 3


def test_machine_report_round_trip(tmp_path):
    out = tmp_path / "r.jsonl"
    argv = ["norm", "block22", "--norm", "pinf", "--report", "machine", "--out", str(out)]
    assert main(argv) == 0
    text = out.read_text()
    recs = parse_report(text)
    again = run(argv)
    assert again.machine() == text
    norm = [r for r in recs if r["kind"] == "norm"][0]
    assert norm["verdict"]["value"] == 1


def test_machine_reports_are_stable():
    argv = ["classify", "T", "--class", "H->Mu", "--report", "machine"]
    assert run(argv).machine() == run(argv).machine()


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "hahn2d.cli", "eval", "inv", "2", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "1/6" in proc.stdout
