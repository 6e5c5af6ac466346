import json
import re
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import frobmod
import suite
from frobmod import cli
from frobmod.bimodule import bimodules_isomorphic
from frobmod.module import IsomorphismUnknown

FIXTURES = Path(frobmod.__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"
ALL = sorted(p.name for p in FIXTURES.glob("*.frob"))


def run_main(args, capsys):
    rc = cli.main(args)
    out = capsys.readouterr()
    return rc, out.out, out.err


def mask_timing(text):
    return re.sub(r"\[[0-9.]+s\]", "[-]", text)


def test_fixture_set():
    assert len(ALL) >= 10


@pytest.mark.parametrize("name", ALL)
def test_fixture_expectations_hold(name, capsys):
    rc, out, err = run_main(["report-all", str(FIXTURES / name)], capsys)
    assert rc == 0, out + err
    assert "FAIL" not in out and out.rstrip().endswith("all expectations met")


@pytest.mark.parametrize("name", ["triangular.frob", "glue_obstruction.frob"])
def test_module_entry_point(name):
    proc = subprocess.run([sys.executable, "-m", "frobmod", "report-all", str(FIXTURES / name)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


@pytest.mark.parametrize("name", ALL)
def test_parse_dump_round_trip(name):
    doc = cli.parse((FIXTURES / name).read_text())
    text = cli.dump(doc)
    again = cli.parse(text)
    assert cli.dump(again) == text
    assert [t.kind for t in again.tasks] == [t.kind for t in doc.tasks]
    for key in doc.bimodules:
        a, b = doc.bimodules[key][0], again.bimodules[key][0]
        assert np.array_equal(a.left, b.left) and np.array_equal(a.right, b.right)


def test_triangular_fixture_matches_builder():
    doc = cli.parse((FIXTURES / "triangular.frob").read_text())
    r, k, m = suite.triangular()
    parsed = doc.bimodules["M"][0]
    assert np.array_equal(doc.algebras["R"].structure, r.structure)
    assert np.array_equal(parsed.left, m.left) and np.array_equal(parsed.right, m.right)


def test_twisted_triangular_fixture_matches_builder():
    doc = cli.parse((FIXTURES / "twisted_triangular.frob").read_text())
    r, t, _ = suite.twisted_triangular()
    parsed = doc.bimodules["T"][0]
    assert np.array_equal(doc.algebras["R"].structure, r.structure)
    assert np.array_equal(parsed.left, t.left) and np.array_equal(parsed.right, t.right)


def test_delta_fixture_matches_builder():
    doc = cli.parse((FIXTURES / "delta.frob").read_text())
    _, _, d = suite.delta()
    name = next(iter(doc.bimodules))
    parsed = doc.bimodules[name][0]
    assert parsed.dim == d.dim
    assert np.array_equal(parsed.left, d.left) and np.array_equal(parsed.right, d.right)


def test_identity_fixture_is_regular():
    from frobmod.bimodule import regular
    doc = cli.parse((FIXTURES / "identity.frob").read_text())
    a = doc.algebras["A"]
    assert np.array_equal(a.structure, suite.linear_quiver(suite.F5, 3).structure)
    assert bimodules_isomorphic(doc.bimodules["I"][0], regular(a))


def test_empty_document():
    doc = cli.parse("")
    assert doc.tasks == [] and doc.modulus is None
    doc = cli.parse("# only a comment\n\n")
    assert doc.tasks == []


def test_modulus_not_prime():
    with pytest.raises(cli.FrobSemanticError, match="not prime"):
        cli.parse("field 4\n")


def test_syntax_error_position():
    with pytest.raises(cli.FrobSyntaxError) as info:
        cli.parse("field 5\nwibble 3\n")
    assert info.value.line == 2
    with pytest.raises(cli.FrobSyntaxError):
        cli.parse("field 5\nalgebra A {\n  basis x\n")
    with pytest.raises(cli.FrobSyntaxError):
        cli.parse("expect x = 1\n")


def test_unresolved_reference():
    with pytest.raises(cli.FrobSemanticError, match="unresolved"):
        cli.parse("field 5\ntask check Nope\n")


@pytest.mark.parametrize("name", ["triangular.frob", "twisted_triangular.frob", "decomposition.frob"])
def test_json_is_stable(name, capsys):
    path = str(FIXTURES / name)
    _, first, _ = run_main(["report-all", path, "--format", "json", "--seed", "11"], capsys)
    _, second, _ = run_main(["report-all", path, "--format", "json", "--seed", "11"], capsys)
    assert first == second
    data = json.loads(first)
    assert json.dumps(data, sort_keys=True, indent=2) + "\n" == first
    assert data["modulus"] == cli.parse((FIXTURES / name).read_text()).modulus


@pytest.mark.parametrize("golden,command,name", [("triangular_ranks.txt", "ranks", "triangular.frob"),
                                                  ("delta_classify.txt", "classify", "delta.frob")])
def test_text_golden(golden, command, name, capsys):
    _, out, _ = run_main([command, str(FIXTURES / name)], capsys)
    assert mask_timing(out) == (GOLDEN / golden).read_text()


def test_out_flag(tmp_path, capsys):
    target = tmp_path / "report.json"
    rc, out, _ = run_main(["ranks", str(FIXTURES / "triangular.frob"), "--format", "json", "--out", str(target)],
                          capsys)
    assert rc == 0 and out == ""
    assert json.loads(target.read_text())["sections"][0]["result"]["rrk"] == [[1], [1]]


def test_exit_code_mismatch(tmp_path, capsys):
    text = (FIXTURES / "triangular.frob").read_text().replace("expect lambda = [1]", "expect lambda = [2]")
    path = tmp_path / "wrong.frob"
    path.write_text(text)
    rc, out, _ = run_main(["ranks", str(path)], capsys)
    assert rc == cli.EXIT_MISMATCH == 1
    assert "FAIL expect lambda" in out


def test_exit_code_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.frob"
    bad.write_text("field 4\n")
    assert run_main(["check", str(bad)], capsys)[0] == 2
    assert run_main(["check", str(tmp_path / "missing.frob")], capsys)[0] == 2
    assert run_main(["bogus", str(bad)], capsys)[0] == 2
    assert run_main(["check", str(bad), "--seed", "-1"], capsys)[0] == 2


def test_exit_code_unknown(monkeypatch, capsys):
    def undecided(*args, **kwargs):
        raise IsomorphismUnknown("search budget exhausted")
    monkeypatch.setitem(cli._RUNNERS, "ranks", undecided)
    rc, _, err = run_main(["ranks", str(FIXTURES / "triangular.frob")], capsys)
    assert rc == cli.EXIT_UNKNOWN == 3 and "undecided" in err


def test_standard_input(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO((FIXTURES / "identity.frob").read_text()))
    rc, out, _ = run_main(["check", "-"], capsys)
    assert rc == 0 and "== check I" in out


def test_default_tasks_without_task_lines(tmp_path, capsys):
    doc = cli.parse((FIXTURES / "identity.frob").read_text())
    doc.tasks = []
    path = tmp_path / "bare.frob"
    path.write_text(cli.dump(doc))
    rc, out, _ = run_main(["classify", str(path), "--format", "json"], capsys)
    assert rc == 0
    res = json.loads(out)["sections"][0]["result"]
    assert res["localizing"]["holds"] and res["equivalence"]["holds"]


def test_glue_obstruction_names_witness(capsys):
    _, out, _ = run_main(["glue", str(FIXTURES / "glue_obstruction.frob"), "--format", "json"], capsys)
    res = json.loads(out)["sections"][0]["result"]
    assert res["error"] == "HypothesisFailure"
    assert res["witness"] == {"class": "T2", "envelope of": 1, "factor": 2}


def test_include_zero_subcategory_flag(tmp_path, capsys):
    text = "field 5\nalgebra k {\n  basis 1\n  unit 1\n  mul 1*1 = 1\n  idempotents 1\n  radical\n}\n" \
           "bimodule Z over k, k {\n  dim 0\n}\ntask classify Z\n"
    path = tmp_path / "zero.frob"
    path.write_text(text)
    _, plain, _ = run_main(["classify", str(path), "--format", "json"], capsys)
    _, zero, _ = run_main(["classify", str(path), "--format", "json", "--include-zero-subcategory"], capsys)
    assert json.loads(plain)["sections"][0]["result"]["localizing"]["holds"] is True
    assert json.loads(zero)["sections"][0]["result"]["localizing"]["holds"] is False
