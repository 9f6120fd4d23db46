import json
import subprocess
import sys

from amalgam.cli import main
from amalgam.fileio import model_from_text, proof_to_text
from amalgam.formula import Box, P
from amalgam.lkernel import AN, LProof, ThmEM, em


def run(*args):
    return main(list(args))


def test_prove_ipc_exit_codes(tmp_path, capsys):
    out = tmp_path / "pp.jsonl"
    assert run("prove-ipc", "p -> p", "-o", str(out)) == 0
    assert out.read_text().startswith('{"format": "amalgam-proof", "logic": "IPC"')
    cm = tmp_path / "peirce.json"
    assert run("prove-ipc", "((p -> q) -> p) -> p", "-o", str(cm)) == 1
    assert json.loads(cm.read_text())["worlds"] == 2
    assert run("prove-ipc", "p -> (") == 2
    assert "parse error" in capsys.readouterr().err
    assert run("prove-ipc", "[]p -> p") == 2


def test_check_and_embed(tmp_path, capsys):
    ipc = tmp_path / "ipc.jsonl"
    lp = tmp_path / "l.jsonl"
    assert run("prove-ipc", "p /\\ q -> q", "-o", str(ipc)) == 0
    assert run("check", str(ipc)) == 0
    assert run("embed", str(ipc), "-o", str(lp)) == 0
    assert run("check", str(lp), "--goal", "[](p /\\ q -> q)") == 0
    assert run("check", str(lp), "--goal", "[]p") == 1
    assert run("check", str(tmp_path / "missing.jsonl")) == 2
    assert run("embed", str(lp)) == 2


def test_check_rejects_an_on_theorem(tmp_path, capsys):
    bad = LProof((), ((em(P), ThmEM(P)), (Box(em(P)), AN(1))))
    path = tmp_path / "bad.jsonl"
    path.write_text(proof_to_text(bad))
    assert run("check", str(path)) == 1
    assert "line 2" in capsys.readouterr().err


def test_enumerate(tmp_path, capsys):
    out = tmp_path / "alg.jsonl"
    assert run("enumerate", "algebras", "--max-algebra", "2", "-o", str(out)) == 0
    assert len(out.read_text().splitlines()) == 2
    assert run("enumerate", "algebras", "--max-algebra", "8", "--boolean", "--dp", "-o", str(out)) == 0
    assert [json.loads(l)["size"] for l in out.read_text().splitlines()] == [1, 2]
    assert run("enumerate", "ultrafilters", "--max-algebra", "4", "-o", str(out)) == 0
    assert run("enumerate", "models", "--max-algebra", "6", "--boolean", "-o", str(out)) == 0
    assert all(json.loads(l)["size"] == 2 for l in out.read_text().splitlines())
    assert run("enumerate", "models", "--max-algebra", "9") == 2


def test_countermodel(tmp_path):
    out = tmp_path / "m.json"
    assert run("countermodel", "[](p \\/ ~p)", "-o", str(out)) == 0
    model, gamma = model_from_text(out.read_text())
    assert model.validate() and 0 in gamma
    assert run("validate-model", str(out)) == 0
    assert run("countermodel", "[]p -> p") == 1
    assert run("countermodel", "p", "-o", str(out)) == 0
    assert model_from_text(out.read_text())[0].size == 2


def test_conservativity(tmp_path):
    out = tmp_path / "c.jsonl"
    assert run("conservativity", "~~p -> p", "-o", str(out)) == 0
    assert run("check", str(out), "--goal", "~~p -> p") == 0
    assert run("conservativity", "p", "-o", str(tmp_path / "c.json")) == 0


def test_sweep_command(tmp_path):
    d = tmp_path / "sw"
    assert run("sweep", "--vars", "1", "--size", "4", "-o", str(d)) == 0
    lines = (d / "report.jsonl").read_text().splitlines()
    assert json.loads(lines[-1])["evidence_failures"] == 0
    assert run("sweep", "--vars", "9", "-o", str(d)) == 2


def test_console_script_end_to_end(tmp_path):
    # same contract through a fresh interpreter
    cmd = [sys.executable, "-m", "amalgam.cli"]
    r = subprocess.run(cmd + ["prove-ipc", "p -> p", "-o", str(tmp_path / "a")], capture_output=True, text=True)
    assert r.returncode == 0 and "Provable" in r.stderr
    r = subprocess.run(cmd + ["prove-ipc", "p \\/ ~p", "-o", str(tmp_path / "b")], capture_output=True, text=True)
    assert r.returncode == 1
    r = subprocess.run(cmd + ["prove-ipc", ")"], capture_output=True, text=True)
    assert r.returncode == 2 and r.stderr
    r = subprocess.run(cmd + ["frobnicate"], capture_output=True, text=True)
    assert r.returncode == 2
