import json

import pytest

from aot import kernel as kn
from aot import paradox as px
from aot.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", "forall x. F(x)")
    assert code == 0 and out == "formula: forall x. F(x)\nfree: F\n"


def test_parse_from_file(capsys, tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("[\\x. F(x)]\n")
    code, d = run_json(capsys, "parse", "--file", str(f))
    assert code == 0 and d["kind"] == "term"


@pytest.mark.parametrize("text, mode, code", [
    ("[\\x. y[F]]", "strict", 1),
    ("[\\x. G((the y. y[F]))]", "legacy", 0),
    ("[\\x. G((the y. y[F]))]", "strict", 1),
    ("F(x) & p", "strict", 0),
])
def test_classify(capsys, text, mode, code):
    assert run(capsys, "classify", text, "--mode", mode)[0] == code


class TestValid:
    def test_valid(self, capsys):
        code, out, _ = run(capsys, "valid", "x[F] -> box x[F]", "--model", "m1")
        assert code == 0 and out.startswith("valid in (1, 1, 1, 2)")

    def test_invalid_has_countermodel(self, capsys):
        code, d = run_json(capsys, "valid", "F(x)")
        assert code == 1 and not d["valid"]
        assert d["countermodel"]["assignment"] == {"F": "P0", "x": "o0"}

    def test_let(self, capsys):
        assert run(capsys, "valid", "F(x)", "--let", "x=o0", "--let", "F=P1")[0] == 0
        assert run(capsys, "valid", "F(x)", "--let", "x=o0", "--let", "F=P2")[0] == 1

    def test_size(self, capsys):
        code, d = run_json(capsys, "valid", "forall x. O!(x) | A!(x)", "--size", "2,1,1,1")
        assert code == 0 and d["model"]["ordinary"] == 2

    def test_model_file(self, capsys, tmp_path):
        spec = tmp_path / "m.toml"
        spec.write_text("ordinary = 0\nspecial = 1\nworlds = 2\n")
        assert run(capsys, "valid", "p -> box p", "--model", str(spec))[0] == 1


def test_eval_formula_and_terms(capsys):
    code, d = run_json(capsys, "eval", "F(x)", "--let", "x=o0", "--let", "F=P1")
    assert code == 0 and d["table"] == [[True]]
    assert run_json(capsys, "eval", "(the y. A!(y))")[1]["denotation"] == "improper"
    assert run_json(capsys, "eval", "(the y. O!(y))")[1]["denotation"] == "o0"


def test_countermodel(capsys):
    code, d = run_json(capsys, "countermodel", "p -> box p", "--max-worlds", "2")
    assert code == 0 and d["countermodel"]["model"]["worlds"] == 2
    assert run(capsys, "countermodel", "p -> p")[0] == 1


def test_comprehend(capsys):
    code, d = run_json(capsys, "comprehend", "F = G", "--let", "G=P1")
    assert code == 0 and d["encodes"] == ["P1"]


def test_axioms(capsys):
    code, d = run_json(capsys, "axioms", "--model", "m0")
    assert code == 0 and d["all_valid"] and len(d["results"]) >= 20


def test_barcan(capsys):
    code, d = run_json(capsys, "barcan", "--model", "m0")
    assert code == 0 and d["audit"]["failed"] == []


class TestParadox:
    def test_gate(self, capsys):
        code, _, err = run(capsys, "paradox")
        assert code == 2 and err.startswith("error: gate:")

    def test_syntactic(self, capsys):
        code, d = run_json(capsys, "paradox", "--enable-unsound-beta")
        assert code == 0 and d["verdict"] == "contradiction-derived"

    def test_semantic(self, capsys):
        code, d = run_json(capsys, "paradox", "--route", "semantic")
        assert code == 0 and d["witness"] == "a4"

    def test_flag_only_for_syntactic(self, capsys):
        assert run(capsys, "paradox", "--route", "semantic", "--enable-unsound-beta")[0] == 2


def test_prove_taut(capsys):
    assert run(capsys, "prove-taut", "p | ~p")[1] == "0 TAUT - p | ~p\n"
    code, d = run_json(capsys, "prove-taut", "p -> q")
    assert code == 1 and d["valuation"] == {"p": True, "q": False}


class TestCheckTrace:
    def test_ok(self, capsys, tmp_path):
        f = tmp_path / "t.txt"
        f.write_text(kn.derive_barcan_diamond().trace.serialize())
        code, d = run_json(capsys, "check-trace", str(f))
        assert code == 0 and d["ok"] and d["theorem"]

    def test_extension_needed(self, capsys, tmp_path):
        f = tmp_path / "t.txt"
        f.write_text(px.clark_boolos_derivation(True).trace.serialize())
        assert run(capsys, "check-trace", str(f))[0] == 1
        code, d = run_json(capsys, "check-trace", str(f), "--enable-unsound-beta")
        assert code == 0 and not d["theorem"]

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "check-trace", str(tmp_path / "nope"))[0] == 2


@pytest.mark.parametrize("argv, kind", [
    (["valid", "p ->"], "syntax"),
    (["bogus"], "usage"),
    (["valid", "p", "--model", "m9"], "usage"),
    (["valid", "p", "--size", "1,1"], "usage"),
    (["valid", "p", "--size", "1,1,1,1", "--model", "m0"], "usage"),
    (["valid", "p", "--size", "0,0,1,1"], "model"),
    (["valid", "p", "--size", "2,2,2,2"], "budget"),
    (["valid", "p", "--budget-objects", "0"], "usage"),
    (["valid"], "usage"),
])
def test_errors(capsys, argv, kind):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith(f"error: {kind}:") and err.count("\n") == 1
    code, d = run_json(capsys, *argv)
    assert code == 2 and d == {"ok": False, "error": {"kind": kind, "message": d["error"]["message"]}}


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "aot", "parse", "p & q"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("formula: p & q")
