import json

import pytest

from lea.cli import main

LOOP = '{"worlds": ["s"], "rel": [["s", "s"]], "val": {"p": ["s"]}}'
ISOLATED = '{"worlds": ["t"], "rel": [], "val": {"p": ["t"]}}'
SERIAL_A = (
    '{"worlds": ["s", "t"], "rel": [["s", "t"], ["t", "t"], ["t", "s"]],'
    ' "val": {"p": ["s"]}, "point": "s"}'
)
SERIAL_B = (
    '{"worlds": ["s2", "t2"], "rel": [["s2", "t2"], ["t2", "s2"]],'
    ' "val": {"p": ["s2"]}}'
)


@pytest.fixture
def models(tmp_path):
    files = {}
    for name, text in (
        ("loop", LOOP),
        ("isolated", ISOLATED),
        ("serial_a", SERIAL_A),
        ("serial_b", SERIAL_B),
    ):
        path = tmp_path / f"{name}.json"
        path.write_text(text)
        files[name] = str(path)
    return files


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check(models, capsys):
    code, out, _ = run(capsys, "check", models["loop"], "s", "o p")
    assert code == 0
    assert out.strip() == "true: o p at s"
    code, out, _ = run(capsys, "check", models["serial_a"], "s", "o p")
    assert code == 1
    # the point recorded in the file is the default world
    code, out, _ = run(capsys, "check", models["serial_a"], "p")
    assert code == 0


def test_bisim_flavors(models, capsys):
    code, _, _ = run(capsys, "bisim", models["loop"], "s", models["isolated"], "t", "--circ")
    assert code == 0
    code, _, _ = run(capsys, "bisim", models["loop"], "s", models["isolated"], "t", "--box")
    assert code == 1
    code, out, _ = run(capsys, "bisim", models["loop"], "s", models["isolated"], "t", "--json")
    payload = json.loads(out)
    assert payload["answer"] is True
    assert ["L:s", "R:t"] in payload["certificate"]["pairs"]


def test_define_symmetric(capsys):
    code, out, _ = run(capsys, "define", "symmetric", "p -> o (o ~p -> p)", "--max-n", "4")
    assert code == 0
    assert out.strip() == "Confirmed up to n=4"
    code, out, _ = run(capsys, "define", "reflexive", "o p", "--json")
    assert code == 1
    payload = json.loads(out)
    assert payload["answer"] is False
    assert payload["witness"]["worlds"]


def test_sat_and_valid(capsys):
    code, out, _ = run(capsys, "sat", "o p & ~p", "--class", "K", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["answer"] is True
    assert payload["method"] == "tableau"
    assert set(payload["witness"]) == {"worlds", "rel", "val", "point"}

    code, out, _ = run(capsys, "valid", "[] p -> p", "--class", "T")
    assert code == 0
    code, out, _ = run(capsys, "valid", "[] p -> p", "--class", "K", "--json")
    assert code == 1
    assert json.loads(out)["witness"] is not None


def test_unknown_is_negative_exit(capsys):
    code, out, _ = run(capsys, "sat", "p & ~p", "--class", "B5")
    assert code == 1
    assert "unknown" in out
    code, out, _ = run(capsys, "sat", "p & ~p", "--class", "B5", "--json")
    assert json.loads(out)["answer"] is None


def test_valid_on_frame(models, capsys):
    code, _, _ = run(capsys, "valid", "[] p -> p", "--frame", models["loop"])
    assert code == 0
    code, out, _ = run(capsys, "valid", "[] p -> p", "--frame", models["isolated"], "--json")
    assert code == 1
    assert json.loads(out)["witness"]["point"] == "t"


def test_translate(capsys):
    code, out, _ = run(capsys, "translate", "to-ml", "o o p")
    assert code == 0
    assert out.strip() == "(p -> [] p) -> [] (p -> [] p)"
    code, out, _ = run(capsys, "translate", "to-lea", "[] [] p")
    assert out.strip() == "o (o p & p) & (o p & p)"
    code, _, err = run(capsys, "translate", "to-lea", "o p")
    assert code == 2
    assert "error" in err


def test_contract(models, capsys):
    code, out, _ = run(capsys, "contract", models["serial_a"])
    assert code == 0
    payload = json.loads(out)
    assert len(payload["worlds"]) == 2
    assert payload["point"] in payload["worlds"]
    assert set(payload["classes"]) == {"s", "t"}


def test_prove_roundtrip(tmp_path, capsys):
    code, out, _ = run(capsys, "genproof", "4")
    assert code == 0
    proof = tmp_path / "conj4.txt"
    proof.write_text(out)
    code, out, _ = run(capsys, "prove", "K", str(proof))
    assert code == 0
    assert "accepted" in out

    broken = tmp_path / "broken.txt"
    broken.write_text("1. o p   [axiom KwTop]\n")
    code, out, _ = run(capsys, "prove", "K", str(broken))
    assert code == 1
    assert "rejected at line 1" in out


def test_genproof_bad_n(capsys):
    code, _, err = run(capsys, "genproof", "1")
    assert code == 2
    assert "at least 2" in err


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "K", "--class", "K", "--max-n", "2")
    assert code == 0
    assert "no failures" in out
    code, out, _ = run(capsys, "scan", "K4", "--class", "K", "--max-n", "3", "--json")
    assert code == 1
    payload = json.loads(out)
    assert payload["answer"] is False
    assert payload["failures"][0]["axiom"] == "KwTr"


@pytest.mark.parametrize(
    "argv",
    [
        ("check", "nosuch.json", "s", "p"),
        ("sat", "p &", "--class", "K"),
        ("sat", "p", "--class", "Q9"),
        ("define", "shiny", "o p"),
        ("sat", "@nosuch.formula", "--class", "K"),
        ("prove", "Z3", "x.txt"),
    ],
)
def test_input_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_unknown_world_is_input_error(models, capsys):
    code, _, err = run(capsys, "check", models["loop"], "zz", "p")
    assert code == 2
    code, _, err = run(capsys, "bisim", models["loop"], "zz", models["isolated"], "t")
    assert code == 2


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sat", "p", "--class", "K", "--frobnicate"])
    assert exc.value.code == 2


def test_global_flag_positions(models, capsys):
    early_code, early_out, _ = run(capsys, "--json", "check", models["loop"], "s", "p")
    late_code, late_out, _ = run(capsys, "check", models["loop"], "s", "p", "--json")
    assert early_code == late_code == 0
    assert early_out == late_out
    assert json.loads(early_out)["answer"] is True


def test_json_deterministic(models, capsys):
    args = ("bisim", models["serial_a"], "s", models["serial_b"], "s2", "--json")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_formula_from_file(tmp_path, capsys):
    path = tmp_path / "f.lea"
    path.write_text("o p & A p\n")
    code, _, _ = run(capsys, "sat", f"@{path}", "--class", "K")
    assert code == 1
