import io
import json
import subprocess
import sys

import pytest

from rangemaps.cli import cli_main


def run(argv, stdin=None, capsys=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli_main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def gen(tmp_path, capsys):
    def make(kind, seed=0, *extra):
        path = tmp_path / f"{kind}-{seed}.json"
        assert cli_main(["gen", "--kind", kind, "--seed", str(seed), "--report", str(path), *extra]) == 0
        capsys.readouterr()
        return path

    return make


def test_verify_composition_exit_zero(gen, tmp_path, capsys):
    spec = gen("composition", 3)
    report = tmp_path / "r.json"
    assert cli_main(["verify", "--instance", str(spec), "--report", str(report)]) == 0
    out = json.loads(report.read_text())
    assert out["verdict"] == "composition-consistent"
    assert out["instance"] == {"kind": "composition", "schema": 1}
    assert out["symbol"]["table"] == json.loads(spec.read_text())["map"]["symbol"]["table"]


def test_verify_averaging_exit_one(gen, capsys):
    code, out, _ = run(["verify", "--instance", str(gen("averaging", 1))], capsys=capsys)
    assert code == 1
    kinds = [w["kind"] for w in json.loads(out)["witnesses"]]
    assert "ambiguity" in kinds and "range-violation" in kinds


def test_malformed_json_exit_two(capsys, monkeypatch):
    code, out, err = run(["verify"], stdin="{not json", capsys=capsys, monkeypatch=monkeypatch)
    assert code == 2 and out == ""
    assert "malformed input" in err and "stdin" in err


def test_bad_schema_exit_two(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"schema": 7}))
    code, _, err = run(["extract", "--instance", str(p)], capsys=capsys)
    assert code == 2 and "schema" in err


def test_missing_file_exit_two(tmp_path, capsys):
    code, _, err = run(["verify", "--instance", str(tmp_path / "none.json")], capsys=capsys)
    assert code == 2 and "cannot read" in err


def test_unknown_subcommand_exit_two(capsys):
    assert cli_main(["frobnicate"]) == 2


def test_extract_reports_symbol(gen, capsys):
    code, out, _ = run(["extract", "--instance", str(gen("composition", 5))], capsys=capsys)
    res = json.loads(out)
    assert code == 0 and res["symbol"] is not None and res["residuals"]["ambiguous_points"] == []


def test_oracle_agrees(gen, capsys):
    for kind in ("composition", "averaging", "perturbed-composition"):
        code, out, _ = run(["oracle", "--instance", str(gen(kind, 2))], capsys=capsys)
        assert code == 0 and json.loads(out)["agree"], kind


def test_gen_is_deterministic(capsys):
    a = run(["gen", "--kind", "rotation", "--seed", "8"], capsys=capsys)
    b = run(["gen", "--kind", "rotation", "--seed", "8"], capsys=capsys)
    assert a == b and a[0] == 0
    assert json.loads(a[1])["map"]["kind"] == "rotation"


def test_gen_bad_constraints_exit_two(capsys):
    code, _, err = run(["gen", "--kind", "rotation", "--dim", "1"], capsys=capsys)
    assert code == 2 and "d = 2" in err


def test_ks_check(tmp_path, capsys, monkeypatch):
    base = {"schema": 1, "space": {"labels": ["a", "b"]}, "exhaustive": True, "tol": 0}
    ok = json.dumps({**base, "functional": {"kind": "evaluation", "point": "b"}})
    code, out, _ = run(["ks-check"], stdin=ok, capsys=capsys, monkeypatch=monkeypatch)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "ks-consistent" and rep["conclusion"]["point"] == "b"
    bad = json.dumps({**base, "functional": {"kind": "conjugate", "point": "a"}})
    code, out, _ = run(["ks-check"], stdin=bad, capsys=capsys, monkeypatch=monkeypatch)
    assert code == 1 and json.loads(out)["hypothesis"]["witness"]["rule"] == "spectrum"
    nope = json.dumps({**base, "functional": {"kind": "nope"}})
    code, _, _ = run(["ks-check"], stdin=nope, capsys=capsys, monkeypatch=monkeypatch)
    assert code == 2


def test_approx(capsys, monkeypatch):
    inst = {
        "schema": 1,
        "space": {"labels": ["0", "0.5", "1"], "metric": [[0, 0.5, 1], [0.5, 0, 0.5], [1, 0.5, 0]]},
        "model": 1,
        "function": {"values": {"0": [[0, 0]], "0.5": [[0.5, 0]], "1": [[1, 0]]}},
        "neighborhood": {"bounds": [{"seminorm": 0, "radius": 0.6}]},
    }
    code, out, _ = run(["approx"], stdin=json.dumps(inst), capsys=capsys, monkeypatch=monkeypatch)
    rep = json.loads(out)
    assert code == 0
    assert rep["certificate"] == {"cover_centers": ["0", "1"], "in_V": True, "errors_per_seminorm": [0.5]}
    code, out, _ = run(
        ["approx", "--strategy", "hat"], stdin=json.dumps(inst), capsys=capsys, monkeypatch=monkeypatch
    )
    assert code == 0 and json.loads(out)["strategy"] == "hat"


def test_tol_and_pairs_flags_reach_config(gen, capsys):
    code, out, _ = run(
        ["verify", "--instance", str(gen("composition", 1)), "--tol", "0", "--pairs", "40", "--seed", "3"],
        capsys=capsys,
    )
    cfg = json.loads(out)["config"]
    assert code == 0 and cfg["tol"] == 0 and cfg["pairs"] == 40 and cfg["seed"] == 3


def test_module_entry_point(gen):
    spec = gen("constant", 0)
    proc = subprocess.run(
        [sys.executable, "-m", "rangemaps", "verify", "--instance", str(spec)], capture_output=True, text=True
    )
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["witnesses"][0]["kind"] == "range-violation"
