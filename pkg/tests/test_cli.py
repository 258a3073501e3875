import json
import shutil
import subprocess

import pytest

from mvcanal.cli import main

CE = {"arities": [3, 3], "codomain": 3, "values": [2, 0, 0, 1, 1, 1, 2, 0, 2]}


@pytest.fixture
def ce_file(tmp_path):
    p = tmp_path / "ce.json"
    p.write_text(json.dumps(CE))
    return str(p)


def test_check_counterexample(ce_file, capsys):
    assert main(["check", ce_file, "--props", "wnc,snc"]) == 0
    assert capsys.readouterr().out == "wnc=yes\nsnc=no\n"


def test_check_json_with_witness(ce_file, capsys):
    assert main(["check", ce_file, "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["nc"]["value"] is False
    assert data["wnc"]["witness"]["steps"][0] == {"coord": 0, "value": 1, "output": 1}
    assert data["boolnc"]["value"] is False
    assert data["boolnc"]["components"]["2"] is None


def test_check_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"arities": [3], "codomain": 3, "values": [0, 1, 2]})))
    assert main(["check", "-", "--props", "snc"]) == 0
    assert capsys.readouterr().out == "snc=yes\n"


def test_check_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", str(bad)]) == 3
    assert main(["check", str(tmp_path / "missing.json")]) == 3
    good = tmp_path / "g.json"
    good.write_text(json.dumps(CE))
    assert main(["check", str(good), "--props", "foo"]) == 3


def test_booleanize(ce_file, capsys):
    assert main(["booleanize", ce_file]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["bits"] == [[0, 1], [0, 2], [1, 1], [1, 2]]
    assert [c["threshold"] for c in data["components"]] == [1, 2]
    assert len(data["components"][0]["admissible"]) == 9


def test_count_snc_arities(capsys):
    assert main(["count-snc", "--arities", "3"]) == 0
    assert "upSNC[3] = 99" in capsys.readouterr().out
    assert main(["count-snc", "--arities", "2,2", "--method", "enumerate", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["up_snc"] == "180"


@pytest.mark.parametrize("n,shown", [(1, "1"), (2, "0.83"), (3, "8.5e-7"), (4, "1.0e-29"), (5, "5.6e-104")])
def test_count_snc_nbvars(n, shown, capsys):
    assert main(["count-snc", "--nbvars", str(n)]) == 0
    assert f"bound = {shown}\n" in capsys.readouterr().out


def test_count_snc_guards(capsys):
    assert main(["count-snc", "--nbvars", "7"]) == 3
    assert main(["count-snc", "--nbvars", "0"]) == 3
    assert main(["count-snc", "--arities", "4"]) == 3
    assert main(["count-snc", "--arities", "3,3,3", "--method", "enumerate", "--max-decompositions", "5"]) == 3
    assert main(["count-snc", "--arities", "4", "--generalized"]) == 0


def test_usage_errors_exit_3(capsys):
    with pytest.raises(SystemExit) as e:
        main(["count-snc", "--bogus"])
    assert e.value.code == 3
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 3


def test_analyze(tmp_path, capsys):
    assert main(["analyze"]) == 3
    out = tmp_path / "report.csv"
    code = main(["analyze", "--fixtures", "--out", str(out), "--threads", "2"])
    lines = out.read_text().splitlines()
    assert lines[0] == "gene,model,n,nc,snc,wnc,bool_nc,situation,structure_s"
    assert len(lines) == 49
    err = capsys.readouterr().err
    # 0 only when every classification matches the published tables
    assert code == (2 if "mismatch" in err else 0)


def test_analyze_single_model(tmp_path, capsys):
    p = tmp_path / "m.mvr"
    p.write_text("model Mbo13\ngene Der arity 3 input\ngene Drk arity 3 {\n  1 <- Der:1\n  2 <- Der:2\n}\n")
    assert main(["analyze", str(p), "--format", "md"]) == 0
    assert "| Drk | Mbo13 | 1 |" in capsys.readouterr().out


def test_oracle_command(capsys):
    assert main(["oracle", "--arities", "2,2", "--threads", "1"]) == 0
    assert "(2, 2): 81 functions, 0 disagreements" in capsys.readouterr().out


@pytest.mark.skipif(shutil.which("mvcanal") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["mvcanal", "count-snc", "--nbvars", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and "bound = 0.83" in r.stdout
