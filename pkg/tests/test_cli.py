import csv
import io
import json
import math
from pathlib import Path

import pytest

from gzsys.cli import run

GOLDEN = Path(__file__).parent / "golden"


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def same(a, b, tol=1e-9):
    if isinstance(a, dict):
        return isinstance(b, dict) and a.keys() == b.keys() and all(same(a[k], b[k], tol) for k in a)
    if isinstance(a, list):
        return isinstance(b, list) and len(a) == len(b) and all(same(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, float) and isinstance(b, float):
        return math.isclose(a, b, rel_tol=tol, abs_tol=tol)
    return a == b


def test_fiber_example():
    code, out = call("fiber", "--lambda", "2,1,0", "--pattern", "[[1],[1,1],[2,1,0]]", "--seed", "7")
    rep = json.loads(out)
    assert code == 0 and rep["total_dim"] == 3 and rep["consistent"] is True


def test_interlace_example():
    code, out = call("interlace", "--pattern", "[[5],[2,0]]")
    assert code == 1 and len(json.loads(out)["violations"]) == 1
    code, out = call("interlace", "--pattern", "[[1],[2,0]]")
    assert code == 0 and json.loads(out)["valid"]


def test_bracket_check_example():
    code, out = call("bracket-check", "--lambda", "3,1,0", "--samples", "100", "--seed", "1")
    rep = json.loads(out)
    assert code == 0 and rep["max_abs_bracket"] <= 1e-6 and rep["pairs"] == 1500


@pytest.mark.parametrize(
    "name, argv",
    [
        ("fiber_s3.json", ["--lambda", "2,1,0", "--pattern", "[[1],[1,1],[2,1,0]]"]),
        ("fiber_t3.json", ["--lambda", "2,1,0", "--pattern", "[[1],[1.5,0.5],[2,1,0]]"]),
        ("fiber_sphere_pole.json", ["--lambda", "1,0", "--pattern", "[[1],[1,0]]"]),
        ("fiber_sphere_circle.json", ["--lambda", "1,0", "--pattern", "[[0.5],[1,0]]"]),
    ],
)
def test_golden_reports(name, argv):
    code, out = call("fiber", *argv, "--seed", "7")
    assert code == 0
    assert same(json.loads(out), json.loads((GOLDEN / name).read_text()))


def test_output_is_byte_reproducible(monkeypatch):
    args = ("survey", "--lambda", "2,1,0", "--samples", "8", "--seed", "3")
    monkeypatch.setenv("GZ_THREADS", "1")
    a = call(*args)
    monkeypatch.setenv("GZ_THREADS", "4")
    b = call(*args)
    assert a == b and a[0] == 0
    assert len(a[1].splitlines()) == 8


def test_survey_csv_summary(tmp_path):
    path = tmp_path / "summary.csv"
    code, _ = call("survey", "--lambda", "1,0", "--samples", "5", "--output", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["index", "pattern_digest", "total_dim", "oracle_dim", "consistent"]
    assert len(rows) == 6


def test_flow_json_and_csv(tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"kind": "hermitian", "n": 2, "re": [[1, 1], [1, 1]], "im": [[0, 0], [0, 0]]}))
    path = tmp_path / "trace.csv"
    code, out = call("flow", "--input", str(m), "--hamiltonian", "entry:1,1", "--record-every", "1000",
                     "--output", str(path), "--format", "csv")
    rep = json.loads(out)
    assert code == 0 and rep["closure"] < 1e-6 and rep["spectrum_drift"] <= 1e-7
    assert path.read_text().startswith("t,re_00")


def test_other_commands(tmp_path):
    code, out = call("polytope", "--lambda", "2,1,0")
    assert code == 0 and len(json.loads(out)["inequalities"]) == 6
    code, out = call("reconstruct", "--pattern", "[[1],[2,0]]")
    assert code == 0 and json.loads(out)["roundtrip_error"] < 1e-12
    code, out = call("chain", "--lambda", "2,1", "--group", "SO", "--n", "5")
    assert code == 0 and [e["level"] for e in json.loads(out)["per_level"]] == [5, 4, 3, 2]
    code, out = call("eval", "--lambda", "2,1,0", "--seed", "4")
    rep = json.loads(out)
    assert code == 0 and rep["stratum"]["multiplicities"] == [1, 1, 1]


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lambda": [1, 1, 0], "seed": 5}))
    code, out = call("polytope", "--config", str(cfg))
    assert code == 0 and json.loads(out)["lambda"] == [1.0, 1.0, 0.0]
    code, out = call("polytope", "--config", str(cfg), "--lambda", "2,1,0")
    assert json.loads(out)["lambda"] == [2.0, 1.0, 0.0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert call("polytope", "--config", str(bad))[0] == 2


def test_exit_codes(tmp_path):
    assert call("polytope")[0] == 2
    assert call("eval", "--input", str(tmp_path / "missing.json"))[0] == 2
    assert call("bogus")[0] == 2
    assert call("survey", "--lambda", "2,1,0", "--samples", "0")[0] == 2
    assert call("eval", "--lambda", "1,0", "--tol", "-1")[0] == 2
    m = tmp_path / "bad.json"
    m.write_text(json.dumps({"kind": "hermitian", "n": 2, "re": [[1, 2], [1, 1]], "im": [[0, 0], [0, 0]]}))
    assert call("eval", "--input", str(m))[0] == 1
    assert call("fiber", "--lambda", "2,1,0", "--pattern", "[[5],[1,1],[2,1,0]]")[0] == 1


def test_strict_fiber_passes_when_consistent():
    code, _ = call("fiber", "--lambda", "2,1,0", "--pattern", "[[1],[1,1],[2,1,0]]", "--strict")
    assert code == 0


def test_help_documents_seed_splitting(capsys):
    assert call("--help")[0] == 0
    text = capsys.readouterr().out
    assert "splitmix64" in text and "GZ_THREADS" in text
