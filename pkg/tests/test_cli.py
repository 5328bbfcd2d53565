import csv
import io
import json

from conicpoints.cli import main



def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _coeffs_json():
    from conicpoints.quadform import Q0 as form
    return json.dumps(form.form.to_json())


def _special_json():
    from conicpoints.quadform import Q1
    return json.dumps(Q1.to_json())


def test_complete(capsys):
    code, out, _ = _run(capsys, "complete", "--vector", "6,10,15")
    data = json.loads(out)
    assert code == 0 and data["spec_version"]
    assert [r[1] for r in data["M"]] == [6, 10, 15]


def test_count_json_and_csv(capsys):
    code, out, _ = _run(capsys, "count", "--form", _coeffs_json(), "--B", "10", "--method", "both")
    data = json.loads(out)
    assert code == 0 and data["n_param"] == data["n_brute"] == 32 and "spec_version" in data
    code, out, _ = _run(capsys, "count", "--form", _coeffs_json(), "--B", "1,4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["n_param"] for r in rows] == ["8", "16"]


def test_rho_and_param(capsys):
    code, out, _ = _run(capsys, "rho", "--form", _special_json(), "--n", "88")
    assert code == 0 and json.loads(out)["rho_star"] == 40
    code, out, _ = _run(capsys, "param", "--form", _special_json(), "--s", "1", "--t", "2")
    data = json.loads(out)
    assert code == 0 and len(data["point"]) == 3


def test_zeros_and_constant(capsys):
    code, out, _ = _run(capsys, "zeros", "--form", _coeffs_json())
    assert code == 0
    code, out, _ = _run(capsys, "constant", "--form", _coeffs_json(), "--compare-cprime")
    data = json.loads(out)
    assert code == 0 and abs(data["c_Q"] - 24 / 3.141592653589793**2) < 1e-6


def test_usage_errors(capsys):
    assert _run(capsys, "count", "--B", "5")[0] == 2
    assert _run(capsys, "count", "--form", "{not json", "--B", "5")[0] == 2
    assert _run(capsys, "zeros", "--form", '{"coeffs": [1, 0, 0, 1, 0, 1]}')[0] == 2
    assert _run(capsys, "corpus", "--count", "0")[0] == 2
    assert _run(capsys, "--threads", "0", "corpus")[0] == 2
    assert _run(capsys, "nosuch")[0] == 2


def test_corpus_verify_roundtrip(capsys, tmp_path):
    path = tmp_path / "corpus.json"
    code, _, _ = _run(capsys, "--out", str(path), "corpus", "--count", "2", "--height", "8", "--seed", "1")
    assert code == 0 and json.loads(path.read_text())["spec_version"]
    code, out, _ = _run(capsys, "verify", "--corpus", str(path), "--B-max", "15")
    assert code == 0 and json.loads(out)["passed"]


def test_config_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"count": {"form": _coeffs_json(), "B": "4"}}))
    code, out, _ = _run(capsys, "--config", str(cfg), "count")
    assert code == 0 and json.loads(out)["n_param"] == 16


def test_sweep_csv(capsys):
    code, out, _ = _run(capsys, "sweep", "--form", _coeffs_json(), "--B", "10,100", "--form-id", "Q0")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "form_id,B,N,cB,abs_err,norm_err,elapsed_ms" and len(lines) == 3
