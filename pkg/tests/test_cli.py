import csv
import io
import json

import pytest

from thermoplate.cli import read_config, run, to_csv


def run_capture(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_roots_csv(capsys):
    code, out, _ = run_capture(capsys, "roots", "--sigma", "1", "--rmin", "1e-3", "--rmax", "1e3", "--points", "200")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["r", "lambda1", "lambdaR", "lambdaI"]
    assert len(rows) == 200
    assert all(float(r["lambda1"]) < 0 and float(r["lambdaR"]) < 0 for r in rows)


def test_seventeen_significant_digits(capsys):
    _, out, _ = run_capture(capsys, "roots", "--sigma", "1", "--rmin", "0.5", "--rmax", "0.6", "--points", "3")
    value = out.splitlines()[1].split(",")[1]
    assert len(value.lstrip("-").replace(".", "").split("e")[0].lstrip("0")) == 17


def test_missing_flag_exit_1(capsys):
    code, out, err = run_capture(capsys, "roots")
    assert code == 1
    assert out == ""
    assert "usage" in err and "--sigma" in err


def test_validation_names_field(capsys):
    code, _, err = run_capture(capsys, "rates", "--tmin", "0.5")
    assert code == 1 and "tmin" in err
    code, _, err = run_capture(capsys, "table1", "--dims", "1,9")
    assert code == 1 and "dims" in err
    code, _, err = run_capture(capsys, "bounds", "--families", "nope")
    assert code == 1 and "families" in err
    code, _, err = run_capture(capsys, "profile", "--sigma", "0")
    assert code == 1 and "sigma" in err


def test_numerical_failure_exit_2(capsys):
    code, out, err = run_capture(capsys, "roots", "--sigma", "1", "--points", "3")
    assert code == 2 and out == "" and "numerical failure" in err


def test_json_output(capsys):
    code, out, _ = run_capture(capsys, "bounds", "--families", "est-01,large-bdd", "--points", "16", "--format", "json")
    assert code == 0
    recs = json.loads(out)
    assert [r["family"] for r in recs] == ["est-01", "large-bdd"]
    assert recs[0]["rate"] is None and recs[1]["rate"] > 0


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# roots manifest\nsigma = 2\nrmin = 0.5\nrmax = 0.6\npoints = 4\nformat = json\n")
    assert read_config(cfg)["points"] == "4"
    code, out, _ = run_capture(capsys, "roots", "--config", str(cfg), "--points", "3")
    assert code == 0
    recs = json.loads(out)
    assert len(recs) == 3 and recs[0]["r"] == 0.5
    bad = tmp_path / "bad.cfg"
    bad.write_text("sigma 2\n")
    code, _, err = run_capture(capsys, "roots", "--config", str(bad))
    assert code == 1 and "key = value" in err
    code, _, err = run_capture(capsys, "roots", "--config", str(tmp_path / "missing.cfg"), "--sigma", "1")
    assert code == 1 and "config" in err


def test_deterministic_file_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["profile", "--dims", "1", "--tpoints", "3"]
    assert run([*args, "--out", str(a)]) == 0
    assert run([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("n,t,ratio,decrease\n")


def test_simulate_agrees_with_oracles(capsys):
    code, out, _ = run_capture(capsys, "simulate", "--sigma", "1", "--r", "0.1,1,5", "--t", "0,1,10")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    assert max(float(r["rel_dev"]) for r in rows) < 1e-7


def test_kernels(capsys):
    code, out, _ = run_capture(capsys, "kernels", "--dims", "2,4", "--ks", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    power = [r for r in rows if r["kernel"] == "power"]
    for r in power:
        assert float(r["exponent"]) == pytest.approx(float(r["expected"]), abs=0.02)
    sine = [r for r in rows if r["kernel"] == "sine"]
    assert len(sine) == 1 and float(sine[0]["drift"]) < 0.10


def test_rates_and_table1(capsys):
    code, out, _ = run_capture(capsys, "rates", "--dims", "2", "--tpoints", "5")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["exponent"]) == pytest.approx(0.5, abs=0.05)
    code, out, _ = run_capture(capsys, "table1", "--dims", "1", "--tpoints", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["model", "n", "fit_model", "exponent", "r_squared"]
    assert [r["model"] for r in rows] == ["pure-plate", "sigma=0", "sigma=1"]


def test_to_csv_quotes_fields():
    text = to_csv([{"grid": "a, b", "x": 0.1, "ok": True}])
    assert text == 'grid,x,ok\n"a, b",0.10000000000000001,true\n'
    assert to_csv([]) == ""
