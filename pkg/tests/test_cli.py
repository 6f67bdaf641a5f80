import csv
import io
import json

import pytest

from narmax_interval.cli import main

LOGISTIC = "y(k) = 3.99*y(k-1)*(1 - y(k-1))"
SINE_F = "y(k) = 2.6868*y(k-1) - 0.2462*y(k-1)^3"
SINE_G = "y(k) = 2.6868*y(k-1) - (0.2462*y(k-1))*y(k-1)^2"
FLEXIBLE = (
    "y(k) = 1.41833*y(k-1) - 1.58939*y(k-2) + 1.31608*y(k-3) - 0.88642*y(k-4)"
    " + 0.28261*u(k-3) + 0.50666*u(k-4)"
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_logistic(capsys):
    code, out, err = run(capsys, "run", "--model", LOGISTIC, "--x0", "0.2", "--n", "5")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["n", "lo", "hi", "width", "midpoint"]
    assert len(table) == 5
    assert f"{float(table[4]['midpoint']):.15f}" == "0.821645072786575"
    assert err.startswith("n=5 width=")


def test_run_model_file_with_step(capsys, tmp_path):
    p = tmp_path / "flex.mdl"
    p.write_text("# ARX\n" + FLEXIBLE + "\n")
    code, out, _ = run(capsys, "run", "--model-file", str(p), "--x0", "0.1", "--n", "5",
                       "--input", "step:1:1")
    assert code == 0
    assert f"{float(rows(out)[4]['midpoint']):.15f}" == "0.815130000000000"


def test_identity_map_rows(capsys):
    code, out, _ = run(capsys, "run", "--model", "y(k) = 1*y(k-1)", "--x0", "0.5", "--n", "4")
    assert code == 0
    for r in rows(out):
        assert (float(r["lo"]), float(r["hi"]), float(r["width"])) == (0.5, 0.5, 0.0)


def test_run_json(capsys):
    code, out, _ = run(capsys, "run", "--model", LOGISTIC, "--x0", "0.2", "--n", "3",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and [p["n"] for p in doc] == [1, 2, 3]
    assert doc[0]["enclosure"] == {"lo": 0.2, "hi": 0.2}


def test_run_point(capsys):
    code, out, _ = run(capsys, "run", "--model", LOGISTIC, "--x0", "0.2", "--n", "2", "--point")
    assert code == 0
    assert out.splitlines()[0] == "n,value"


def test_run_tight_mode_is_wider(capsys):
    _, deg, _ = run(capsys, "run", "--model", LOGISTIC, "--x0", "0.2", "--n", "5")
    _, tight, _ = run(capsys, "run", "--model", LOGISTIC, "--x0", "0.2", "--n", "5",
                      "--mode", "tight")
    assert float(rows(tight)[4]["width"]) > float(rows(deg)[4]["width"])


def test_hex_floats_byte_stable(capsys, tmp_path):
    outs = []
    for i in range(2):
        f = tmp_path / f"o{i}.csv"
        code, stdout, _ = run(capsys, "run", "--model", SINE_F, "--x0", "0.1", "--n", "20",
                              "--hex-floats", "-o", str(f))
        assert code == 0 and stdout.startswith("n=20")
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]
    last = rows(outs[0].decode())[-1]
    assert float.fromhex(last["lo"]) <= float.fromhex(last["hi"])


def test_case_single(capsys):
    code, out, err = run(capsys, "case", "logistic", "--x0", "0.6")
    assert code == 0
    table = rows(out)
    assert len(table) == 4 and all(r["pass"] == "true" for r in table)
    assert "4/4 rows pass" in err


def test_case_json(capsys):
    code, out, _ = run(capsys, "case", "sine", "--format", "json", "--jobs", "2")
    doc = json.loads(out)
    assert code == 0
    assert "mean_midpoint_diff" in json.dumps(doc)


def test_case_all(capsys):
    code, out, err = run(capsys, "case", "all")
    assert len(rows(out)) == 48
    assert code == 0, err


@pytest.mark.parametrize("argv", [
    ["case", "nosuch"],
    ["case", "logistic", "--x0", "0.3"],
    ["case", "all", "--x0", "0.2"],
])
def test_case_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_diverge_band(capsys, tmp_path):
    f = tmp_path / "d.csv"
    code, out, _ = run(capsys, "diverge", "--model-a", SINE_F, "--model-b", SINE_G,
                       "--x0", "0.1", "--n", "100", "-o", str(f))
    assert code == 0
    idx = int(out.strip().rsplit(" ", 1)[1])
    assert 30 <= idx <= 80
    series = rows(f.read_text())
    assert list(series[0]) == ["n", "a", "b", "absdiff"]
    assert max(float(r["absdiff"]) for r in series[:20]) < 1e-3


def test_diverge_identical_models(capsys):
    code, _, err = run(capsys, "diverge", "--model-a", SINE_F, "--model-b", SINE_F,
                       "--x0", "0.1", "--n", "50")
    assert code == 0 and "divergence index: none" in err


def test_diverge_threshold_zero(capsys):
    code, _, err = run(capsys, "diverge", "--model-a", SINE_F, "--model-b", SINE_G,
                       "--x0", "0.1", "--n", "30", "--threshold", "0")
    assert code == 0
    assert int(err.strip().rsplit(" ", 1)[1]) < 30


def test_diverge_lag_mismatch(capsys):
    code, _, err = run(capsys, "diverge", "--model-a", SINE_F,
                       "--model-b", "y(k) = 0.5*y(k-2)", "--x0", "0.1", "--n", "5")
    assert code == 2 and "different lags" in err


@pytest.mark.parametrize("argv", [
    ["run", "--model", LOGISTIC, "--x0", "0.2", "--n", "5", "--bogus"],
    ["run", "--x0", "0.2", "--n", "5"],
    ["run", "--model", "y(k) = 2 y(k-1)", "--x0", "0.2", "--n", "5"],
    ["run", "--model", LOGISTIC, "--x0", "abc", "--n", "5"],
    ["run", "--model", LOGISTIC, "--x0", "0.2", "--n", "0"],
    ["run", "--model", LOGISTIC, "--x0", "0.2", "--n", "5", "--input", "pulse"],
    ["run", "--model-file", "/nonexistent/m.mdl", "--x0", "0.2", "--n", "5"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_evaluation_error_exit_3(capsys):
    code, _, err = run(capsys, "run", "--model", "y(k) = 1/(y(k-1) - 0.5)", "--x0", "0.5",
                       "--n", "3")
    assert code == 3
    assert err.startswith("error: evaluation failed at n=2")


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    for name in ("logistic", "sine", "flexible", "r=3.99", "step:1:1"):
        assert name in out
