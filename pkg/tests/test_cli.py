import json

import numpy as np
import pytest

from allpass.cli import run
from allpass.io import read_report, read_series
from allpass.simulate import simulate_allpass
from allpass.noise import Laplace

QUICK = ["--starts", "60", "--refine", "2"]


@pytest.fixture
def series(tmp_path):
    path = tmp_path / "x.csv"
    assert run(["simulate", "--phi", "0.5", "--n", "600", "--seed", "1", "-o", str(path)]) == 0
    return path


def config_of(path):
    for line in path.read_text().splitlines():
        if line.startswith("# config: "):
            return json.loads(line[len("# config: "):])
    raise AssertionError("no config header")


def test_simulate_round_trip_is_bit_exact(series):
    x = read_series(series)
    expected = simulate_allpass([0.5], Laplace(1.0), 600, seed=1).x
    assert x.size == 600
    np.testing.assert_array_equal(x, expected)
    assert config_of(series)["seed"] == 1


def test_fit_report(series, tmp_path):
    out = tmp_path / "fit.txt"
    assert run(["fit", "-i", str(series), "--p", "1", *QUICK, "-o", str(out)]) == 0
    rep = read_report(out)
    phi = float(rep["phi_hat"])
    assert abs(phi - 0.5) < 0.15
    assert float(rep["ci_lower"]) < phi < float(rep["ci_upper"])
    assert config_of(out)["p"] == 1


def test_order_select(series, tmp_path):
    out = tmp_path / "ord.txt"
    assert run(["order-select", "-i", str(series), "--P", "2", *QUICK, "-o", str(out)]) == 0
    rep = read_report(out)
    assert rep["selected_r"] == "1"
    assert rep["at_boundary"] == "false"


def test_are_table(tmp_path):
    out = tmp_path / "are.csv"
    assert run(["are-table", "--weights", "wilcoxon", "--noise", "logistic", "laplace",
                "-o", str(out)]) == 0
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = [dict(zip(header, ln.split(","))) for ln in lines[1:]]
    assert rows[0]["ARE_R_to_ML"] == "1.000"
    assert rows[0]["ARE_R_to_LAD"] == "1.976"
    assert rows[1]["ARE_R_to_LAD"] == "0.600"


def test_diagnose(series, tmp_path):
    out = tmp_path / "acf.csv"
    assert run(["diagnose", "-i", str(series), "--max-lag", "5", "-o", str(out)]) == 0
    data = np.loadtxt(out, delimiter=",", comments="#", skiprows=3)
    assert data.shape == (5, 5)
    np.testing.assert_array_equal(data[:, 0], np.arange(1, 6))


def test_deconv_with_prefit(tmp_path):
    from allpass.noise import StudentT
    from allpass.simulate import simulate_ma, wavelet_from_roots

    x = simulate_ma(wavelet_from_roots([0.7, 0.8, -2.5]), StudentT(5), 3000, seed=7).x
    src = tmp_path / "ma.csv"
    np.savetxt(src, x, fmt="%.17g")
    out, diag = tmp_path / "deconv.txt", tmp_path / "diag.csv"
    assert run(["deconv", "-i", str(src), "--prefit-ar", "30", "--P", "2",
                "--diagnostics", str(diag), "-o", str(out)]) == 0
    assert read_report(out)["selected_r"] == "2"
    assert diag.exists()


def test_mc_study(tmp_path):
    out = tmp_path / "mc.csv"
    assert run(["mc-study", "--phi", "0.5", "--n", "200", "300", "--replicates", "3",
                *QUICK, "--workers", "1", "-o", str(out)]) == 0
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert lines[0].startswith("n,coefficient,true,asymptotic_sd,mean,sd,coverage_pct")
    assert len(lines) == 3


def test_mc_study_order_select(tmp_path):
    out = tmp_path / "mc.csv"
    assert run(["mc-study", "--phi", "0.5", "--n", "300", "--replicates", "2",
                "--order-select", "2", *QUICK, "-o", str(out)]) == 0
    header = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")][0]
    assert header.endswith("r0,r1,r2,undetermined")


def test_config_file_defaults_and_override(series, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "starts": 60}))
    out = tmp_path / "fit.txt"
    assert run(["fit", "--config", str(cfg), "-i", str(series), "--p", "1", "--refine", "2",
                "--seed", "4", "-o", str(out)]) == 0
    conf = config_of(out)
    assert conf["starts"] == 60 and conf["seed"] == 4


def test_unknown_config_key(series, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["fit", "--config", str(cfg), "-i", str(series), "--p", "1"]) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["kind"] == "usage"


@pytest.mark.parametrize("argv", [
    [],
    ["fit", "--p", "1"],
    ["simulate", "--phi", "0.5", "--n", "10", "--bogus"],
    ["simulate", "--phi", "1.5", "--n", "10"],
    ["fit", "-i", "/nonexistent/file.csv", "--p", "1"],
])
def test_usage_errors(argv):
    assert run(argv) == 1


def test_numeric_error_exit_code(capsys):
    assert run(["are-table", "--noise", "gaussian"]) == 2
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["kind"] == "numeric"
