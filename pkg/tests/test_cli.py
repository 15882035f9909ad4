import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from akms import core
from akms.cli import main, read_config, read_samples
from akms.core import AkmsParams

RAY = ["--alpha", "2", "--kappa", "0", "--mu", "1", "--m", "1"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [line for line in text.splitlines() if line and not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_eval_examples(capsys):
    code, out, _ = run(capsys, "eval", *RAY, "--at", "1")
    assert code == 0
    r = rows(out)
    assert float(r[0]["gamma"]) == 1.0
    assert float(r[0]["value"]) == pytest.approx(math.exp(-1), rel=1e-14)
    code, out, _ = run(capsys, "eval", *RAY, "--stat", "cdf", "--at", "0,1")
    assert [float(x["value"]) for x in rows(out)] == pytest.approx([0.0, 1 - math.exp(-1)], rel=1e-13)
    code, out, _ = run(capsys, "eval", *RAY, "--stat", "moment:2")
    assert float(rows(out)[0]["value"]) == pytest.approx(2.0, rel=1e-13)


def test_sweep_matches_eval(capsys):
    base = ["--alpha", "2.3", "--kappa", "3", "--mu", "1.8", "--m", "5.5", "--snr-mean-db", "3"]
    _, out, _ = run(capsys, "sweep", *base, "--var", "threshold_db", "--start", "-3", "--stop", "6",
                    "--points", "2", "--stat", "pdf,cdf")
    sweep = rows(out)
    for r in sweep:
        g = 10 ** (float(r["threshold_db"]) / 10)
        _, out, _ = run(capsys, "eval", *base, "--stat", "cdf", "--at", repr(g))
        assert rows(out)[0]["value"] == r["cdf"]
        _, out, _ = run(capsys, "eval", *base, "--stat", "pdf", "--at", repr(g))
        assert rows(out)[0]["value"] == r["pdf"]


def test_csv_round_trips_exactly(capsys):
    p = AkmsParams(2.3, 3.0, 1.8, 5.5)
    _, out, _ = run(capsys, "eval", "--alpha", "2.3", "--kappa", "3", "--mu", "1.8", "--m", "5.5",
                    "--at", "0.1,0.7,2.2")
    for r in rows(out):
        assert float(r["value"]) == core.pdf(p, float(r["gamma"]))


def test_sweep_columns(capsys):
    code, out, _ = run(capsys, "sweep", *RAY, "--var", "snr_db", "--start", "0", "--stop", "20", "--points", "3",
                       "--stat", "capacity,capacity-asymptotic,outage,outage-asymptotic")
    assert code == 0
    r = rows(out)
    assert list(r[0]) == ["snr_db", "capacity", "awgn", "capacity-asymptotic", "outage", "outage-asymptotic"]
    assert all(float(x["capacity"]) < float(x["awgn"]) for x in r)
    assert float(r[0]["awgn"]) == pytest.approx(1.0)


def test_zero_db_means_unit_mean(capsys):
    _, a, _ = run(capsys, "eval", *RAY, "--at", "0.5")
    _, b, _ = run(capsys, "eval", *RAY, "--at", "0.5", "--snr-mean-db", "0")
    assert rows(a) == rows(b)


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# comment\nalpha = 2\nkappa = 0\nmu = 1\nm = 1\nat = 1\n")
    assert read_config(str(cfg))["alpha"] == "2"
    _, out, _ = run(capsys, "eval", "--config", str(cfg))
    assert float(rows(out)[0]["value"]) == pytest.approx(math.exp(-1))
    _, out, _ = run(capsys, "eval", "--config", str(cfg), "--mu", "2")
    assert float(rows(out)[0]["value"]) == pytest.approx(core.pdf(AkmsParams(2, 0, 2, 1), 1.0))


def test_model_flag(capsys):
    _, a, _ = run(capsys, "eval", "--model", "hoyt,q=0.5", "--at", "1")
    _, b, _ = run(capsys, "eval", "--alpha", "2", "--kappa", "1.5", "--mu", "1", "--m", "0.5", "--at", "1")
    assert rows(a) == rows(b)


def test_sample_files(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert run(capsys, "sample", *RAY, "--n", "1000", "--seed", "4", "--out", str(path))[0] == 0
    assert paths[0].read_text() == paths[1].read_text()
    x, meta = read_samples(str(paths[0]))
    assert x.size == 1000 and np.all(x > 0)
    assert meta["alpha"] == 2.0 and meta["seed"] == 4.0


def test_models(capsys):
    code, out, _ = run(capsys, "models")
    assert code == 0 and len(rows(out)) == 13
    _, out, _ = run(capsys, "models", "hoyt", "q=0.5", "rice", "K=3")
    r = rows(out)
    assert (r[0]["kappa"], r[0]["mu"], r[0]["m"]) == ("1.5", "1.0", "0.5")
    assert r[1]["limit_approximation"] == "yes"


def test_validate_quick_and_negative_control(capsys):
    code, out, _ = run(capsys, "validate", *RAY)
    assert code == 0
    assert all(r["status"] == "PASS" for r in rows(out))
    code, _, err = run(capsys, "validate", *RAY, "--tol-scale", "1e-6")
    assert code == 1 and "validation failed" in err


def test_ks_pipeline(tmp_path, capsys):
    path = tmp_path / "s.csv"
    args = ["--alpha", "1.5", "--kappa", "3", "--mu", "3.2", "--m", "7.3"]
    run(capsys, "sample", *args, "--n", "200000", "--seed", "1", "--out", str(path))
    code, out, _ = run(capsys, "validate", "--ks", str(path))
    assert code == 0 and rows(out)[0]["status"] == "PASS"
    # the same samples against the wrong law must fail
    code, _, _ = run(capsys, "validate", "--ks", str(path), *RAY)
    assert code == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--alpha", "-1", "--kappa", "0", "--mu", "1", "--m", "1", "--at", "1"],
        ["eval", *RAY, "--at", "-1"],
        ["eval", *RAY, "--at", "x"],
        ["eval", *RAY, "--stat", "median", "--at", "1"],
        ["eval", "--kappa", "0", "--mu", "1", "--m", "1", "--at", "1"],
        ["eval", "--model", "lognormal", "--at", "1"],
        ["sweep", *RAY, "--var", "alpha", "--start", "-1", "--stop", "1"],
        ["sweep", *RAY, "--var", "mu", "--start", "1", "--stop", "2", "--points", "1"],
        ["sample", *RAY, "--n", "0"],
        ["sample", "--alpha", "2", "--kappa", "1", "--mu", "1.5", "--m", "1", "--n", "5", "--method", "physical"],
        ["validate", *RAY, "--tol-scale", "0"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 2
    assert capsys.readouterr().err


def test_bad_alpha_names_flag(capsys):
    code, _, err = run(capsys, "eval", "--alpha", "0", "--kappa", "0", "--mu", "1", "--m", "1", "--at", "1")
    assert code == 2 and "--alpha" in err


def test_numeric_failure_exits_three(monkeypatch, capsys):
    monkeypatch.setenv("AKMS_MAX_TERMS", "2")
    core._shape.cache_clear()
    try:
        code, _, err = run(capsys, "eval", "--alpha", "2.3", "--kappa", "3", "--mu", "1.8", "--m", "5.5",
                           "--at", "1")
    finally:
        core._shape.cache_clear()
    assert code == 3 and "numerical failure" in err


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "akms.cli", "eval", *RAY, "--at", "1"],
                         capture_output=True, text=True, check=True)
    assert rows(res.stdout)[0]["value"] == "0.36787944117144233"
