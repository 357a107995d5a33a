import json
import os

import pytest

from iosc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


def test_expsum_verify(capsys):
    code, rep = run(
        capsys, "expsum", "--gens", "x1^2", "-n", "1", "-p", "3", "-m", "2", "--verify"
    )
    assert code == 0
    assert rep["result"]["E_counts"] == "2/9"
    assert rep["result"]["verify_moidef"] is True


def test_count_both_methods(capsys):
    code, rep = run(capsys, "count", "--gens", "x1*x2", "-n", "2", "-p", "5", "-m", "1")
    assert code == 0
    assert rep["result"]["count"] == "9"


def test_count_fault_injection_exit4(capsys, monkeypatch):
    monkeypatch.setenv("IOSC_FAULT_INJECT", "count-oracle")
    code = main(["count", "--gens", "x1", "-n", "1", "-p", "3", "-m", "1"])
    assert code == 4


def test_zeta_reconstruct(capsys):
    code, rep = run(
        capsys,
        "zeta",
        "--gens",
        "x1",
        "-n",
        "1",
        "-p",
        "3",
        "--max-order",
        "5",
        "--reconstruct",
    )
    assert code == 0
    dist = rep["result"]["ord_distribution"]["coefficients"]
    assert dist[0] == "2/3" and dist[1] == "2/9"
    assert rep["result"]["series_identity"]["ok"] is True
    rec = rep["result"]["reconstruction"]
    assert rec["flag"] == "ok"
    assert rec["func"]["numer"] == ["2/3"]
    assert rec["func"]["denom"] == ["1/1", "-1/3"]


def test_zeta_theta(capsys):
    code, rep = run(
        capsys, "zeta", "--gens", "x1^2", "-n", "1", "-p", "3", "--max-order", "6", "--theta"
    )
    assert code == 0
    assert rep["result"]["theta"]["verdict"] == "growing"


def test_sseries(capsys):
    code, rep = run(capsys, "sseries", "--gens", "x1*x2", "-n", "2", "--qmax", "6")
    assert code == 0
    terms = rep["result"]["singular_series"]["terms"]
    assert terms[1] == [2, "1/4", "1/2"]


def test_sseries_irreducible(capsys):
    code, rep = run(
        capsys,
        "sseries",
        "--gens",
        "x1*x2",
        "-n",
        "2",
        "--irreducible",
        "--primes",
        "5,7,11,13",
    )
    assert code == 0
    assert rep["result"]["irreducibility"]["verdict"] == "reducible-or-wrong-dimension"


def test_bounds_sigma0_vinogradov(tmp_path, capsys):
    ideal = {
        "n": 4,
        "gens": [
            "x1 + x2 - x3 - x4",
            "x1^2 + x2^2 - x3^2 - x4^2",
            "x1^3 + x2^3 - x3^3 - x4^3",
        ],
    }
    path = tmp_path / "vinogradov.json"
    path.write_text(json.dumps(ideal))
    code, rep = run(capsys, "bounds", "sigma0", "--ideal", str(path))
    assert code == 0
    assert rep["result"]["bound"]["value"] == "4/3"


def test_bounds_thresholds(capsys):
    code, rep = run(capsys, "bounds", "thresholds", "-r", "1", "-R", "1", "-d", "2")
    assert code == 0
    t = rep["result"]["thresholds"]
    assert t["general"] == [6, 9]
    assert t["dominant_term"] == 8


def test_bounds_tau0(capsys):
    code, rep = run(capsys, "bounds", "tau0", "--groups", "2:1:0", "-n", "10")
    assert code == 0
    assert rep["result"]["tau0"] == "5/1"


def test_bounds_moi_fit(capsys):
    data = ",".join(f"5:{m}:{5.0 ** (-2 * m)}" for m in range(2, 6))
    code, rep = run(capsys, "bounds", "moi-fit", "--data", data)
    assert code == 0
    assert abs(rep["result"]["fit"]["sigma_hat"] - 2.0) < 1e-9


def test_circle_count(capsys):
    code, rep = run(
        capsys, "circle", "count", "--gens", "x1^2 + x2^2 - x3^2", "-n", "3", "-B", "1"
    )
    assert code == 0
    assert rep["result"]["count"] == "9"


def test_circle_waring(capsys):
    code, rep = run(
        capsys, "circle", "waring", "--map", "1:x1^2", "-p", "7", "-m", "1", "--ell", "1"
    )
    assert code == 0
    assert rep["result"]["surjective"] is False
    assert rep["result"]["missing_count"] == 3


def test_jet_expand(capsys):
    code, rep = run(
        capsys, "jet", "expand", "--poly", "x1^2", "-n", "1", "--order", "2", "--start", "0"
    )
    assert code == 0
    assert rep["result"]["jets"] == ["x1^2", "2*x1*x2", "x2^2 + 2*x1*x3"]


def test_jet_highpart(capsys):
    code, rep = run(
        capsys, "jet", "highpart-check", "--gens", "x1^2 + x1", "-n", "1", "-m", "2"
    )
    assert code == 0
    assert rep["result"]["highpart_identity"] is True


def test_exit_invalid_input():
    assert main(["expsum", "--gens", "x9", "-n", "1", "-p", "3", "-m", "1"]) == 2
    assert main(["expsum", "-p", "3", "-m", "1"]) == 2
    assert main(["count", "--gens", "1 - 1", "-n", "1", "-p", "3", "-m", "1"]) == 2


def test_exit_budget():
    assert (
        main(
            ["count", "--gens", "x1^2", "-n", "1", "-p", "101", "-m", "4",
             "--method", "naive", "--budget", "100"]
        )
        == 3
    )


def test_force_bypasses_budget(capsys):
    code = main(
        ["count", "--gens", "x1^2", "-n", "1", "-p", "7", "-m", "2",
         "--budget", "1", "--force"]
    )
    assert code == 0
    assert "--force" in capsys.readouterr().err


def test_env_budget(monkeypatch):
    monkeypatch.setenv("IOSC_BUDGET", "10")
    assert main(["count", "--gens", "x1^2", "-n", "1", "-p", "7", "-m", "2"]) == 3


def test_round_trip_reruns_identically(capsys):
    argv = ["zeta", "--gens", "x1^2", "-n", "1", "-p", "3", "--max-order", "4"]
    code, rep1 = run(capsys, *argv)
    assert code == 0
    code, rep2 = run(capsys, *[str(a) for a in rep1["config"]["argv"]])
    assert code == 0
    assert rep1["result"] == rep2["result"]


def test_round_trip_with_seed(capsys):
    argv = [
        "circle", "jintegral", "--gens", "x1^2 + x2^2 - x3^2", "-n", "3",
        "--eps", "0.2,0.1", "--seed", "99",
    ]
    code, rep1 = run(capsys, *argv)
    assert code == 0
    code, rep2 = run(capsys, *[str(a) for a in rep1["config"]["argv"]])
    assert code == 0
    assert rep1["result"] == rep2["result"]


def test_csv_output(capsys):
    code = main(
        ["count", "--gens", "x1", "-n", "1", "-p", "3", "-m", "2", "--output", "csv"]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("key,value")
    assert any("result.count" in line for line in out.splitlines())


def test_output_to_file(tmp_path):
    path = tmp_path / "report.json"
    code = main(
        ["count", "--gens", "x1", "-n", "1", "-p", "3", "-m", "2", "-o", str(path)]
    )
    assert code == 0
    rep = json.loads(path.read_text())
    assert rep["result"]["count"] == "1"


def test_grouped_ideal_file(tmp_path, capsys):
    ideal = {
        "n": 1,
        "groups": [{"degree": 2, "gens": ["x1^2"]}],
    }
    path = tmp_path / "ideal.json"
    path.write_text(json.dumps(ideal))
    code, rep = run(capsys, "expsum", "--ideal", str(path), "-p", "3", "-m", "2")
    assert code == 0
    assert rep["result"]["E_counts"] == "2/9"
