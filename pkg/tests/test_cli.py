import json

import numpy as np
import pytest

from fisherqp.cli import main
from fisherqp.reports import CHECKS


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def read_report(out_dir):
    return json.loads((out_dir / "report.json").read_text())


GRID = {"xmin": -8.0, "xmax": 8.0, "n": 4097}


def test_verify_identities_pass(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {"grid": GRID, "density": {"kind": "gaussian", "sigma": 1.0}},
    )
    out = tmp_path / "out"
    assert main(["verify-identities", "--input", inp, "--out", str(out)]) == 0
    report = read_report(out)
    assert report["overall_pass"] is True
    assert report["schema"] == 1
    assert report["inputs_digest"].startswith("sha256:")
    names = {c["name"] for c in report["checks"]}
    assert {"qp-four-forms", "mean-QP-equals-FI", "fluctuation-mean-zero",
            "fluctuation-second-moment", "thermal-fisher-route-b"} <= names
    # the standing discrepancy flags are always present (with ratios)
    assert {"flag-mean-qp-sign", "flag-thermal-route-factor"} <= names
    flagged = [c for c in report["checks"] if c["flagged"]]
    assert all("ratio" in c["note"] for c in flagged[:2])
    assert (out / "density.csv").exists()
    assert (out / "meta.json").exists()


def test_verify_identities_gibbs_density(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {
            "grid": {"xmin": -8.0, "xmax": 8.0, "n": 8193},
            "density": {
                "kind": "gibbs",
                "energy": {"kind": "monomial", "power": 2, "coeff": 0.5},
                "gamma": 1.0,
            },
        },
    )
    out = tmp_path / "out"
    assert main(["verify-identities", "--input", inp, "--out", str(out)]) == 0
    names = {c["name"] for c in read_report(out)["checks"]}
    assert {"gibbs-qp-formula", "gibbs-fisher-formula"} <= names


def test_report_determinism(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {"grid": GRID, "density": {"kind": "gaussian", "sigma": 1.0}},
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["verify-identities", "--input", inp, "--out", str(out1)])
    main(["verify-identities", "--input", inp, "--out", str(out2)])
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()


def test_malformed_json_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out = tmp_path / "out"
    assert main(["verify-identities", "--input", str(bad), "--out", str(out)]) == 2
    assert not (out / "report.json").exists()


def test_missing_input_exits_2(tmp_path):
    assert main([
        "verify-identities", "--input", str(tmp_path / "nope.json"),
        "--out", str(tmp_path / "out"),
    ]) == 2


def test_schema_violation_exits_2(tmp_path):
    inp = write_json(tmp_path / "in.json", {"grid": GRID})  # no density
    assert main(["verify-identities", "--input", inp, "--out",
                 str(tmp_path / "out")]) == 2


def test_epi_command(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {
            "grid": GRID,
            "constraints": [{"kind": "monomial", "power": 2, "lambda": -4.0}],
        },
    )
    out = tmp_path / "out"
    assert main(["epi", "--input", inp, "--out", str(out)]) == 0
    result = json.loads((out / "epi_result.json").read_text())
    assert result["alpha_norm"] == pytest.approx(4.0, abs=1e-3)
    assert (out / "p_I.csv").exists() and (out / "psi.csv").exists()


def test_epi_solver_failure_exits_3(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {
            "grid": GRID,
            "constraints": [{"kind": "monomial", "power": 2, "lambda": 4.0}],
        },
    )
    out = tmp_path / "out"
    assert main(["epi", "--input", inp, "--out", str(out)]) == 3
    report = read_report(out)
    assert report["error"]["type"] == "EdgeLocalized"
    assert report["overall_pass"] is False


def test_maxent_command(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {"grid": GRID, "constraint": {"kind": "monomial", "power": 2}, "target": 1.0},
    )
    out = tmp_path / "out"
    assert main(["maxent", "--input", inp, "--out", str(out)]) == 0
    result = json.loads((out / "maxent_result.json").read_text())
    assert result["alpha_gibbs"] == pytest.approx(0.5, abs=1e-6)


def test_sweep_command(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {
            "grid": GRID,
            "constraint": {"kind": "monomial", "power": 2},
            "lambdas": list(-np.exp(np.linspace(0, np.log(8), 13))),
        },
    )
    out = tmp_path / "out"
    assert main(["sweep", "--input", inp, "--out", str(out)]) == 0
    assert (out / "sweep.csv").exists()
    names = {c["name"] for c in read_report(out)["checks"]}
    assert {"fisher-euler", "legendre-relations"} <= names


def test_evolve_command(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {
            "grid": {"xmin": -10.0, "xmax": 10.0, "n": 2561},
            "initial": {"kind": "gaussian", "sigma": 1.0},
            "potential": {"kind": "free"},
            "dt": 1.0 / 1024,
            "steps": 256,
            "dump": True,
        },
    )
    out = tmp_path / "out"
    assert main(["evolve", "--input", inp, "--out", str(out)]) == 0
    names = {c["name"] for c in read_report(out)["checks"]}
    assert names == {"continuity", "modified-hj", "entropy-rate"}
    assert (out / "trajectory" / "manifest.json").exists()


def test_thermal_command(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {
            "grid": {"xmin": -16.0, "xmax": 16.0, "n": 8193},
            "heat": {"kind": "quadratic", "coeff": 0.125},
        },
    )
    out = tmp_path / "out"
    assert main(["thermal", "--input", inp, "--out", str(out)]) == 0
    names = {c["name"] for c in read_report(out)["checks"]}
    assert "ratio-law-evolution" in names
    assert "thermalized-qp-vanishes" in names
    assert "flag-thermal-route-factor" in names


def test_thermal_log_affine(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {
            "grid": GRID,
            "heat": {"kind": "log-affine", "a": 4.0, "b": 0.2},
        },
    )
    out = tmp_path / "out"
    assert main(["thermal", "--input", inp, "--out", str(out)]) == 0
    report = read_report(out)
    byname = {c["name"]: c for c in report["checks"]}
    assert byname["vanishing-qp-family"]["pass"] is True


def test_failed_check_exits_3(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {"grid": GRID, "density": {"kind": "gaussian", "sigma": 1.0}},
    )
    out = tmp_path / "out"
    code = main([
        "verify-identities", "--input", inp, "--out", str(out),
        "--tol-scale", "1e-12",
    ])
    assert code == 3
    assert read_report(out)["overall_pass"] is False


def test_grid_override(tmp_path):
    inp = write_json(
        tmp_path / "in.json",
        {"grid": GRID, "density": {"kind": "gaussian", "sigma": 1.0}},
    )
    out = tmp_path / "out"
    assert main([
        "verify-identities", "--input", inp, "--out", str(out),
        "--n", "8193", "--xmin", "-9", "--xmax", "9",
    ]) == 0
    density_rows = (out / "density.csv").read_text().splitlines()
    assert len(density_rows) == 8194
    assert density_rows[1].startswith("-9,")


def test_list_checks(capsys):
    assert main(["list-checks"]) == 0
    out = capsys.readouterr().out
    lines = [ln for ln in out.strip().splitlines() if ln]
    assert "eq2.4 mean-QP-equals-FI" in lines
    assert "eq5.11 fisher-euler" in lines
    assert len(lines) == len(CHECKS)
