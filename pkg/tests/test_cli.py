"""Testing the command line surface"""
import csv
import io
import json
import logging

import pytest
from click.testing import CliRunner

from growthlab.cli import cli, run
from growthlab.params import steady_state


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def restore_logging():
    # the CLI points the root handler at the stream of the current invocation
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def rows_of(text):
    return list(csv.reader(io.StringIO(text)))


def test_validate_reports_three_families(runner):
    result = runner.invoke(cli, ["validate"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert sorted(payload) == ["bgp", "one-integral", "two-integral"]
    assert all(entry["satisfied"] for entry in payload.values())


def test_validate_inadmissible_still_succeeds(runner):
    result = runner.invoke(cli, ["validate", "--rho", "0.2"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert not payload["two-integral"]["satisfied"]
    assert payload["two-integral"]["violated"][0]["name"] == "rho_below_delta"


def test_validate_text_table(runner):
    result = runner.invoke(cli, ["validate", "--format", "text"])
    assert result.exit_code == 0
    assert "two-integral" in result.stdout


def test_sigma_one_is_a_validation_error(runner):
    result = runner.invoke(cli, ["validate", "--sigma", "1"])
    assert result.exit_code == 1
    assert result.stderr.startswith("error: ")
    assert result.stdout == ""


def test_steady_state_json(runner, params):
    result = runner.invoke(cli, ["steady-state", "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["z_star"] == steady_state(params).z_star
    assert payload["restricted_sigma"] is None


def test_simulate_bgp_grid(runner, bgp):
    result = runner.invoke(cli, ["simulate", "--family", "bgp", "--k0", "1", "--t-max", "10", "--steps", "11"])
    assert result.exit_code == 0, result.output
    rows = rows_of(result.stdout)
    assert rows[0] == ["t", "c", "k", "h", "u", "z", "lambda", "mu"]
    assert len(rows) == 12
    t, c, k, h, u = (float(v) for v in rows[1][:5])
    assert (t, k) == (0.0, 1.0)
    assert c == bgp.pinned.c0
    assert h == bgp.pinned.h0
    assert u == bgp.pinned.u0


def test_simulate_is_deterministic(runner):
    args = ["simulate", "--family", "two-integral", "--z0-ratio", "0.5", "--t-max", "5", "--steps", "6"]
    first = runner.invoke(cli, args)
    second = runner.invoke(cli, args)
    assert first.exit_code == 0, first.output
    assert first.stdout_bytes == second.stdout_bytes


def test_unknown_family_is_a_usage_error(runner):
    result = runner.invoke(cli, ["simulate", "--family", "three"])
    assert result.exit_code == 1
    assert "unknown family" in result.output


def test_config_file_under_flags(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"σ": 3.0, "t_max": 4, "steps": 5, "family": "bgp"}), encoding="utf-8")
    result = runner.invoke(cli, ["simulate", "--config", str(config), "--steps", "3"])
    assert result.exit_code == 0, result.output
    rows = rows_of(result.stdout)
    assert len(rows) == 4
    assert float(rows[-1][0]) == 4.0


def test_integrate_marks_provenance(runner):
    result = runner.invoke(cli, ["integrate", "--family", "bgp", "--t-max", "5", "--steps", "6", "--tol", "1e-11"])
    assert result.exit_code == 0, result.output
    rows = rows_of(result.stdout)
    assert rows[0][-1] == "provenance"
    assert {row[-1] for row in rows[1:]} == {"numeric"}


def test_zpath_columns(runner):
    result = runner.invoke(cli, ["zpath", "--z0-ratio", "0.5", "--t-max", "4", "--steps", "5"])
    assert result.exit_code == 0, result.output
    rows = rows_of(result.stdout)
    assert rows[0] == ["t", "z", "F", "G"]
    assert float(rows[1][2]) == 0.0


def test_verify_bgp(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["verify", "--family", "bgp", "--output", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert len(report["config_digest"]) == 64
    assert report["integral_drift"]["I1_closed"] <= 1e-9


def test_compare_writes_gaps(runner, tmp_path):
    gaps = tmp_path / "gaps.csv"
    result = runner.invoke(cli, ["compare", "--t-max", "10", "--steps", "3", "--gaps-output", str(gaps)])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert "per_time" not in payload
    assert max(payload["max_rel_gap"].values()) <= 1e-8
    rows = rows_of(gaps.read_text(encoding="utf-8"))
    assert rows[0][0] == "t"
    assert len(rows) == 4


def test_sweep_from_spec(runner, tmp_path):
    spec = tmp_path / "sweep.json"
    spec.write_text(
        json.dumps({
            "base": {"sigma": 2.0, "rho": 0.05, "beta": 0.33, "gamma": 1.0, "delta": 0.11, "pi": 0.04},
            "axes": {"rho": {"values": [0.05, 0.2]}},
        }),
        encoding="utf-8",
    )
    result = runner.invoke(cli, ["sweep", "--spec", str(spec)])
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    assert [row["rho"] for row in rows] == ["0.050000000000000003", "0.20000000000000001"]
    assert [row["admissible_two-integral"] for row in rows] == ["True", "False"]


def test_bad_sweep_spec(runner, tmp_path):
    spec = tmp_path / "sweep.json"
    spec.write_text(json.dumps({"axes": {"rho": {"values": [0.05]}}}), encoding="utf-8")
    result = runner.invoke(cli, ["sweep", "--spec", str(spec)])
    assert result.exit_code == 1
    assert "invalid sweep specification" in result.stderr


def test_plotdata_series(runner):
    result = runner.invoke(
        cli, ["plotdata", "--families", "bgp,one-integral", "--variables", "u", "--growth", "", "--steps", "3"]
    )
    assert result.exit_code == 0, result.output
    rows = rows_of(result.stdout)
    assert rows[0] == ["series", "t", "variable", "value"]
    assert {row[0] for row in rows[1:]} == {"bgp", "one-integral"}
    assert len(rows) == 7


def test_run_returns_exit_codes(capsys):
    assert run(["validate"]) == 0
    assert run(["validate", "--sigma", "1"]) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_errors_exit_one():
    assert run(["verify", "--family", "nope"]) == 1
    assert run(["validate", "--no-such-flag"]) == 1
    assert run(["no-such-command"]) == 1


def test_validate_zero_sigma(runner):
    result = runner.invoke(cli, ["validate", "--sigma", "0"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    for entry in payload.values():
        assert not entry["satisfied"]
        assert "sigma_positive" in [v["name"] for v in entry["violated"]]


@pytest.mark.parametrize("flag,value,constraint", [("--beta", "1", "beta_below_one"), ("--gamma", "-1", "gamma_positive")])
def test_steady_state_outside_the_model(runner, flag, value, constraint):
    result = runner.invoke(cli, ["steady-state", flag, value])
    assert result.exit_code == 1
    assert result.stderr.startswith("error: ")
    assert constraint in result.stderr


def test_verify_one_integral(runner, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["verify", "--family", "one-integral", "--z0-ratio", "0.5", "-o", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["passed"] is True
    names = {check["name"] for check in report["checks"]}
    assert {"terminal_gap_shrinking", "growth_shrinking_u"} <= names


def test_verify_reads_tolerances_from_config(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"family": "bgp", "ode_tol": 1e-9, "quad_tol": 1e-11}), encoding="utf-8")
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["verify", "--config", str(config), "-o", str(out)])
    assert result.exit_code in (0, 2), result.output
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["ode_tol"] == 1e-9
    assert report["quad_tol"] == 1e-11
    drift = next(check for check in report["checks"] if check["name"] == "drift_I1_numeric")
    assert drift["threshold"] == pytest.approx(100 * 1e-9)


def test_verify_flag_beats_config(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"family": "bgp", "ode_tol": 1e-9}), encoding="utf-8")
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["verify", "--config", str(config), "--tol", "1e-10", "-o", str(out)])
    assert result.exit_code in (0, 2), result.output
    assert json.loads(out.read_text(encoding="utf-8"))["ode_tol"] == 1e-10
