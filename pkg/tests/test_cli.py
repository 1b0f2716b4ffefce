"""CLI surface tests using the shipped example scenarios."""

import json

import pytest

from ficteleop.cli import main

SCENARIOS = "scenarios"


def short_scenario(tmp_path, **overrides):
    cfg = {
        "schema_version": 1, "duration": 1.0, "rate": 1000, "seed": 2,
        "plant": {"kind": "point_mass", "q0": [0, 0, 0]},
        "reference": {"kind": "circle", "center": [0, 0, 0], "radius": 0.1, "period": 5.0},
        "operator": {"source": "scripted", "trace": []},
    }
    cfg.update(overrides)
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(cfg))
    return path


def test_run_prints_metrics(tmp_path, capsys):
    path = short_scenario(tmp_path)
    assert main(["run", "--scenario", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["rows"] == 1000
    assert "free_fraction" in out


def test_run_writes_log_and_metrics_reads_it(tmp_path, capsys):
    scenario = short_scenario(tmp_path)
    log_path = tmp_path / "out.csv"
    assert main(["run", "--scenario", str(scenario), "--log", str(log_path)]) == 0
    run_out = json.loads(capsys.readouterr().out)
    assert main(["metrics", "--log", str(log_path)]) == 0
    met_out = json.loads(capsys.readouterr().out)
    for key in met_out:
        assert met_out[key] == run_out[key]


def test_run_jsonl_format(tmp_path, capsys):
    scenario = short_scenario(tmp_path)
    log_path = tmp_path / "out.jsonl"
    assert main(["run", "--scenario", str(scenario), "--log", str(log_path),
                 "--format", "jsonl"]) == 0
    lines = log_path.read_text().splitlines()
    assert json.loads(lines[0])["type"] == "meta"
    assert len(lines) == 1001


def test_delay_and_seed_overrides_change_hash(tmp_path, capsys):
    scenario = short_scenario(tmp_path)
    assert main(["run", "--scenario", str(scenario)]) == 0
    base = json.loads(capsys.readouterr().out)
    assert main(["run", "--scenario", str(scenario), "--delay", "0.1",
                 "--seed", "77"]) == 0
    changed = json.loads(capsys.readouterr().out)
    assert base["config_hash"] != changed["config_hash"]


def test_invalid_scenario_reports_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema_version": 99}))
    assert main(["run", "--scenario", str(path)]) == 2
    assert "schema_version" in capsys.readouterr().err


def test_missing_log_reports_error(capsys):
    assert main(["metrics", "--log", "/nonexistent/log.csv"]) == 2
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("name", ["delay_tracking", "disconnection",
                                  "superimposition", "velcro", "two_link_circle"])
def test_shipped_scenarios_validate(name):
    from ficteleop.scenario import ScenarioConfig

    ScenarioConfig.from_file(f"{SCENARIOS}/{name}.json")
