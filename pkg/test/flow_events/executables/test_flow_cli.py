"""
Tests the flow-events command line: exit statuses per failing stage and the output of a short synthetic run
"""
import logging

import pytest

from flow_events.executables.flow_cli import EXIT_CODES, main
from flow_events.synth.scenario import InjectedEvent, ScenarioSpec

pytestmark = pytest.mark.cli


@pytest.fixture(autouse=True)
def restore_root_logger():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in root.handlers[:]:
        if handler not in handlers:
            root.removeHandler(handler)
    root.setLevel(level)


@pytest.fixture
def scenario(tmp_path):
    path = tmp_path / "scenario.json"
    ScenarioSpec(stocks=("A",), days=4, seed=11, events=(InjectedEvent("A", 1, 35),)).dump(path)
    return str(path)


def test_no_command_prints_help(capsys):
    assert main([]) == 0
    assert "usage" in capsys.readouterr().out


def test_run_and_report(tmp_path, scenario, capsys):
    output = str(tmp_path / "out")
    assert main(["run", "--scenario", scenario, "-o", output, "--quantities", "volume"]) == 0
    assert "manifest.json" in capsys.readouterr().out
    assert main(["report", output]) == 0
    assert "positive: 1, negative: 0" in capsys.readouterr().out


def test_detect_logs_filter_settings(tmp_path, scenario, caplog):
    output = str(tmp_path / "out")
    assert main(["synth", "--scenario", scenario, "-o", output]) == 0
    with caplog.at_level(logging.INFO):
        assert main(["detect", "-o", output, "--window-max", "30"]) == 0
    assert "threshold_abs=0.04 window_max=30" in caplog.text


def test_missing_input_exits_with_ingest_status(tmp_path):
    status = main(["ingest", "-i", str(tmp_path / "missing.csv"), "-o", str(tmp_path / "out")])
    assert status == EXIT_CODES["ingest"] == 3


def test_invalid_filter_exits_with_config_status(tmp_path, capsys):
    assert main(["detect", "--threshold-abs", "-1", "-o", str(tmp_path / "out")]) == 2
    assert "[ERROR]" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["run", "-c", str(tmp_path / "absent.ini"), "-o", str(tmp_path / "out")]) == 2


def test_run_without_inputs_or_scenario(tmp_path):
    assert main(["run", "-o", str(tmp_path / "out")]) == 2


def test_detect_without_bars(tmp_path):
    assert main(["detect", "-o", str(tmp_path / "out")]) == 5


def test_report_without_manifest(tmp_path):
    assert main(["report", str(tmp_path / "nothing")]) == 9


def test_config_file_and_flags_are_layered(tmp_path, scenario):
    config = tmp_path / "run.ini"
    config.write_text(f"[synth]\nscenario = {scenario}\n\n[study]\nquantities = volume\n")
    output = tmp_path / "out"
    assert main(["run", "-c", str(config), "-o", str(output), "--threshold-abs", "0.5"]) == 0
    assert (output / "events.csv").read_text().count("\n") == 2
