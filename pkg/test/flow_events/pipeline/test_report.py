"""
Tests the run summary built from a manifest
"""
import pytest

from flow_events.analysis.detect import events_frame
from flow_events.common.data_types.event_data import EventSign, ExtremeEvent
from flow_events.common.data_types.exceptions import ManifestException
from flow_events.common.encoders.table_writer import TableWriter
from flow_events.pipeline import report as report_module
from flow_events.pipeline.manifest import Manifest
from flow_events.pipeline.report import RunSummary, format_alpha, report
from flow_events.pipeline.run_config import RunConfig
from flow_events.pipeline.standard import StandardPipeline
from flow_events.synth.scenario import InjectedEvent, Overlay, ScenarioSpec


def detect_only_run(root, positive, negative, delimiter=","):
    events = [ExtremeEvent("S1", day, 30, sign=EventSign.POSITIVE) for day in range(positive)]
    events += [ExtremeEvent("S2", day, 30, sign=EventSign.NEGATIVE) for day in range(negative)]
    manifest = Manifest(root)
    manifest.delimiter = delimiter
    manifest.register("detect", TableWriter(delimiter=delimiter).write(events_frame(events), root / "events.csv"))
    manifest.save()
    return manifest


def test_format_alpha():
    assert format_alpha(0.5, 0.03) == "α = 0.50 ± 0.03"
    assert format_alpha(1.234, 0.0049) == "α = 1.23 ± 0.00"


def test_sign_counts(tmp_path):
    detect_only_run(tmp_path, 131, 32)
    text = report(tmp_path)
    assert "positive: 131, negative: 32" in text
    assert RunSummary.load(tmp_path / "manifest.json").sign_counts == (131, 32)


def test_zero_events(tmp_path):
    detect_only_run(tmp_path, 0, 0)
    text = report(tmp_path)
    assert "positive: 0, negative: 0" in text
    assert "zero events detected" in text


def test_manifest_problems(tmp_path):
    with pytest.raises(ManifestException):
        report(tmp_path)
    detect_only_run(tmp_path, 2, 1)
    (tmp_path / "events.csv").write_text("stock_id\n")
    with pytest.raises(ManifestException):
        report(tmp_path)


def test_run_without_detect_output(tmp_path):
    Manifest(tmp_path).save()
    with pytest.raises(ManifestException):
        report(tmp_path)


def test_tables_read_with_the_recorded_delimiter(tmp_path):
    detect_only_run(tmp_path, 3, 2, delimiter="|")
    assert Manifest.load(tmp_path).delimiter == "|"
    assert "positive: 3, negative: 2" in report(tmp_path)
    assert RunSummary.load(tmp_path, delimiter="|").sign_counts == (3, 2)


@pytest.fixture(params=[",", "|"])
def finished_run(tmp_path, request):
    spec = ScenarioSpec(
        stocks=("A",),
        days=6,
        seed=5,
        overlays=(Overlay("volume", height=30.0, alpha=0.5, decay=20.0),),
        events=(InjectedEvent("A", 2, 35),),
    )
    spec.dump(tmp_path / "scenario.json")
    config = RunConfig(
        scenario=str(tmp_path / "scenario.json"),
        output=str(tmp_path / "out"),
        quantities=("abs_return", "volume", "spread"),
        exclude_event_days=True,
        output_delimiter=request.param,
    )
    StandardPipeline().setup(config).run()
    return tmp_path / "out"


def test_full_run_summary(finished_run):
    summary = RunSummary.load(finished_run)
    assert summary.sign_counts == (1, 0)
    assert set(summary.peaks["quantity"]) == {"abs_return", "volume", "spread"}
    assert set(summary.fitted()["quantity"]) >= {"volume"}
    text = summary.render()
    assert "positive: 1, negative: 0" in text
    assert "Peaks" in text
    assert "Relaxation exponents" in text
    assert "α = " in text


def test_spreadsheet_export(finished_run, tmp_path):
    openpyxl = pytest.importorskip("openpyxl")
    path = tmp_path / "summary.xlsx"
    report(finished_run, xlsx=path)
    workbook = openpyxl.load_workbook(path)
    assert workbook.sheetnames == ["events", "peaks", "fits"]
    assert workbook["events"].max_row == 2


def test_spreadsheet_skipped_without_openpyxl(finished_run, tmp_path, monkeypatch):
    monkeypatch.setattr(report_module, "MODULE_INSTALLED", False)
    path = tmp_path / "summary.xlsx"
    assert RunSummary.load(finished_run).export_xlsx(path) is None
    assert not path.exists()
