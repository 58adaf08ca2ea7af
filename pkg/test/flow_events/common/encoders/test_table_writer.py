"""
Tests the table writer
"""
import numpy as np
import pandas as pd
import pytest

from flow_events.common.data_types.exceptions import UndefinedFileException
from flow_events.common.encoders.table_writer import TableWriter
from flow_events.synth.bars import generate_bars
from flow_events.synth.scenario import ScenarioSpec


def test_metadata_and_precision(tmp_path):
    frame = pd.DataFrame({"name": ["a", "b"], "value": [1 / 3, float("nan")]})
    path = TableWriter(precision=3).write(frame, tmp_path / "nested" / "table.csv", {"pre_window": 100, "mode": "x"})
    assert path.read_text() == "# pre_window=100\n# mode=x\nname,value\na,0.333\nb,nan\n"
    assert TableWriter.read_metadata(path) == {"pre_window": "100", "mode": "x"}
    read = TableWriter().read(path)
    assert read["value"].iloc[0] == pytest.approx(0.333)
    assert np.isnan(read["value"].iloc[1])


def test_delimiter(tmp_path):
    writer = TableWriter(delimiter="|")
    path = writer.write(pd.DataFrame({"a": [1], "b": [2]}), tmp_path / "table.txt")
    assert path.read_text() == "a|b\n1|2\n"
    assert writer.read(path).to_dict("list") == {"a": [1], "b": [2]}


def test_bars_round_trip(tmp_path):
    series = generate_bars(ScenarioSpec(stocks=("A",), days=2, seed=4))[0]["A"]
    path = TableWriter().write_bars(series, tmp_path)
    assert path.name == "A.csv"
    read = TableWriter().read_bars(path)
    assert read.stock_id == "A"
    assert list(read.dates) == list(series.dates)
    np.testing.assert_allclose(read.mid_price, series.mid_price, atol=1e-6)
    np.testing.assert_allclose(read.volume, series.volume, atol=1e-6)


def test_missing_file(tmp_path):
    with pytest.raises(UndefinedFileException):
        TableWriter().read(tmp_path / "absent.csv")
