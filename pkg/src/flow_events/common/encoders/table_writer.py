"""
table_writer.py:

Delimiter-separated table files of every stage. Numbers are written with a fixed number of decimals so that reruns
produce byte-identical files; metadata goes into leading '# key=value' comment lines.
"""
from pathlib import Path

import pandas as pd

from flow_events.common.data_types.bar_data import BarSeries
from flow_events.common.data_types.exceptions import UndefinedFileException


class TableWriter:
    """Writes and reads the stage tables with one precision and delimiter"""

    def __init__(self, precision=6, delimiter=","):
        self.precision = int(precision)
        self.delimiter = delimiter

    @classmethod
    def from_config(cls, config):
        return cls(config.get_number("output", "precision", int), config.get("output", "delimiter"))

    def write(self, frame, path, metadata=None):
        """
        Write a DataFrame

        Args:
            frame: table to write, columns in file order
            path: destination, parent directories are created
            metadata: optional dict written as '# key=value' lines before the header
        Returns:
            the Path written
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as file_handle:
            for key, value in (metadata or {}).items():
                file_handle.write(f"# {key}={value}\n")
            frame.to_csv(
                file_handle,
                sep=self.delimiter,
                index=False,
                float_format=f"%.{self.precision}f",
                na_rep="nan",
                lineterminator="\n",
            )
        return path

    def read(self, path, dtype=None):
        path = Path(path)
        if not path.is_file():
            raise UndefinedFileException(path)
        return pd.read_csv(path, sep=self.delimiter, comment="#", dtype=dtype, keep_default_na=True)

    @staticmethod
    def read_metadata(path):
        """The '# key=value' lines at the top of a table file"""
        metadata = {}
        with open(path, "r") as file_handle:
            for line in file_handle:
                if not line.startswith("# "):
                    break
                key, _, value = line[2:].rstrip("\n").partition("=")
                metadata[key] = value
        return metadata

    def write_bars(self, series, directory):
        """Bars of one stock as <directory>/<stock_id>.csv"""
        return self.write(series.to_frame(), Path(directory) / f"{series.stock_id}.csv")

    def read_bars(self, path):
        return BarSeries.from_frame(self.read(path, dtype={"stock_id": str, "date": str}))
