"""
report.py:

Human-readable summary of a finished run, built only from the files its manifest lists: event counts by sign, the
peak of every basic quantity per group, and the fitted exponents. The same tables can be exported to a spreadsheet
when openpyxl is available; without it the export is skipped with a warning.
"""
import logging
import math

import numpy as np
import pandas as pd

from flow_events.analysis.quantities import BASIC_QUANTITIES
from flow_events.analysis.study import find_peak
from flow_events.common.data_types.exceptions import EmptyGroupException, ManifestException
from flow_events.common.encoders.table_writer import TableWriter
from flow_events.pipeline.manifest import Manifest
from flow_events.pipeline.standard import read_curves

# If openpyxl isn't installed, the spreadsheet export does nothing
try:
    from openpyxl import Workbook
    from openpyxl.styles import Font

    MODULE_INSTALLED = True
except ImportError:
    MODULE_INSTALLED = False

LOGGER = logging.getLogger("report")

RULE = "-" * 72


def format_alpha(alpha, stderr):
    return f"α = {alpha:.2f} ± {stderr:.2f}"


def _value(number, digits=4):
    if number is None or (isinstance(number, float) and math.isnan(number)):
        return "-"
    return f"{number:.{digits}f}"


class RunSummary:
    """Tables of one run, read back from its output directory"""

    def __init__(self, manifest, delimiter=","):
        self.manifest = manifest
        self.writer = TableWriter(delimiter=delimiter)
        self.events = self._table("events.csv", {"stock_id": str, "date": str, "sign": str})
        self.fits = self._table("fit_report.csv", {"group": str, "quantity": str, "status": str, "message": str})
        self.peaks = self._peaks()

    @classmethod
    def load(cls, path, delimiter=None):
        """
        Args:
            path: output directory or its manifest file
            delimiter: table delimiter, by default the one the manifest records
        Raises:
            ManifestException when the manifest is missing, malformed or does not match the files
        """
        manifest = Manifest.load(path).verify()
        if "events.csv" not in manifest.files:
            raise ManifestException("the run has no detect output (events.csv)")
        return cls(manifest, delimiter if delimiter is not None else manifest.delimiter)

    def _table(self, relative, dtype):
        if relative not in self.manifest.files:
            return None
        return self.writer.read(self.manifest.root / relative, dtype=dtype)

    def _peaks(self):
        if "curves.csv" not in self.manifest.files:
            return pd.DataFrame(columns=["group", "quantity", "t_max", "peak", "events"])
        rows = []
        for (group, quantity), average in read_curves(self.writer, self.manifest.root / "curves.csv").items():
            if quantity not in BASIC_QUANTITIES:
                continue
            try:
                t_max, peak = find_peak(average)
            except EmptyGroupException:
                t_max, peak = None, float("nan")
            rows.append((group, quantity, t_max, peak, int(np.max(average.counts))))
        return pd.DataFrame(rows, columns=["group", "quantity", "t_max", "peak", "events"])

    @property
    def sign_counts(self):
        signs = self.events["sign"].value_counts() if len(self.events) else {}
        return int(signs.get("positive", 0)), int(signs.get("negative", 0))

    def fitted(self):
        if self.fits is None or not len(self.fits):
            return pd.DataFrame()
        return self.fits[self.fits["status"] == "ok"]

    def render(self):
        """Fixed-width text summary"""
        positive, negative = self.sign_counts
        lines = [RULE, "Extreme events", RULE, f"positive: {positive}, negative: {negative}"]
        if positive + negative == 0:
            lines.append("zero events detected, no group curves and no fits")
            return "\n".join(lines) + "\n"

        lines += ["", RULE, "Peaks", RULE, f"{'group':<10}{'quantity':<18}{'t_max':>8}{'peak':>14}{'events':>8}"]
        for row in self.peaks.itertuples(index=False):
            t_max = "-" if row.t_max is None or pd.isna(row.t_max) else str(int(row.t_max))
            lines.append(f"{row.group:<10}{row.quantity:<18}{t_max:>8}{_value(row.peak):>14}{row.events:>8}")

        fitted = self.fitted()
        if len(fitted):
            lines += ["", RULE, "Relaxation exponents", RULE,
                      f"{'group':<10}{'quantity':<36}{'fit':<18}{'range':>12}"]
            for row in fitted.itertuples(index=False):
                span = f"[{int(row.t_lo)},{int(row.t_hi)}]"
                lines.append(f"{row.group:<10}{row.quantity:<36}{format_alpha(row.alpha, row.stderr):<18}{span:>12}")
        refused = 0 if self.fits is None else int(np.sum(self.fits["status"] == "refused"))
        if refused:
            lines.append(f"{refused} fit(s) refused, see fit_report.csv")
        return "\n".join(lines) + "\n"

    def export_xlsx(self, path):
        """
        Write events, peaks and fits as sheets of one workbook

        Returns:
            the path written, None when openpyxl is not installed
        """
        if not MODULE_INSTALLED:
            LOGGER.warning("openpyxl is not installed, spreadsheet %s not written", path)
            return None
        workbook = Workbook()
        workbook.remove(workbook.active)
        tables = {"events": self.events, "peaks": self.peaks, "fits": self.fitted()}
        for title, frame in tables.items():
            sheet = workbook.create_sheet(title)
            sheet.append(list(frame.columns))
            for cell in sheet[1]:
                cell.font = Font(bold=True)
            for row in frame.itertuples(index=False):
                sheet.append([None if pd.isna(value) else _plain(value) for value in row])
        workbook.save(path)
        LOGGER.info("Spreadsheet written to %s", path)
        return path


def _plain(value):
    """numpy scalars as python values for openpyxl"""
    return value.item() if isinstance(value, np.generic) else value


def report(path, xlsx=None):
    """
    Summary of a finished run

    Args:
        path: output directory or manifest file
        xlsx: optional spreadsheet destination
    Returns:
        the summary text
    """
    summary = RunSummary.load(path)
    if xlsx:
        summary.export_xlsx(xlsx)
    return summary.render()
