"""
standard.py:

The standard pipeline. Each stage reads only the files the previous stage left in the output directory, writes its
own files, and registers them in the manifest, so any stage can be rerun on its own:

    synth     scenario            -> bars/<stock>.csv or synth/orders.csv, synth/truth.json, synth/labels.csv
    ingest    order-flow inputs   -> orders/<stock>.csv, rejects.csv
    classify  orders/             -> bars/<stock>.csv, diagnostics.csv
    detect    bars/               -> events.csv
    study     bars/, events.csv   -> curves.csv, cumulative.csv, peaks.csv, rates.csv, patterns.csv
    fit       curves.csv          -> fit_report.csv

Failures inside a stage are raised as StageFailure carrying the stage name.
"""
import dataclasses
import logging
from pathlib import Path

import pandas as pd

from flow_events.analysis.deseason import pattern_frame
from flow_events.analysis.detect import ReturnSeries, detect_all, events_frame, events_from_frame
from flow_events.analysis.ingest import apply_split_adjustment, replay_stock, restrict_to_sessions
from flow_events.analysis.quantities import Quantity
from flow_events.analysis.relax import fit_report
from flow_events.analysis.study import EventStudy, GroupAverage, peak_table
from flow_events.common.data_types.event_data import EventSign
from flow_events.common.data_types.exceptions import (
    ConfigurationException,
    FlowEventsException,
    StageFailure,
)
from flow_events.common.encoders.table_writer import TableWriter
from flow_events.common.parsers.order_file_parser import (
    OrderFileParser,
    read_split_table,
    serialize_stream,
)
from flow_events.common.utils.trading_clock import TradingClock
from flow_events.pipeline.manifest import Manifest
from flow_events.synth.bars import generate_bars
from flow_events.synth.orderflow import generate_orderflow
from flow_events.synth.scenario import ScenarioSpec

LOGGER = logging.getLogger("pipeline")

STAGES = ("synth", "ingest", "classify", "detect", "study", "fit")
SYNTH_ORDERS = "synth/orders.csv"
CURVE_METADATA = {"backward_extension": "symmetric"}
# records of a written stream the classify stage could not replay
REJECTED_RECORD = "rejected_record"


class StandardPipeline:
    """
    Life-cycle:
       1. setup: bind a RunConfig and open (or start) the manifest of its output directory
       2. stage methods or run: each stage ends by saving the manifest
    """

    def __init__(self):
        self.run_config = None
        self.root = None
        self.writer = None
        self.manifest = None
        self.clock = TradingClock()

    def setup(self, run_config):
        self.run_config = run_config
        self.root = Path(run_config.output)
        self.root.mkdir(parents=True, exist_ok=True)
        self.writer = TableWriter(run_config.precision, run_config.output_delimiter)
        self.manifest = Manifest.load(self.root, required=False)
        self.manifest.delimiter = run_config.output_delimiter
        return self

    def _execute(self, stage, function):
        """Run one stage: drop its previous outputs, call it, record its counts and save the manifest"""
        assert self.run_config is not None, "Pipeline used before setup"
        LOGGER.info("Stage %s started", stage)
        for relative in self.manifest.files_of(stage):
            (self.root / relative).unlink(missing_ok=True)
        self.manifest.forget_stage(stage)
        self.manifest.counts.pop(stage, None)
        try:
            counts = function()
        except StageFailure:
            raise
        except (FlowEventsException, OSError, ValueError, KeyError) as exc:
            LOGGER.error("Stage %s failed: %s", stage, exc)
            raise StageFailure(stage, exc) from exc
        self.manifest.set_counts(stage, counts)
        self.manifest.save()
        LOGGER.info("Stage %s finished: %s", stage, counts)
        return counts

    def _write(self, stage, frame, relative, metadata=None):
        path = self.writer.write(frame, self.root / relative, metadata)
        self.manifest.register(stage, path)
        return path

    def _write_text(self, stage, text, relative):
        path = self.root / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as file_handle:
            file_handle.write(text)
        self.manifest.register(stage, path)
        return path

    def _listed(self, prefix):
        return [self.root / relative for relative in sorted(self.manifest.files) if relative.startswith(prefix)]

    def _read_bars(self):
        paths = self._listed("bars/")
        if not paths:
            raise FlowEventsException(f"no bar files in {self.root / 'bars'}, run classify or synth first")
        bars = {}
        for path in paths:
            series = self.writer.read_bars(path)
            bars[series.stock_id] = series
        return bars

    def _read_events(self):
        frame = self.writer.read(self.root / "events.csv", dtype={"stock_id": str, "date": str, "sign": str})
        return events_from_frame(frame)

    ############################################ STAGES ############################################

    def synth(self):
        def stage():
            config = self.run_config
            spec = ScenarioSpec.load(config.scenario) if config.scenario else ScenarioSpec()
            if config.seed is not None:
                spec = dataclasses.replace(spec, seed=config.seed)
            spec.validate()
            if config.synth_mode == "orders":
                events, truth = generate_orderflow(spec)
                self._write_text("synth", serialize_stream(events, config.delimiter), SYNTH_ORDERS)
                self._write("synth", truth.labels_frame(), "synth/labels.csv")
                counts = {"records": len(events), "logical_orders": len(truth.labels)}
            else:
                bars, truth = generate_bars(spec)
                for stock_id in sorted(bars):
                    self.manifest.register("synth", self.writer.write_bars(bars[stock_id], self.root / "bars"))
                counts = {"stocks": len(bars), "days": spec.days}
            (self.root / "synth").mkdir(parents=True, exist_ok=True)
            self.manifest.register("synth", truth.dump(self.root / "synth" / "truth.json"))
            spec.dump(self.root / "synth" / "scenario.json")
            self.manifest.register("synth", self.root / "synth" / "scenario.json")
            counts["injected_events"] = len(spec.events)
            return counts

        return self._execute("synth", stage)

    def _input_paths(self):
        if self.run_config.inputs:
            self.run_config.check_inputs()
            return [Path(path) for path in self.run_config.inputs]
        if SYNTH_ORDERS in self.manifest.files:
            return [self.root / SYNTH_ORDERS]
        raise ConfigurationException("no order-flow inputs configured and no synthetic order flow present")

    def ingest(self):
        def stage():
            config = self.run_config
            parser = OrderFileParser(config.delimiter)
            streams, rejects, accepted = {}, [], 0
            for path in self._input_paths():
                result = parser.parse(path)
                accepted += result.accepted_count
                rejects.extend((str(path), reject.line_number, reject.getMsg()) for reject in result.rejects)
                for stock_id, events in result.by_stock().items():
                    streams.setdefault(stock_id, []).extend(events)
            excluded = 0
            for stock_id in sorted(streams):
                # stable merge of the per-file streams
                events = sorted(streams[stock_id], key=lambda event: event.sort_key)
                if config.exclude_outside_sessions:
                    events, dropped = restrict_to_sessions(events, self.clock)
                    excluded += dropped
                self._write_text("ingest", serialize_stream(events, config.delimiter), f"orders/{stock_id}.csv")
            self._write("ingest", pd.DataFrame(rejects, columns=["file", "line", "message"]), "rejects.csv")
            return {"accepted": accepted, "rejected": len(rejects), "excluded": excluded, "stocks": len(streams)}

        return self._execute("ingest", stage)

    def classify(self):
        def stage():
            config = self.run_config
            split_table = read_split_table(config.split_table, config.delimiter)
            parser = OrderFileParser(config.delimiter)
            rows, days = [], 0
            for path in self._listed("orders/"):
                stock_id = path.stem
                parsed = parser.parse(path)
                series, diagnostics = replay_stock(stock_id, parsed.events, self.clock)
                if parsed.rejected_count:
                    LOGGER.warning("Stock %s: %d written records rejected on replay", stock_id, parsed.rejected_count)
                    diagnostics[REJECTED_RECORD] += parsed.rejected_count
                rows.extend((stock_id, kind, count) for kind, count in sorted(diagnostics.items()))
                if series.n_days == 0:
                    LOGGER.warning("Stock %s has no trading day with quotes, no bars written", stock_id)
                    continue
                series = apply_split_adjustment(series, split_table)
                self.manifest.register("classify", self.writer.write_bars(series, self.root / "bars"))
                days += series.n_days
            self._write("classify", pd.DataFrame(rows, columns=["stock_id", "diagnostic", "count"]), "diagnostics.csv")
            return {"stock_days": days, "diagnostics": int(sum(row[2] for row in rows))}

        return self._execute("classify", stage)

    def detect(self):
        def stage():
            bars = self._read_bars()
            events = detect_all([ReturnSeries.from_bars(bars[stock]) for stock in sorted(bars)], self.run_config.filter)
            self._write("detect", events_frame(events), "events.csv", {"filter": self.run_config.filter.describe()})
            return {
                "events": len(events),
                "positive": sum(event.sign is EventSign.POSITIVE for event in events),
                "negative": sum(event.sign is EventSign.NEGATIVE for event in events),
            }

        return self._execute("detect", stage)

    def study(self):
        def stage():
            config = self.run_config
            bars = self._read_bars()
            events = self._read_events()
            study = EventStudy(
                config.study_quantities,
                pre=config.pre_window,
                post=config.post_window,
                groups=config.groups,
                exclude_event_days=config.exclude_event_days,
            )
            result = study.run(bars, events)
            metadata = dict(CURVE_METADATA, pre_window=config.pre_window, post_window=config.post_window)

            curves = [
                average.to_frame().assign(group=group, quantity=quantity)
                for (group, quantity), average in sorted(result.averages.items())
            ]
            curve_columns = ["group", "quantity", "t", "mean", "count"]
            self._write("study", _concat(curves, curve_columns), "curves.csv", metadata)
            cumulative = [
                curve.to_frame().assign(group=group) for group, curve in sorted(result.cumulative.items())
            ]
            self._write("study", _concat(cumulative, ["group", "t", "mean", "count"]), "cumulative.csv", metadata)
            peaks = [peak_table(result.averages, group) for group in sorted(result.cumulative)]
            peak_columns = ["group", "aggressiveness", "side", "t_max", "v_max", "t_max_number", "n_max"]
            self._write("study", _concat(peaks, peak_columns), "peaks.csv")
            rates = [("normal_rate", name, value) for name, value in sorted(result.normal_rates.items())]
            rates += [("unconditional_mean", name, value) for name, value in sorted(result.unconditional.items())]
            self._write("study", pd.DataFrame(rates, columns=["kind", "name", "value"]), "rates.csv")
            patterns = [
                pattern_frame(stock_id, [result.patterns[key] for key in sorted(result.patterns) if key[0] == stock_id])
                for stock_id in sorted({key[0] for key in result.patterns})
            ]
            self._write(
                "study", _concat(patterns, ["stock_id", "quantity", "minute", "pattern", "mask"]), "patterns.csv"
            )
            counts = {f"group_{name}": size for name, size in sorted(result.group_sizes.items())}
            counts["curves"] = len(result.averages)
            return counts

        return self._execute("study", stage)

    def fit(self):
        def stage():
            config = self.run_config
            averages = read_curves(self.writer, self.root / "curves.csv")
            fits, report = fit_report(
                averages,
                config.range_overrides,
                config.fit_range,
                fittable=lambda quantity: Quantity(quantity).fittable,
            )
            self._write("fit", report, "fit_report.csv")
            return {"fitted": len(fits), "refused": int(len(report) - len(fits))}

        return self._execute("fit", stage)

    def run(self):
        """
        Whole pipeline. With a scenario the synthetic stage replaces the order-flow inputs: bars mode goes straight
        to detect, orders mode runs the generated stream through ingest and classify.

        Returns:
            the manifest
        """
        config = self.run_config
        if not config.scenario and not config.inputs:
            raise StageFailure("config", ConfigurationException("either [paths] inputs or [synth] scenario is needed"))
        stages = []
        if config.scenario:
            stages.append(self.synth)
        if not config.scenario or config.synth_mode == "orders":
            stages += [self.ingest, self.classify]
        stages += [self.detect, self.study, self.fit]
        for stage in stages:
            stage()
        return self.manifest


def _concat(frames, columns):
    frames = [frame for frame in frames if len(frame)]
    if not frames:
        return pd.DataFrame(columns=columns)
    return pd.concat(frames, ignore_index=True)[columns]


def read_curves(writer, path):
    """
    Group curves written by the study stage

    Returns:
        dict (group, quantity) -> GroupAverage
    """
    frame = writer.read(path, dtype={"group": str, "quantity": str})
    averages = {}
    for (group, quantity), rows in frame.groupby(["group", "quantity"], sort=True):
        rows = rows.sort_values("t")
        averages[(group, quantity)] = GroupAverage(
            group=group,
            quantity=quantity,
            offsets=rows["t"].to_numpy(dtype=int),
            mean=rows["mean"].to_numpy(dtype=float),
            counts=rows["count"].to_numpy(dtype=int),
        )
    return averages
