"""
study.py:

Event-aligned averages. A stock's (days, 240) grid is read as one contiguous minute axis, so windows around an event
run into the next trading day after the close and into the previous one before the open. Trajectories of all events
in a group are averaged with equal weight per minute t in [-pre, post].
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
import pandas as pd

from flow_events.analysis.classify import normal_period_rates
from flow_events.analysis.deseason import deseasonalize, estimate_pattern
from flow_events.analysis.detect import log_returns
from flow_events.analysis.quantities import Quantity, compute_quantity
from flow_events.common.data_types.event_data import EventSign
from flow_events.common.data_types.exceptions import ConfigurationException, EmptyGroupException
from flow_events.common.data_types.order_data import Aggressiveness, InvestorClass, Side
from flow_events.common.utils.trading_clock import MINUTES_PER_DAY

LOGGER = logging.getLogger("study")

PRE_WINDOW = 100
POST_WINDOW = 200
GROUP_DEFINITIONS = ("sign", "all")


def offsets(pre=PRE_WINDOW, post=POST_WINDOW):
    return np.arange(-pre, post + 1)


@dataclass(frozen=True)
class EventTrajectory:
    """values[i] belongs to t = offsets[i]; in_sample is False for slots beyond the sample's first or last day"""

    event: object
    quantity: str
    values: np.ndarray
    in_sample: np.ndarray
    pre: int = PRE_WINDOW

    @property
    def offsets(self):
        return np.arange(-self.pre, len(self.values) - self.pre)


def _window(grid, event, pre, post):
    flat = np.asarray(grid, dtype=float).reshape(-1)
    center = event.day * MINUTES_PER_DAY + event.minute - 1
    positions = np.arange(center - pre, center + post + 1)
    in_sample = (positions >= 0) & (positions < flat.size)
    values = np.full(positions.shape, np.nan)
    values[in_sample] = flat[positions[in_sample]]
    return values, in_sample


def extract_trajectory(event, grid, quantity="", pre=PRE_WINDOW, post=POST_WINDOW):
    """
    Trajectory of one event

    Args:
        event: ExtremeEvent, its day indexes the grid rows
        grid: (days, 240) deseasonalized values of the event's stock
        quantity: name carried into the trajectory
    Returns:
        EventTrajectory of pre + post + 1 slots
    """
    values, in_sample = _window(grid, event, pre, post)
    return EventTrajectory(event, quantity, values, in_sample, pre)


@dataclass(frozen=True)
class GroupAverage:
    group: str
    quantity: str
    offsets: np.ndarray
    mean: np.ndarray
    counts: np.ndarray

    @property
    def peak(self):
        return find_peak(self)

    def value_at(self, minute):
        return float(self.mean[minute - self.offsets[0]])

    def to_frame(self):
        return pd.DataFrame({"t": self.offsets, "mean": self.mean, "count": self.counts})


def group_average(trajectories, group="", quantity=None):
    """
    Per-minute mean over the finite values of a group's trajectories

    Raises:
        EmptyGroupException for an empty group
    """
    trajectories = sorted(trajectories, key=lambda trajectory: trajectory.event.key)
    if not trajectories:
        raise EmptyGroupException(f"group '{group}' of {quantity or 'quantity'} is empty")
    stacked = np.vstack([trajectory.values for trajectory in trajectories])
    finite = np.isfinite(stacked)
    counts = finite.sum(axis=0)
    totals = np.where(finite, stacked, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(counts > 0, totals / np.where(counts > 0, counts, 1), np.nan)
    return GroupAverage(
        group=group,
        quantity=quantity if quantity is not None else trajectories[0].quantity,
        offsets=trajectories[0].offsets,
        mean=mean,
        counts=counts,
    )


def find_peak(average):
    """
    (t_max, peak value) of a group curve. Equal maxima resolve to the t closest to 0, then to the negative t.

    Raises:
        EmptyGroupException when no minute has a value
    """
    finite = np.isfinite(average.mean)
    if not np.any(finite):
        raise EmptyGroupException(f"curve of {average.quantity} in group '{average.group}' is fully masked")
    peak = np.max(average.mean[finite])
    candidates = [int(minute) for minute in average.offsets[finite & (average.mean == peak)]]
    return min(candidates, key=lambda minute: (abs(minute), minute)), float(peak)


@dataclass(frozen=True)
class AlignedCumulativeReturn:
    sign: str
    offsets: np.ndarray
    curve: np.ndarray
    counts: np.ndarray

    def to_frame(self):
        return pd.DataFrame({"t": self.offsets, "mean": self.curve, "count": self.counts})


def _event_cumulative(event, returns, pre, post):
    """
    Cumulative log return of one event relative to t = 0. The overnight return is taken as 0; slots needing data
    outside the sample are NaN.
    """
    values, in_sample = _window(returns, event, pre, post)
    values = np.where(in_sample, np.nan_to_num(values), np.nan)
    curve = np.full(values.shape, np.nan)
    curve[pre] = 0.0
    # t > 0: sum of r(1..t)
    curve[pre + 1:] = np.cumsum(values[pre + 1:])
    # t < 0: minus the sum of r(t+1..0)
    curve[:pre] = -np.cumsum(values[pre:0:-1])[::-1]
    return curve


def aligned_cumulative_return(events, returns_by_stock, sign="", pre=PRE_WINDOW, post=POST_WINDOW):
    """
    Mean cumulative log return around events, shifted to 0 at t = 0

    Args:
        events: ExtremeEvents of one sign group
        returns_by_stock: dict stock_id -> (days, 240) raw log returns (NaN at each day's first minute)
        sign: group label
    Raises:
        EmptyGroupException for an empty group
    """
    events = sorted(events, key=lambda event: event.key)
    if not events:
        raise EmptyGroupException(f"no events in group '{sign}' for the cumulative return")
    curves = np.vstack([_event_cumulative(event, returns_by_stock[event.stock_id], pre, post) for event in events])
    finite = np.isfinite(curves)
    counts = finite.sum(axis=0)
    totals = np.where(finite, curves, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        curve = np.where(counts > 0, totals / np.where(counts > 0, counts, 1), np.nan)
    curve[pre] = 0.0
    return AlignedCumulativeReturn(sign, offsets(pre, post), curve, counts)


def event_groups(events, definitions=("sign",)):
    """
    Split events into named groups

    Args:
        definitions: "sign" gives positive and negative, "all" pools every event
    Returns:
        dict group name -> list of events, empty groups included
    """
    groups = {}
    for definition in definitions:
        if definition == "sign":
            for sign in EventSign:
                groups[sign.value] = [event for event in events if event.sign is sign]
        elif definition == "all":
            groups["all"] = list(events)
        else:
            raise ConfigurationException(
                f"unknown group definition '{definition}', expected one of {GROUP_DEFINITIONS}"
            )
    return groups


def peak_table(averages, group):
    """
    Peak summary per (aggressiveness, side) of one group: t_max and V_max of the volume curve, t'_max and N_max of
    the order number curve. Missing or fully masked curves give NaN entries.
    """
    rows = []
    for aggressiveness in Aggressiveness:
        for side in Side:
            row = {"group": group, "aggressiveness": aggressiveness.value, "side": side.label}
            for kind, time_column, value_column in (("vol", "t_max", "v_max"), ("cnt", "t_max_number", "n_max")):
                average = averages.get((group, f"{kind}.{side.label}.{aggressiveness.value}"))
                try:
                    row[time_column], row[value_column] = find_peak(average) if average else (np.nan, np.nan)
                except EmptyGroupException:
                    row[time_column], row[value_column] = np.nan, np.nan
            rows.append(row)
    return pd.DataFrame(rows, columns=["group", "aggressiveness", "side", "t_max", "v_max", "t_max_number", "n_max"])


@dataclass
class StudyResult:
    averages: Dict[Tuple[str, str], GroupAverage] = field(default_factory=dict)
    cumulative: Dict[str, AlignedCumulativeReturn] = field(default_factory=dict)
    patterns: Dict[Tuple[str, str], object] = field(default_factory=dict)
    normal_rates: Dict[str, float] = field(default_factory=dict)
    unconditional: Dict[str, float] = field(default_factory=dict)
    group_sizes: Dict[str, int] = field(default_factory=dict)


class EventStudy:
    """
    Runs the whole study on a set of stocks: patterns, deseasonalized grids, group averages of every quantity, the
    aligned cumulative returns and the normal-period reference levels.
    """

    def __init__(self, quantities, pre=PRE_WINDOW, post=POST_WINDOW, groups=("sign",), exclude_event_days=False):
        self.quantities = [Quantity(name) for name in quantities]
        self.pre = pre
        self.post = post
        self.groups = tuple(groups)
        self.exclude_event_days = exclude_event_days

    @classmethod
    def from_config(cls, config, quantities):
        return cls(
            quantities,
            pre=config.get_number("study", "pre_window", int),
            post=config.get_number("study", "post_window", int),
            groups=config.get_list("study", "groups") or ["sign"],
            exclude_event_days=config.get_flag("deseason", "exclude_event_days"),
        )

    def _grids(self, series, quantity, event_days, result):
        raw = compute_quantity(series, quantity.name)
        if not quantity.deseasonalized:
            return raw
        excluded = None
        if self.exclude_event_days:
            excluded = np.zeros(series.n_days, dtype=bool)
            excluded[sorted(event_days)] = True
        pattern = estimate_pattern(raw, quantity.name, excluded)
        result.patterns[(series.stock_id, quantity.name)] = pattern
        return deseasonalize(raw, pattern, series.stock_id).values

    def run(self, bar_series, events):
        """
        Args:
            bar_series: dict stock_id -> BarSeries
            events: deduplicated ExtremeEvents
        Returns:
            StudyResult; groups without events are logged and skipped
        """
        result = StudyResult()
        groups = event_groups(events, self.groups)
        result.group_sizes = {name: len(members) for name, members in groups.items()}
        event_days = {}
        for event in events:
            event_days.setdefault(event.stock_id, set()).add(event.day)
        stocks = sorted({event.stock_id for event in events})

        for quantity in self.quantities:
            grids = {
                stock: self._grids(bar_series[stock], quantity, event_days.get(stock, ()), result) for stock in stocks
            }
            for name, members in groups.items():
                if not members:
                    continue
                trajectories = [
                    extract_trajectory(event, grids[event.stock_id], quantity.name, self.pre, self.post)
                    for event in members
                ]
                result.averages[(name, quantity.name)] = group_average(trajectories, name, quantity.name)

        returns = {stock: log_returns(bar_series[stock].mid_price) for stock in stocks}
        for name, members in groups.items():
            if members:
                result.cumulative[name] = aligned_cumulative_return(members, returns, name, self.pre, self.post)
            else:
                LOGGER.warning("Group '%s' has no events, skipped", name)

        all_series = [bar_series[stock] for stock in sorted(bar_series)]
        for investor in InvestorClass:
            for side in (None,) + tuple(Side):
                rates = normal_period_rates(all_series, investor, side)
                suffix = f".{side.label}" if side is not None else ""
                for kind, value in zip(("market", "limit", "cancel"), rates.as_tuple()):
                    result.normal_rates[f"rate.{investor.label}.{kind}{suffix}"] = value
        for name in ("buy_imbalance", "sell_imbalance"):
            values = np.concatenate([compute_quantity(series, name).ravel() for series in all_series] or [[]])
            finite = values[np.isfinite(values)]
            result.unconditional[name] = float(np.mean(finite)) if finite.size else float("nan")
        return result
