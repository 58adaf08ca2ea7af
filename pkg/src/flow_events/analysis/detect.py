"""
detect.py:

Extreme intraday price changes. A window (t - dt, t] of one trading day qualifies when its cumulative log return R
passes the absolute filter |R| >= threshold_abs and the relative filter |R| >= volatility_multiple * <v(dt)>, where
v(t, dt) = sqrt(sum of squared returns in the window) and <v(dt)> is its average over the sample. The event minute is
the end t of the smallest qualifying window. Windows never cross the overnight gap; the lunch break is not a gap.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd

from flow_events.common.data_types.event_data import EventSign, ExtremeEvent
from flow_events.common.data_types.exceptions import ConfigurationException
from flow_events.common.utils.trading_clock import MINUTES_PER_DAY

LOGGER = logging.getLogger("detect")

VOLATILITY_REFERENCES = ("length", "clock")


@dataclass(frozen=True)
class FilterConfig:
    threshold_abs: float = 0.04
    window_max: int = 60
    volatility_multiple: float = 6.0
    opening_exclusion: int = 5
    closing_exclusion: int = 60
    volatility_reference: str = "length"

    def __post_init__(self):
        if not self.threshold_abs > 0:
            raise ConfigurationException(f"threshold_abs must be > 0, got {self.threshold_abs}")
        if self.window_max < 1:
            raise ConfigurationException(f"window_max must be >= 1, got {self.window_max}")
        if not self.volatility_multiple > 0:
            raise ConfigurationException(f"volatility_multiple must be > 0, got {self.volatility_multiple}")
        if self.opening_exclusion < 0 or self.closing_exclusion < 0:
            raise ConfigurationException("exclusions must be >= 0")
        if self.first_minute > self.last_minute:
            raise ConfigurationException("exclusions leave no admissible event minute")
        if self.volatility_reference not in VOLATILITY_REFERENCES:
            raise ConfigurationException(
                f"volatility_reference must be one of {VOLATILITY_REFERENCES}, got {self.volatility_reference}"
            )

    @classmethod
    def from_config(cls, config):
        return cls(
            threshold_abs=config.get_number("detect", "threshold_abs"),
            window_max=config.get_number("detect", "window_max", int),
            volatility_multiple=config.get_number("detect", "volatility_multiple"),
            opening_exclusion=config.get_number("detect", "opening_exclusion", int),
            closing_exclusion=config.get_number("detect", "closing_exclusion", int),
            volatility_reference=config.get("detect", "volatility_reference"),
        )

    @property
    def first_minute(self):
        return self.opening_exclusion + 1

    @property
    def last_minute(self):
        return MINUTES_PER_DAY - self.closing_exclusion

    def describe(self):
        return (
            f"threshold_abs={self.threshold_abs} window_max={self.window_max} "
            f"volatility_multiple={self.volatility_multiple} opening_exclusion={self.opening_exclusion} "
            f"closing_exclusion={self.closing_exclusion}"
        )


def log_returns(mid_price):
    """
    Per-minute log returns of a (days, 240) mid-price grid. Column 0 (the first minute of each day) is NaN since no
    return is formed across the overnight gap.
    """
    mid_price = np.asarray(mid_price, dtype=float)
    returns = np.full(mid_price.shape, np.nan)
    if mid_price.size:
        returns[:, 1:] = np.diff(np.log(mid_price), axis=1)
    return returns


@dataclass(frozen=True)
class ReturnSeries:
    """One stock's log mid-price and per-minute log returns on the (days, 240) grid"""

    stock_id: str
    dates: Tuple[str, ...]
    log_mid: np.ndarray

    @classmethod
    def from_bars(cls, series):
        return cls(series.stock_id, series.dates, np.log(series.mid_price))

    @classmethod
    def from_mid(cls, stock_id, mid_price, dates=None):
        mid_price = np.asarray(mid_price, dtype=float)
        dates = tuple(dates) if dates is not None else tuple(str(day) for day in range(mid_price.shape[0]))
        return cls(stock_id, dates, np.log(mid_price))

    @property
    def n_days(self):
        return self.log_mid.shape[0]

    @property
    def returns(self):
        values = np.full(self.log_mid.shape, np.nan)
        values[:, 1:] = np.diff(self.log_mid, axis=1)
        return values

    def _squared_prefix(self):
        squared = np.nan_to_num(self.returns) ** 2
        return np.concatenate([np.zeros((self.n_days, 1)), np.cumsum(squared, axis=1)], axis=1)

    def window_return(self, window):
        """
        R(t, dt) for every bar t (column t - 1). NaN where the window would start before the day's first return,
        i.e. where t - dt < 1.
        """
        values = np.full(self.log_mid.shape, np.nan)
        if window < MINUTES_PER_DAY:
            values[:, window:] = self.log_mid[:, window:] - self.log_mid[:, :-window]
        return values

    def window_volatility(self, window):
        """v(t, dt) = sqrt(sum of r^2 over (t - dt, t]) with the same validity as window_return"""
        values = np.full(self.log_mid.shape, np.nan)
        if window < MINUTES_PER_DAY:
            prefix = self._squared_prefix()
            values[:, window:] = np.sqrt(np.clip(prefix[:, window + 1:] - prefix[:, 1:-window], 0.0, None))
        return values


def realized_volatility(returns):
    """sqrt of the sum of squared returns of one window"""
    return math.sqrt(math.fsum(value * value for value in returns))


def average_window_volatility(returns, window, reference="length"):
    """
    Average v(t, dt) of one stock

    Args:
        returns: ReturnSeries
        window: window length dt in minutes
        reference: "length" averages all windows of this length in the sample, "clock" averages over days at each
                   window end minute
    Returns:
        float for "length", (240,) array for "clock"; NaN where no admissible window exists
    """
    volatility = returns.window_volatility(window)
    with np.errstate(invalid="ignore"):
        if reference == "clock":
            counts = np.sum(np.isfinite(volatility), axis=0)
            sums = np.nansum(volatility, axis=0)
            return np.where(counts > 0, sums / np.where(counts > 0, counts, 1), np.nan)
        finite = volatility[np.isfinite(volatility)]
    if finite.size == 0:
        LOGGER.warning("Stock %s: no admissible window of %d minutes, relative filter disabled", returns.stock_id,
                       window)
        return float("nan")
    return float(np.mean(finite))


def detect_events(returns, config=None):
    """
    Events of one stock, before per-day deduplication

    Args:
        returns: ReturnSeries
        config: FilterConfig
    Returns:
        list of ExtremeEvent, one per qualifying window end minute, sorted by (day, minute)
    """
    config = config if config is not None else FilterConfig()
    shape = returns.log_mid.shape
    found_window = np.zeros(shape, dtype=int)
    found_return = np.full(shape, np.nan)
    admissible = np.zeros(shape, dtype=bool)
    admissible[:, config.first_minute - 1:config.last_minute] = True

    for window in range(1, config.window_max + 1):
        cumulative = returns.window_return(window)
        reference = average_window_volatility(returns, window, config.volatility_reference)
        magnitude = np.abs(cumulative)
        with np.errstate(invalid="ignore"):
            passing = np.isfinite(cumulative) & (magnitude >= config.threshold_abs)
            relative = config.volatility_multiple * np.asarray(reference)
            passing &= np.where(np.isfinite(relative), magnitude >= relative, True)
        passing &= admissible & (found_window == 0)
        found_window[passing] = window
        found_return[passing] = cumulative[passing]

    events = []
    for day, column in zip(*np.nonzero(found_window)):
        value = float(found_return[day, column])
        events.append(
            ExtremeEvent(
                stock_id=returns.stock_id,
                day=int(day),
                minute=int(column) + 1,
                date=returns.dates[day],
                sign=EventSign.of(value),
                window=int(found_window[day, column]),
                cumulative_return=value,
            )
        )
    return events


def deduplicate_first_per_day(events):
    """Keep the earliest event of every (stock, day), result sorted by key"""
    first = {}
    for event in events:
        slot = (event.stock_id, event.day)
        if slot not in first or event.minute < first[slot].minute:
            first[slot] = event
    return sorted(first.values(), key=lambda event: event.key)


def detect_all(return_series, config=None):
    """
    Detection over many stocks, deduplicated

    Args:
        return_series: iterable of ReturnSeries
        config: FilterConfig
    Returns:
        list of ExtremeEvent sorted by (stock, day, minute)
    """
    config = config if config is not None else FilterConfig()
    LOGGER.info("Filter settings: %s", config.describe())
    raw = []
    for returns in return_series:
        raw.extend(detect_events(returns, config))
    events = deduplicate_first_per_day(raw)
    LOGGER.info(
        "%d window end minutes qualify, %d events after keeping the first per stock-day", len(raw), len(events)
    )
    return events


def events_frame(events):
    return pd.DataFrame([event.to_row() for event in events], columns=ExtremeEvent.get_csv_header())


def events_from_frame(frame):
    return [
        ExtremeEvent(
            stock_id=str(row.stock_id),
            day=int(row.day),
            minute=int(row.minute),
            date=str(row.date),
            sign=EventSign(row.sign),
            window=int(row.window),
            cumulative_return=float(row.cumulative_return),
        )
        for row in frame.itertuples(index=False)
    ]
