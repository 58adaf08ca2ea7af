"""
@brief Per-stock minute bars on the day x intraday-minute grid

A BarSeries stores one stock's bars as numpy arrays of shape (days, 240) so that the analysis stages can work on whole
grids. MinuteBar is the per-minute view of the same data used where a single bar is inspected.
"""
import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from flow_events.common.data_types.exceptions import DimensionMismatchException
from flow_events.common.data_types.order_data import Aggressiveness, InvestorClass, Side
from flow_events.common.utils.trading_clock import MINUTES_PER_DAY

# (side, aggressiveness, investor class) cells of the classified flow, in file column order
CLASS_KEYS: List[Tuple[Side, Aggressiveness, InvestorClass]] = list(
    itertools.product(Side, Aggressiveness, InvestorClass)
)
CLASS_INDEX = {key: index for index, key in enumerate(CLASS_KEYS)}

BASE_COLUMNS = [
    "stock_id",
    "date",
    "day",
    "minute",
    "best_bid",
    "best_ask",
    "mid_price",
    "spread",
    "exec_buy",
    "exec_sell",
]


def class_column(kind, key):
    """Column name of one class cell, kind is 'vol' or 'cnt'"""
    side, aggressiveness, investor = key
    return f"{kind}.{side.label}.{aggressiveness.value}.{investor.label}"


VOLUME_COLUMNS = [class_column("vol", key) for key in CLASS_KEYS]
COUNT_COLUMNS = [class_column("cnt", key) for key in CLASS_KEYS]
BAR_COLUMNS = BASE_COLUMNS + VOLUME_COLUMNS + COUNT_COLUMNS + ["split_factor"]


def class_mask(side=None, aggressiveness=None, investor_class=None):
    """
    Boolean selector over CLASS_KEYS. Any argument left None matches everything; aggressiveness may also be the
    string "market" to select partially filled and filled orders together.
    """

    def matches(key):
        key_side, key_aggressiveness, key_investor = key
        if side is not None and key_side is not side:
            return False
        if investor_class is not None and key_investor is not investor_class:
            return False
        if aggressiveness == "market":
            return key_aggressiveness.is_market
        return aggressiveness is None or key_aggressiveness is aggressiveness

    return np.array([matches(key) for key in CLASS_KEYS], dtype=bool)


@dataclass(frozen=True)
class MinuteBar:
    stock_id: str
    day_index: int
    intraday_index: int
    mid_price: float
    best_bid: float
    best_ask: float
    volume_by_class: Dict[tuple, float]
    count_by_class: Dict[tuple, float]
    split_factor: float = 1.0

    @property
    def spread(self):
        return self.best_ask - self.best_bid


@dataclass(frozen=True)
class BarSeries:
    """All accepted stock-days of one stock, 240 bars each"""

    stock_id: str
    dates: Tuple[str, ...]
    best_bid: np.ndarray
    best_ask: np.ndarray
    exec_buy: np.ndarray
    exec_sell: np.ndarray
    volume: np.ndarray
    count: np.ndarray
    split_factor: np.ndarray = field(default=None)

    def __post_init__(self):
        shape = (len(self.dates), MINUTES_PER_DAY)
        if self.split_factor is None:
            object.__setattr__(self, "split_factor", np.ones(len(self.dates)))
        for name in ("best_bid", "best_ask", "exec_buy", "exec_sell"):
            values = np.asarray(getattr(self, name), dtype=float)
            if values.shape != shape:
                raise DimensionMismatchException(shape, values.shape)
            object.__setattr__(self, name, values)
        for name in ("volume", "count"):
            values = np.asarray(getattr(self, name), dtype=float)
            if values.shape != shape + (len(CLASS_KEYS),):
                raise DimensionMismatchException(shape + (len(CLASS_KEYS),), values.shape)
            object.__setattr__(self, name, values)
        object.__setattr__(self, "split_factor", np.asarray(self.split_factor, dtype=float))
        object.__setattr__(self, "dates", tuple(self.dates))
        for name in ("best_bid", "best_ask", "exec_buy", "exec_sell", "volume", "count", "split_factor"):
            getattr(self, name).flags.writeable = False

    @property
    def n_days(self):
        return len(self.dates)

    @property
    def mid_price(self):
        return (self.best_bid + self.best_ask) / 2.0

    @property
    def spread(self):
        return self.best_ask - self.best_bid

    def select(self, kind="vol", side=None, aggressiveness=None, investor_class=None):
        """
        Sum of the class cells matching the selector on the (days, 240) grid

        Args:
            kind: "vol" for share volumes, "cnt" for order numbers
            side, aggressiveness, investor_class: see class_mask
        Returns:
            numpy array of shape (days, 240)
        """
        source = self.volume if kind == "vol" else self.count
        return source[:, :, class_mask(side, aggressiveness, investor_class)].sum(axis=2)

    def bar(self, day_index, intraday_index):
        """Single MinuteBar view, intraday_index is 1-based"""
        column = intraday_index - 1
        return MinuteBar(
            stock_id=self.stock_id,
            day_index=day_index,
            intraday_index=intraday_index,
            mid_price=float(self.mid_price[day_index, column]),
            best_bid=float(self.best_bid[day_index, column]),
            best_ask=float(self.best_ask[day_index, column]),
            volume_by_class={
                key: float(self.volume[day_index, column, index]) for index, key in enumerate(CLASS_KEYS)
            },
            count_by_class={
                key: float(self.count[day_index, column, index]) for index, key in enumerate(CLASS_KEYS)
            },
            split_factor=float(self.split_factor[day_index]),
        )

    def replace(self, **changes):
        """New series with some arrays replaced, the originals stay untouched"""
        values = {
            "stock_id": self.stock_id,
            "dates": self.dates,
            "best_bid": self.best_bid,
            "best_ask": self.best_ask,
            "exec_buy": self.exec_buy,
            "exec_sell": self.exec_sell,
            "volume": self.volume,
            "count": self.count,
            "split_factor": self.split_factor,
        }
        values.update(changes)
        return BarSeries(**{key: np.array(value) if isinstance(value, np.ndarray) else value
                            for key, value in values.items()})

    def to_frame(self):
        """Long table, one row per bar, columns in BAR_COLUMNS order"""
        days, minutes = len(self.dates), MINUTES_PER_DAY
        frame = pd.DataFrame(
            {
                "stock_id": self.stock_id,
                "date": np.repeat(np.array(self.dates, dtype=object), minutes),
                "day": np.repeat(np.arange(days), minutes),
                "minute": np.tile(np.arange(1, minutes + 1), days),
                "best_bid": self.best_bid.ravel(),
                "best_ask": self.best_ask.ravel(),
                "mid_price": self.mid_price.ravel(),
                "spread": self.spread.ravel(),
                "exec_buy": self.exec_buy.ravel(),
                "exec_sell": self.exec_sell.ravel(),
            }
        )
        cells = {}
        for index, column in enumerate(VOLUME_COLUMNS):
            cells[column] = self.volume[:, :, index].ravel()
        for index, column in enumerate(COUNT_COLUMNS):
            cells[column] = self.count[:, :, index].ravel()
        cells["split_factor"] = np.repeat(self.split_factor, minutes)
        return pd.concat([frame, pd.DataFrame(cells)], axis=1)[BAR_COLUMNS]

    @staticmethod
    def from_frame(frame):
        """Inverse of to_frame. Rows must be sorted by day then minute."""
        missing = [column for column in BAR_COLUMNS if column not in frame.columns]
        if missing:
            raise DimensionMismatchException(BAR_COLUMNS, list(frame.columns))
        minutes = MINUTES_PER_DAY
        if len(frame) % minutes:
            raise DimensionMismatchException(f"multiple of {minutes} rows", len(frame))
        days = len(frame) // minutes
        frame = frame.sort_values(["day", "minute"], kind="stable")

        def grid(column):
            return frame[column].to_numpy(dtype=float).reshape(days, minutes)

        return BarSeries(
            stock_id=str(frame["stock_id"].iloc[0]) if days else "",
            dates=tuple(str(date) for date in frame["date"].to_numpy()[::minutes]),
            best_bid=grid("best_bid"),
            best_ask=grid("best_ask"),
            exec_buy=grid("exec_buy"),
            exec_sell=grid("exec_sell"),
            volume=np.stack([grid(column) for column in VOLUME_COLUMNS], axis=2)
            if days else np.zeros((0, minutes, len(CLASS_KEYS))),
            count=np.stack([grid(column) for column in COUNT_COLUMNS], axis=2)
            if days else np.zeros((0, minutes, len(CLASS_KEYS))),
            split_factor=frame["split_factor"].to_numpy(dtype=float)[::minutes],
        )
