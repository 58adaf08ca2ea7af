"""
classify.py:

Order aggressiveness taxonomy. A submission that reaches the opposite best quote is an effective market order: filled
when it executes completely, otherwise split into an executed partially filled part and a resting limit part. Every
other submission is a limit order and a cancellation carries the remainder it withdraws. Also holds the per-minute
ratios built on the classified flow: volume imbalance and relative order rates.
"""
import logging
from dataclasses import dataclass

import numpy as np

from flow_events.common.data_types.bar_data import CLASS_INDEX, CLASS_KEYS
from flow_events.common.data_types.order_data import (
    Aggressiveness,
    LogicalOrder,
    OrderClass,
)
from flow_events.common.utils.trading_clock import MINUTES_PER_DAY, TradingClock

LOGGER = logging.getLogger("classify")

EMPTY_OPPOSITE_SIDE = "empty_opposite_side"
MARKETABLE_WITHOUT_FILL = "marketable_without_fill"


def _logical(order, aggressiveness, size, flags=()):
    return LogicalOrder(
        order_id=order.order_id,
        stock_id=order.stock_id,
        date=order.date,
        seconds=order.seconds,
        order_class=OrderClass(aggressiveness, order.side, order.investor_class),
        size=size,
        flags=tuple(flags),
    )


def classify_submission(order, book, fills):
    """
    Label one submission

    Args:
        order: the submit OrderEvent
        book: BookState immediately before the submission
        fills: executions of the incoming order on arrival (Fill objects or share counts)
    Returns:
        list of one or two LogicalOrder
    """
    executed = sum(getattr(fill, "size", fill) for fill in fills)
    if not book.is_marketable(order.side, order.price):
        flags = (EMPTY_OPPOSITE_SIDE,) if book.opposite_best(order.side) is None else ()
        return [_logical(order, Aggressiveness.LIMIT, order.size, flags)]
    if executed >= order.size:
        return [_logical(order, Aggressiveness.FILLED, order.size)]
    if executed > 0:
        return [
            _logical(order, Aggressiveness.PARTIALLY_FILLED, executed),
            _logical(order, Aggressiveness.LIMIT, order.size - executed),
        ]
    return [_logical(order, Aggressiveness.LIMIT, order.size, (MARKETABLE_WITHOUT_FILL,))]


def classify_cancellation(order, remaining):
    """The canceled remainder of a resting order"""
    return _logical(order, Aggressiveness.CANCELED, remaining)


def _scalar_or_array(values):
    return float(values) if np.ndim(values) == 0 else values


def imbalance(buy_volume, sell_volume):
    """
    Buy imbalance V_b / (V_b + V_s). Sell imbalance is the same call with the arguments swapped.

    Args:
        buy_volume: buy market-order volume, scalar or array
        sell_volume: sell market-order volume, same shape
    Returns:
        ratio in [0, 1]; NaN where V_b + V_s = 0
    """
    buy_volume = np.asarray(buy_volume, dtype=float)
    sell_volume = np.asarray(sell_volume, dtype=float)
    if np.any(buy_volume < 0) or np.any(sell_volume < 0):
        raise ValueError("Volumes must be non-negative")
    total = buy_volume + sell_volume
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(total > 0, buy_volume / total, np.nan)
    return _scalar_or_array(ratio)


@dataclass(frozen=True)
class RelativeRates:
    """Shares of market orders, limit orders and cancellations in the order count. NaN marks an empty minute."""

    market: object
    limit: object
    cancel: object

    @property
    def defined(self):
        return np.isfinite(self.market)

    def as_tuple(self):
        return self.market, self.limit, self.cancel


def relative_rates(market, limit, cancel):
    """
    Proportions of order numbers

    Args:
        market, limit, cancel: order counts, scalars or arrays of one shape
    Returns:
        RelativeRates; every rate is NaN where the total count is 0
    """
    counts = [np.asarray(value, dtype=float) for value in (market, limit, cancel)]
    if any(np.any(value < 0) for value in counts):
        raise ValueError("Order counts must be non-negative")
    total = counts[0] + counts[1] + counts[2]
    with np.errstate(invalid="ignore", divide="ignore"):
        rates = [_scalar_or_array(np.where(total > 0, value / total, np.nan)) for value in counts]
    return RelativeRates(*rates)


class MinuteClassAccumulator:
    """
    Per-day (240, classes) share sums and order counts of logical orders. Orders outside the trading sessions are
    counted in skipped and otherwise ignored.
    """

    def __init__(self, clock=None):
        self.clock = clock if clock is not None else TradingClock()
        self.volume = {}
        self.count = {}
        self.skipped = 0

    def day(self, date):
        if date not in self.volume:
            self.volume[date] = np.zeros((MINUTES_PER_DAY, len(CLASS_KEYS)))
            self.count[date] = np.zeros((MINUTES_PER_DAY, len(CLASS_KEYS)))
        return self.volume[date], self.count[date]

    def add(self, order):
        minute = self.clock.intraday_index(order.seconds)
        if minute is None:
            self.skipped += 1
            return
        volume, count = self.day(order.date)
        cell = CLASS_INDEX[(order.side, order.aggressiveness, order.investor_class)]
        volume[minute - 1, cell] += order.size
        count[minute - 1, cell] += 1


def aggregate_minute_classes(logical_orders, clock=None):
    """
    Per-minute volume_by_class and count_by_class

    Args:
        logical_orders: iterable of LogicalOrder
        clock: TradingClock, defaults to the standard sessions
    Returns:
        dict date -> (volume, count), both of shape (240, 16) in CLASS_KEYS column order
    """
    accumulator = MinuteClassAccumulator(clock)
    for order in logical_orders:
        accumulator.add(order)
    return {date: (accumulator.volume[date], accumulator.count[date]) for date in accumulator.volume}


def rate_counts(series, investor_class, side=None):
    """
    Market, limit and cancel order counts of one investor class on the (days, 240) grid. With a side, the numerators
    are restricted to that side while the denominator stays the investor's whole flow, so buy and sell rates of one
    investor add up to the unsplit rates.

    Returns:
        tuple (market, limit, cancel, total) of arrays
    """
    market = series.select("cnt", side, "market", investor_class)
    limit = series.select("cnt", side, Aggressiveness.LIMIT, investor_class)
    cancel = series.select("cnt", side, Aggressiveness.CANCELED, investor_class)
    total = series.select("cnt", None, None, investor_class)
    return market, limit, cancel, total


def rate_grids(series, investor_class, side=None):
    """RelativeRates of (days, 240) arrays for one investor class, optionally for one side only"""
    market, limit, cancel, total = rate_counts(series, investor_class, side)
    with np.errstate(invalid="ignore", divide="ignore"):
        return RelativeRates(
            *(np.where(total > 0, value / np.where(total > 0, total, 1), np.nan) for value in (market, limit, cancel))
        )


def normal_period_rates(bar_series, investor_class, side=None):
    """
    Average rates over all minutes of all stocks, every minute weighted by its order count. These are the reference
    levels the event-aligned rate curves are compared with.

    Returns:
        RelativeRates of floats, NaN when there are no orders at all
    """
    sums = np.zeros(4)
    for series in bar_series:
        sums += [float(np.sum(value)) for value in rate_counts(series, investor_class, side)]
    if sums[3] <= 0:
        LOGGER.warning("No %s orders, normal-period rates undefined", investor_class.label)
        return RelativeRates(np.nan, np.nan, np.nan)
    return RelativeRates(*(sums[:3] / sums[3]).tolist())