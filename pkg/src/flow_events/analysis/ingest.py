"""
ingest.py:

Turns validated order streams into per-stock minute bars. Each stock is replayed through the book (classify stage),
a MinuteBarBuilder registered on the replay collects quotes, classified volumes and executions, and the result is one
BarSeries of 240 bars per accepted trading day.
"""
import logging

import numpy as np

from flow_events.analysis.classify import MinuteClassAccumulator
from flow_events.analysis.replay import BookReplay
from flow_events.common.book.matching import QuoteUpdate
from flow_events.common.data_types.bar_data import CLASS_KEYS, BarSeries
from flow_events.common.data_types.exceptions import ConfigurationException
from flow_events.common.data_types.order_data import EventKind, LogicalOrder, OrderEvent, Side
from flow_events.common.handlers import DataHandler
from flow_events.common.utils.trading_clock import MINUTES_PER_DAY, TradingClock

LOGGER = logging.getLogger("ingest")


def restrict_to_sessions(events, clock=None):
    """
    Drop records outside the continuous double auction (call auction, cooling period, lunch, after close), together
    with the in-session cancel and execute records of orders submitted outside it

    Returns:
        tuple (kept events, number excluded)
    """
    clock = clock if clock is not None else TradingClock()
    kept, orphaned = [], set()
    for event in events:
        key = (event.stock_id, event.order_id)
        if not clock.in_session(event.seconds):
            if event.event_kind is EventKind.SUBMIT:
                orphaned.add(key)
        elif event.event_kind is EventKind.SUBMIT or key not in orphaned:
            kept.append(event)
    excluded = len(events) - len(kept)
    if excluded:
        LOGGER.info("Excluded %d records outside the trading sessions", excluded)
    return kept, excluded


class MinuteBarBuilder(DataHandler):
    """
    Collects a BookReplay's output into a BarSeries. The quote of bar t' is the last two-sided book state strictly
    before the end of minute t'; minutes before the day's first two-sided quote take that first quote.
    """

    def __init__(self, stock_id, clock=None):
        self.stock_id = stock_id
        self.clock = clock if clock is not None else TradingClock()
        self.classes = MinuteClassAccumulator(self.clock)
        self.dates = []
        self._quotes = {}
        self._executions = {}
        self._boundaries = np.array(
            [self.clock.minute_start(minute) + 60 for minute in range(1, MINUTES_PER_DAY + 1)]
        )

    def day_callback(self, date):
        if date in self._quotes:
            return
        self.dates.append(date)
        self.classes.day(date)
        self._quotes[date] = []
        self._executions[date] = np.zeros((MINUTES_PER_DAY, 2))

    def data_callback(self, data, sender=None):
        if isinstance(data, LogicalOrder):
            self.classes.add(data)
        elif isinstance(data, QuoteUpdate):
            if data.state.two_sided:
                self._quotes[data.date].append((data.seconds, float(data.state.best_bid), float(data.state.best_ask)))
        elif isinstance(data, OrderEvent) and data.event_kind is EventKind.EXECUTE:
            minute = self.clock.intraday_index(data.seconds)
            if minute is not None:
                self._executions[data.date][minute - 1, 0 if data.side is Side.BUY else 1] += data.size

    def _day_quotes(self, date):
        updates = self._quotes[date]
        if not updates:
            return None
        seconds = np.array([update[0] for update in updates])
        quotes = np.array([update[1:] for update in updates])
        # last update strictly before each boundary, first update for minutes before it
        positions = np.searchsorted(seconds, self._boundaries, side="left") - 1
        return quotes[np.clip(positions, 0, None)]

    def series(self):
        """BarSeries of all days with at least one two-sided quote, in replay order"""
        kept, quotes = [], []
        for date in self.dates:
            day_quotes = self._day_quotes(date)
            if day_quotes is None:
                LOGGER.warning("Stock %s: no two-sided quote on %s, day dropped", self.stock_id, date)
                continue
            kept.append(date)
            quotes.append(day_quotes)

        def stack(days, shape):
            return np.array(days, dtype=float) if days else np.zeros((0,) + shape)

        grid, cells = (MINUTES_PER_DAY,), (MINUTES_PER_DAY, len(CLASS_KEYS))
        return BarSeries(
            stock_id=self.stock_id,
            dates=tuple(kept),
            best_bid=stack([day[:, 0] for day in quotes], grid),
            best_ask=stack([day[:, 1] for day in quotes], grid),
            exec_buy=stack([self._executions[date][:, 0] for date in kept], grid),
            exec_sell=stack([self._executions[date][:, 1] for date in kept], grid),
            volume=stack([self.classes.volume[date] for date in kept], cells),
            count=stack([self.classes.count[date] for date in kept], cells),
        )


def replay_stock(stock_id, events, clock=None):
    """
    Replay one stock's stream and build its bars

    Returns:
        tuple (BarSeries, replay diagnostics)
    """
    replay = BookReplay(stock_id)
    builder = MinuteBarBuilder(stock_id, clock)
    replay.register(builder)
    diagnostics = replay.replay(events)
    return builder.series(), diagnostics


def build_minute_bars(events, clock=None):
    """
    Minute bars of every stock in a stream

    Args:
        events: OrderEvents, sorted by time within each stock
        clock: TradingClock
    Returns:
        dict stock_id -> BarSeries
    """
    streams = {}
    for event in events:
        streams.setdefault(event.stock_id, []).append(event)
    return {stock_id: replay_stock(stock_id, streams[stock_id], clock)[0] for stock_id in sorted(streams)}


def apply_split_adjustment(series, split_table):
    """
    Express a stock's history in post-split units: days before a split's effective date get volumes multiplied by
    the factor and prices divided by it. Order counts are unchanged.

    Args:
        series: BarSeries of one stock
        split_table: dict (stock_id, effective_date) -> factor
    Returns:
        adjusted BarSeries (the input itself when no split applies)
    """
    splits = [(date, factor) for (stock_id, date), factor in split_table.items() if stock_id == series.stock_id]
    if not splits:
        return series
    day_factor = np.ones(series.n_days)
    dates = np.array(series.dates, dtype=object)
    for effective_date, factor in splits:
        if not factor > 0:
            raise ConfigurationException(f"split factor {factor} for {series.stock_id} must be > 0")
        day_factor[dates < effective_date] *= factor
    LOGGER.info("Stock %s: applied %d split(s)", series.stock_id, len(splits))
    price_scale = day_factor[:, None]
    return series.replace(
        best_bid=series.best_bid / price_scale,
        best_ask=series.best_ask / price_scale,
        exec_buy=series.exec_buy * price_scale,
        exec_sell=series.exec_sell * price_scale,
        volume=series.volume * day_factor[:, None, None],
        split_factor=series.split_factor * day_factor,
    )
