"""
orderflow.py:

Zero-intelligence order-flow simulator. Orders arrive as a Poisson stream in every trading minute; each one is a
market, limit or cancel action of a random investor and side. The simulator runs the same matching engine the
classifier replays through, constructs each order to be of its intended class against the current book, and records
that class as ground truth. The stream it writes is in the ingest input format.
"""
import logging
from decimal import Decimal

import numpy as np

from flow_events.common.book.matching import OrderBook
from flow_events.common.data_types.order_data import (
    BOARD_LOT,
    Aggressiveness,
    EventKind,
    InvestorClass,
    OrderEvent,
    Side,
)
from flow_events.common.utils.trading_clock import MINUTES_PER_DAY, TradingClock
from flow_events.synth.scenario import GroundTruth

LOGGER = logging.getLogger("synth")

ACTIONS = ("market", "limit", "cancel")


def _format_time(seconds):
    whole = int(seconds)
    millis = int(round((seconds - whole) * 1000))
    if millis == 1000:
        whole, millis = whole + 1, 0
    return f"{whole // 3600:02d}{whole % 3600 // 60:02d}{whole % 60:02d}.{millis:03d}"


class OrderFlowSimulator:
    """Simulates one stock; the book and the per-investor lists of resting orders are reset every day"""

    def __init__(self, spec, stock_index, clock=None):
        self.spec = spec
        self.flow = spec.orderflow
        self.stock_id = spec.stocks[stock_index]
        self.clock = clock if clock is not None else TradingClock()
        self.rng = np.random.default_rng([spec.seed, stock_index, 1])
        self.tick = Decimal(str(self.flow.tick))
        self.reference = Decimal(str(spec.base_price)).quantize(self.tick)
        self.book = OrderBook()
        self.events = []
        self.labels = []
        self._next_id = 0
        self._start_day()
        self._probabilities = {
            investor: self.flow.action_probabilities(investor.label) for investor in InvestorClass
        }

    def _order_id(self):
        self._next_id += 1
        return f"{self.stock_id}-{self._next_id}"

    def _emit(self, date, seconds, kind, order_id, side, price, size, investor):
        self.events.append(
            OrderEvent(
                stock_id=self.stock_id,
                date=date,
                time=_format_time(seconds),
                event_kind=kind,
                order_id=order_id,
                side=side,
                price=price,
                size=size,
                investor_class=investor,
            )
        )

    def _label(self, date, order_id, aggressiveness, side, investor, size):
        self.labels.append((self.stock_id, date, order_id, aggressiveness.value, side.label, investor.label, size))

    def _size(self, side):
        lots = int(self.rng.integers(1, self.flow.max_lots + 1))
        if side is Side.BUY:
            return lots * BOARD_LOT
        # sell orders need not be board lots
        return lots * BOARD_LOT - int(self.rng.choice([0, 0, 0, 50]))

    def _submit(self, date, seconds, order_id, side, price, size, investor):
        self._emit(date, seconds, EventKind.SUBMIT, order_id, side, price, size, investor)
        result = self.book.submit(order_id, side, price, size)
        for fill in result.fills:
            self._emit(date, seconds, EventKind.EXECUTE, fill.incoming_id, side, fill.price, fill.size, investor)
            resting_investor = self._investor_of[fill.resting_id]
            self._emit(
                date, seconds, EventKind.EXECUTE, fill.resting_id, side.opposite, fill.price, fill.size,
                resting_investor,
            )
        self._investor_of[order_id] = investor
        self._order_details[order_id] = (side, price)
        if result.remaining:
            self._resting[investor].append(order_id)
        return result

    def _limit(self, date, seconds, side, investor):
        best_own = self.book.best_bid if side is Side.BUY else self.book.best_ask
        best_other = self.book.best_ask if side is Side.BUY else self.book.best_bid
        steps = int(self.rng.integers(0, 5))
        direction = -1 if side is Side.BUY else 1
        if best_own is not None:
            price = best_own + direction * steps * self.tick
        elif best_other is not None:
            price = best_other + direction * (steps + 1) * self.tick
        else:
            price = self.reference + direction * (steps + 1) * self.tick
        if best_other is not None and (price >= best_other if side is Side.BUY else price <= best_other):
            price = best_other + direction * self.tick
        price = max(price, self.tick)
        size = self._size(side)
        order_id = self._order_id()
        self._submit(date, seconds, order_id, side, price, size, investor)
        self._label(date, order_id, Aggressiveness.LIMIT, side, investor, size)

    def _market(self, date, seconds, side, investor):
        levels = self.book.asks if side is Side.BUY else self.book.bids
        if not levels:
            return self._limit(date, seconds, side, investor)
        prices = list(levels.keys()) if side is Side.BUY else list(reversed(levels.keys()))
        order_id = self._order_id()
        if self.rng.random() < self.flow.partial_fraction:
            best = prices[0]
            depth = self.book.depth_at(side.opposite, best)
            extra = int(self.rng.integers(1, self.flow.max_lots + 1)) * BOARD_LOT
            size = depth + extra
            if side is Side.BUY:
                # round up to whole lots, still larger than the depth at the best quote
                size = -(-size // BOARD_LOT) * BOARD_LOT
            self._submit(date, seconds, order_id, side, best, size, investor)
            self._label(date, order_id, Aggressiveness.PARTIALLY_FILLED, side, investor, depth)
            self._label(date, order_id, Aggressiveness.LIMIT, side, investor, size - depth)
            return None
        size = self._size(side)
        available = self.book.admissible_volume(side, prices[-1])
        if available < size:
            size = (available // BOARD_LOT) * BOARD_LOT if side is Side.BUY else available
        if size <= 0:
            return self._limit(date, seconds, side, investor)
        cumulative, price = 0, prices[-1]
        for level in prices:
            cumulative += self.book.depth_at(side.opposite, level)
            if cumulative >= size:
                price = level
                break
        self._submit(date, seconds, order_id, side, price, size, investor)
        self._label(date, order_id, Aggressiveness.FILLED, side, investor, size)
        return None

    def _cancel(self, date, seconds, side, investor):
        resting = self._resting[investor]
        while resting:
            order_id = resting.pop(int(self.rng.integers(0, len(resting))))
            if order_id not in self.book:
                continue
            order = self._order_details[order_id]
            remaining = self.book.cancel(order_id)
            self._emit(date, seconds, EventKind.CANCEL, order_id, order[0], order[1], remaining, investor)
            self._label(date, order_id, Aggressiveness.CANCELED, order[0], investor, remaining)
            return
        self._limit(date, seconds, side, investor)

    def _start_day(self):
        self.book.clear()
        self._resting = {investor: [] for investor in InvestorClass}
        self._investor_of = {}
        self._order_details = {}

    def simulate_day(self, date):
        self._start_day()
        for minute in range(1, MINUTES_PER_DAY + 1):
            start = self.clock.minute_start(minute)
            arrivals = int(self.rng.poisson(self.flow.orders_per_minute))
            for offset in np.sort(self.rng.integers(0, 60000, arrivals)):
                seconds = start + offset / 1000.0
                investor = (
                    InvestorClass.INSTITUTION
                    if self.rng.random() < self.flow.institution_share
                    else InvestorClass.INDIVIDUAL
                )
                side = Side.BUY if self.rng.random() < self.flow.buy_fraction else Side.SELL
                action = ACTIONS[int(self.rng.choice(3, p=self._probabilities[investor]))]
                getattr(self, f"_{action}")(date, seconds, side, investor)


def generate_orderflow(spec):
    """
    Order stream of every stock of a scenario

    Args:
        spec: validated ScenarioSpec
    Returns:
        tuple (list of OrderEvent sorted by stock then time, GroundTruth with one label per logical order)
    """
    spec.validate()
    truth = GroundTruth(events=list(spec.events))
    events = []
    if spec.orderflow.orders_per_minute <= 0:
        LOGGER.info("Order arrival rate is zero, empty stream")
        return events, truth
    for index in range(len(spec.stocks)):
        simulator = OrderFlowSimulator(spec, index)
        for date in spec.dates():
            simulator.simulate_day(date)
        events.extend(simulator.events)
        truth.labels.extend(simulator.labels)
    LOGGER.info("Generated %d order records and %d logical orders", len(events), len(truth.labels))
    return events, truth
