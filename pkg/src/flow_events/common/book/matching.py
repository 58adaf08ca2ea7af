"""
matching.py:

Price-time priority matching engine. Each side of the book is a SortedDict of price levels, every level a FIFO queue
of resting orders. The engine keeps full depth; classification only ever looks at the top of book through BookState.
"""
import collections
from dataclasses import dataclass
from decimal import Decimal
from typing import List, Optional

from sortedcontainers import SortedDict

from flow_events.common.data_types.order_data import Side


@dataclass(frozen=True)
class BookState:
    """Top of book. A missing side is None, depths are the shares resting at the best price."""

    best_bid: Optional[Decimal] = None
    best_ask: Optional[Decimal] = None
    bid_depth: int = 0
    ask_depth: int = 0

    @property
    def two_sided(self):
        return self.best_bid is not None and self.best_ask is not None

    @property
    def mid_price(self):
        if not self.two_sided:
            return None
        return float(self.best_bid + self.best_ask) / 2.0

    def opposite_best(self, side):
        """Best price an incoming order of the given side would trade against"""
        return self.best_ask if side is Side.BUY else self.best_bid

    def is_marketable(self, side, price):
        best = self.opposite_best(side)
        if best is None:
            return False
        return price >= best if side is Side.BUY else price <= best


@dataclass(frozen=True)
class QuoteUpdate:
    """Published by the replay whenever the top of book changes"""

    date: str
    seconds: float
    state: BookState


@dataclass(frozen=True)
class Fill:
    incoming_id: str
    resting_id: str
    price: Decimal
    size: int


@dataclass
class RestingOrder:
    order_id: str
    side: Side
    price: Decimal
    size: int


@dataclass(frozen=True)
class SubmitResult:
    fills: List[Fill]
    remaining: int

    @property
    def executed(self):
        return sum(fill.size for fill in self.fills)


class OrderBook:
    """
    Limit order book of one stock for one trading day. Orders are matched on arrival against the opposite side at
    prices that are no worse than the order's limit price, best price first and oldest order first within a level.
    """

    def __init__(self):
        self.bids = SortedDict()
        self.asks = SortedDict()
        self._orders = {}

    def clear(self):
        self.bids.clear()
        self.asks.clear()
        self._orders.clear()

    def _levels(self, side):
        return self.bids if side is Side.BUY else self.asks

    @property
    def best_bid(self):
        return self.bids.peekitem(-1)[0] if self.bids else None

    @property
    def best_ask(self):
        return self.asks.peekitem(0)[0] if self.asks else None

    def depth_at(self, side, price):
        """Shares resting on one side at exactly the given price"""
        return sum(order.size for order in self._levels(side).get(price, ()))

    def state(self):
        best_bid, best_ask = self.best_bid, self.best_ask
        return BookState(
            best_bid=best_bid,
            best_ask=best_ask,
            bid_depth=self.depth_at(Side.BUY, best_bid) if best_bid is not None else 0,
            ask_depth=self.depth_at(Side.SELL, best_ask) if best_ask is not None else 0,
        )

    def admissible_volume(self, side, price):
        """
        Opposite-side shares an incoming order of this side and limit price could execute against

        Args:
            side: side of the incoming order
            price: its limit price
        """
        if side is Side.BUY:
            prices = self.asks.irange(maximum=price)
            levels = self.asks
        else:
            prices = self.bids.irange(minimum=price)
            levels = self.bids
        return sum(order.size for level in prices for order in levels[level])

    def remaining(self, order_id):
        order = self._orders.get(order_id)
        return order.size if order is not None else 0

    def __contains__(self, order_id):
        return order_id in self._orders

    def submit(self, order_id, side, price, size):
        """
        Match an incoming order and rest whatever is left of it.

        Args:
            order_id: id of the incoming order, must not be resting already
            side: Side of the order
            price: limit price (Decimal)
            size: shares
        Returns:
            SubmitResult with the fills in execution order and the resting remainder
        """
        if order_id in self._orders:
            raise ValueError(f"Order {order_id} is already resting in the book")
        opposite = self.asks if side is Side.BUY else self.bids
        fills = []
        to_fill = size
        while to_fill > 0 and opposite:
            level_price = opposite.peekitem(0 if side is Side.BUY else -1)[0]
            if (side is Side.BUY and level_price > price) or (side is Side.SELL and level_price < price):
                break
            queue = opposite[level_price]
            while queue and to_fill > 0:
                resting = queue[0]
                traded = min(to_fill, resting.size)
                fills.append(Fill(order_id, resting.order_id, level_price, traded))
                to_fill -= traded
                resting.size -= traded
                if resting.size == 0:
                    queue.popleft()
                    del self._orders[resting.order_id]
            if not queue:
                del opposite[level_price]
        if to_fill > 0:
            order = RestingOrder(order_id, side, price, to_fill)
            self._levels(side).setdefault(price, collections.deque()).append(order)
            self._orders[order_id] = order
        return SubmitResult(fills, to_fill)

    def cancel(self, order_id):
        """
        Withdraw a resting order

        Returns:
            the canceled remaining size, None when the order is not resting (unknown or already filled)
        """
        order = self._orders.pop(order_id, None)
        if order is None:
            return None
        levels = self._levels(order.side)
        queue = levels[order.price]
        queue.remove(order)
        if not queue:
            del levels[order.price]
        return order.size
