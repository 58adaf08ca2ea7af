"""
replay.py:

Replays one stock's order stream through the matching engine and publishes the classified flow. Registered handlers
receive, in stream order:

 - every LogicalOrder produced by a submission or cancellation
 - a QuoteUpdate each time the top of book changes
 - every execute record of the stream (used for executed volumes)

The book is cleared at the start of every trading day since all orders are day orders.
"""
import collections
import logging

from flow_events.analysis.classify import EMPTY_OPPOSITE_SIDE, classify_cancellation, classify_submission
from flow_events.common.book.matching import BookState, OrderBook, QuoteUpdate
from flow_events.common.data_types.order_data import EventKind
from flow_events.common.handlers import HandlerRegistrar

LOGGER = logging.getLogger("classify")


class BookReplay(HandlerRegistrar):
    """
    Sequential replay of one stock. Diagnostics count stream records the reconstruction disagrees with:

     - cancel_not_resting: a cancellation of an order that is no longer in the book
     - execution_mismatch: an order whose executed shares in the stream differ from the engine's fills
     - flag names of classify_submission; empty_opposite_side only once the day's book has been two-sided
    """

    def __init__(self, stock_id=None):
        super().__init__()
        self.stock_id = stock_id
        self.book = OrderBook()
        self.diagnostics = collections.Counter()
        self._date = None
        self._state = BookState()
        self._opened = False
        self._unreconciled = collections.Counter()

    def replay(self, events):
        """
        Replay a whole stream

        Args:
            events: OrderEvents of one stock in timestamp order
        Returns:
            the diagnostics Counter
        """
        for event in events:
            self.process(event)
        self.end_day()
        for name, value in sorted(self.diagnostics.items()):
            LOGGER.warning("Stock %s: %d replay diagnostics of kind %s", self.stock_id, value, name)
        return self.diagnostics

    def process(self, event):
        if event.date != self._date:
            self.end_day()
            self._date = event.date
            self.start_day_for_all(event.date)
        if event.event_kind is EventKind.SUBMIT:
            self._submit(event)
        elif event.event_kind is EventKind.CANCEL:
            self._cancel(event)
        else:
            self._unreconciled[event.order_id] -= event.size
            self.send_to_all(event, self.stock_id)

    def end_day(self):
        """Reconcile stream executions of the finished day and reset the book"""
        mismatched = sum(1 for value in self._unreconciled.values() if value != 0)
        if mismatched:
            self.diagnostics["execution_mismatch"] += mismatched
        self._unreconciled.clear()
        self.book.clear()
        self._state = BookState()
        self._opened = False

    def _submit(self, event):
        before = self._state
        result = self.book.submit(event.order_id, event.side, event.price, event.size)
        for fill in result.fills:
            self._unreconciled[fill.incoming_id] += fill.size
            self._unreconciled[fill.resting_id] += fill.size
        for logical in classify_submission(event, before, result.fills):
            for flag in logical.flags:
                # an empty side is expected while the day's book is still building up
                if flag != EMPTY_OPPOSITE_SIDE or self._opened:
                    self.diagnostics[flag] += 1
            self.send_to_all(logical, self.stock_id)
        self._publish_quote(event)

    def _cancel(self, event):
        remaining = self.book.cancel(event.order_id)
        if remaining is None:
            self.diagnostics["cancel_not_resting"] += 1
            return
        self.send_to_all(classify_cancellation(event, remaining), self.stock_id)
        self._publish_quote(event)

    def _publish_quote(self, event):
        state = self.book.state()
        if state != self._state:
            self._state = state
            self._opened = self._opened or state.two_sided
            self.send_to_all(QuoteUpdate(event.date, event.seconds, state), self.stock_id)
