"""
handlers.py:

Publisher/subscriber base classes of the replay layer. A book replay publishes every logical order and every quote
change; minute aggregators and bar builders subscribe to it. This keeps the replay ignorant of what is computed from
the flow.
"""
import abc


class DataHandler(abc.ABC):
    """
    Consumer of replayed order flow. Implementers receive logical orders, quote updates and execution records through
    a single callback and dispatch on the type of the data.
    """

    @abc.abstractmethod
    def data_callback(self, data, sender=None):
        """
        Handle one item published by a registrar.

        :param data: published item (LogicalOrder, QuoteUpdate or OrderEvent)
        :param sender: stock id of the publishing replay, None when unknown
        """

    def day_callback(self, date):
        """Called once when the publisher starts a new trading day. Default: nothing to do."""


class HandlerRegistrar(abc.ABC):
    """
    Publisher side: keeps the subscribed DataHandlers in registration order and fans every published item out to
    them.
    """

    def __init__(self):
        super().__init__()
        self._subscribers = []

    def register(self, handler):
        """
        Subscribe a handler to everything published from now on.

        :param handler: DataHandler instance
        :raises ValueError: for anything that is not a DataHandler
        """
        if not isinstance(handler, DataHandler):
            raise ValueError(f"{type(handler).__name__} is not a DataHandler")
        self._subscribers.append(handler)
        return self

    def send_to_all(self, data, sender=None):
        for handler in self._subscribers:
            handler.data_callback(data, sender)

    def start_day_for_all(self, date):
        for handler in self._subscribers:
            handler.day_callback(date)
