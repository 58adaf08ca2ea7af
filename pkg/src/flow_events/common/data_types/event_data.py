"""
@brief Detected extreme intraday price changes
"""
from dataclasses import dataclass
from enum import Enum


class EventSign(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    @staticmethod
    def of(value):
        return EventSign.POSITIVE if value > 0 else EventSign.NEGATIVE


@dataclass(frozen=True)
class ExtremeEvent:
    """
    One detected event. The event minute is the intraday index t' of the end of the smallest window passing both
    filters; window is that window's length in minutes and cumulative_return its log return.
    """

    stock_id: str
    day: int
    minute: int
    date: str = ""
    sign: EventSign = EventSign.POSITIVE
    window: int = 1
    cumulative_return: float = 0.0

    @property
    def key(self):
        return self.stock_id, self.day, self.minute

    @staticmethod
    def get_csv_header():
        return ["stock_id", "date", "day", "minute", "sign", "window", "cumulative_return"]

    def to_row(self):
        return [self.stock_id, self.date, self.day, self.minute, self.sign.value, self.window, self.cumulative_return]
