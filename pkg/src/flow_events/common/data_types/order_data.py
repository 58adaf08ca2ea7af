"""
@brief Tick-level order-flow records and the logical orders derived from them

OrderEvent holds one record of the order-flow file exactly as it was read: the text fields (date, time, price) are
kept verbatim so the accepted subset of a file can be written back bit-exactly. LogicalOrder is the classified unit the
analysis counts: a submission, its executed part, its resting remainder or a cancellation.
"""
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum


class EventKind(Enum):
    SUBMIT = "submit"
    CANCEL = "cancel"
    EXECUTE = "execute"


class Side(Enum):
    BUY = "B"
    SELL = "S"

    @property
    def label(self):
        return "buy" if self is Side.BUY else "sell"

    @property
    def opposite(self):
        return Side.SELL if self is Side.BUY else Side.BUY


class InvestorClass(Enum):
    INDIVIDUAL = "I"
    INSTITUTION = "N"

    @property
    def label(self):
        return "individual" if self is InvestorClass.INDIVIDUAL else "institution"


class Aggressiveness(Enum):
    PARTIALLY_FILLED = "partially_filled"
    FILLED = "filled"
    LIMIT = "limit"
    CANCELED = "canceled"

    @property
    def is_market(self):
        """Partially filled and filled orders are the effective market orders"""
        return self in (Aggressiveness.PARTIALLY_FILLED, Aggressiveness.FILLED)


BOARD_LOT = 100


def parse_time_of_day(text):
    """
    Seconds after midnight of an HHMMSS or HHMMSS.mmm string

    Args:
        text: time string
    Returns:
        float seconds
    Raises:
        ValueError on any malformed string
    """
    whole, _, fraction = text.partition(".")
    if len(whole) != 6 or not whole.isdigit() or (fraction and not fraction.isdigit()):
        raise ValueError(f"bad time '{text}'")
    hours, minutes, seconds = int(whole[0:2]), int(whole[2:4]), int(whole[4:6])
    if hours > 23 or minutes > 59 or seconds > 59:
        raise ValueError(f"bad time '{text}'")
    return hours * 3600 + minutes * 60 + seconds + (float(f"0.{fraction}") if fraction else 0.0)


@dataclass(frozen=True)
class OrderEvent:
    """One submission, cancellation or execution record"""

    stock_id: str
    date: str
    time: str
    event_kind: EventKind
    order_id: str
    side: Side
    price: Decimal
    size: int
    investor_class: InvestorClass
    seconds: float = field(default=None, compare=False)

    def __post_init__(self):
        if self.seconds is None:
            object.__setattr__(self, "seconds", parse_time_of_day(self.time))

    @property
    def sort_key(self):
        return self.date, self.seconds


@dataclass(frozen=True)
class OrderClass:
    aggressiveness: Aggressiveness
    side: Side
    investor_class: InvestorClass


@dataclass(frozen=True)
class LogicalOrder:
    """
    Classified unit of order flow. A partially executed submission yields two of these: the executed part labeled
    partially_filled and the resting remainder labeled limit.
    """

    order_id: str
    stock_id: str
    date: str
    seconds: float
    order_class: OrderClass
    size: int
    flags: tuple = ()

    @property
    def aggressiveness(self):
        return self.order_class.aggressiveness

    @property
    def side(self):
        return self.order_class.side

    @property
    def investor_class(self):
        return self.order_class.investor_class
