"""
order_file_parser.py:

Parser for delimiter-separated order-flow files. One record per line with the columns

    stock_id, date (YYYYMMDD), time (HHMMSS or HHMMSS.mmm), event_kind (submit/cancel/execute), order_id,
    side (B/S), price (decimal), size (integer), investor_class (I/N)

after a required header line. Schema violations reject the record and parsing continues; a timestamp going backwards
within one stock means the feed is corrupted and stops the parse.
"""
import datetime
import logging
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Dict, List

import pandas as pd

from flow_events.common.data_types.exceptions import (
    ConfigurationException,
    ParsingException,
    StreamOrderException,
    UndefinedFileException,
)
from flow_events.common.data_types.order_data import (
    BOARD_LOT,
    EventKind,
    InvestorClass,
    OrderEvent,
    Side,
    parse_time_of_day,
)

LOGGER = logging.getLogger("ingest")

HEADER = [
    "stock_id",
    "date",
    "time",
    "event_kind",
    "order_id",
    "side",
    "price",
    "size",
    "investor_class",
]

SPLIT_TABLE_HEADER = ["stock_id", "effective_date", "factor"]


@dataclass
class ParseResult:
    """Accepted events in file order (timestamp order within each stock) and the rejected records"""

    events: List[OrderEvent] = field(default_factory=list)
    rejects: List[ParsingException] = field(default_factory=list)

    @property
    def accepted_count(self):
        return len(self.events)

    @property
    def rejected_count(self):
        return len(self.rejects)

    def by_stock(self) -> Dict[str, List[OrderEvent]]:
        streams = {}
        for event in self.events:
            streams.setdefault(event.stock_id, []).append(event)
        return streams


class OrderFileParser:
    """
    Validating parser. A parser instance keeps the submissions seen so far per stock, which is what cancellation and
    execution records are checked against.
    """

    def __init__(self, delimiter=",", tick_size=Decimal("0.01")):
        self.delimiter = delimiter
        self.tick_size = Decimal(tick_size)

    def parse(self, source):
        """
        Parse a whole input.

        @param source: path to a file, or an iterable of text lines
        @return ParseResult with accepted events and rejected records
        """
        lines = self._read_lines(source)
        result = ParseResult()
        if not lines:
            return result
        header = [column.strip() for column in lines[0].split(self.delimiter)]
        if header != HEADER:
            raise ParsingException(1, f"header must be {self.delimiter.join(HEADER)}, found '{lines[0]}'")

        submissions = {}
        last_time = {}
        for line_number, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            try:
                event = self._parse_record(line)
                self._check_references(event, submissions)
            except ParsingException as exc:
                result.rejects.append(ParsingException(line_number, exc.getMsg()))
                continue
            if event.sort_key < last_time.get(event.stock_id, event.sort_key):
                raise StreamOrderException(event.stock_id, line_number)
            last_time[event.stock_id] = event.sort_key
            if event.event_kind is EventKind.SUBMIT:
                submissions[(event.stock_id, event.order_id)] = event
            result.events.append(event)
        LOGGER.info("Parsed %d records, rejected %d", result.accepted_count, result.rejected_count)
        for reject in result.rejects:
            LOGGER.warning("Rejected record: %s", reject.getMsg())
        return result

    @staticmethod
    def _read_lines(source):
        if isinstance(source, (str, Path)):
            try:
                with open(source, "r") as file_handle:
                    return file_handle.read().splitlines()
            except OSError:
                raise UndefinedFileException(source)
        return [line.rstrip("\r\n") for line in source]

    def _parse_record(self, line):
        """
        Turn one line into an OrderEvent, raising ParsingException (line number 0, fixed up by the caller) on any
        schema violation.
        """
        fields = line.split(self.delimiter)
        if len(fields) != len(HEADER):
            raise ParsingException(0, f"expected {len(HEADER)} columns, found {len(fields)}")
        stock_id, date, time, kind, order_id, side, price, size, investor = fields
        if not stock_id or not order_id:
            raise ParsingException(0, "empty stock_id or order_id")
        try:
            datetime.datetime.strptime(date, "%Y%m%d")
            if len(date) != 8:
                raise ValueError(date)
        except ValueError:
            raise ParsingException(0, f"bad date '{date}'")
        try:
            seconds = parse_time_of_day(time)
        except ValueError as exc:
            raise ParsingException(0, str(exc))
        try:
            kind = EventKind(kind)
            side = Side(side)
            investor = InvestorClass(investor)
        except ValueError as exc:
            raise ParsingException(0, str(exc))
        try:
            price_value = Decimal(price)
        except InvalidOperation:
            raise ParsingException(0, f"bad price '{price}'")
        if str(price_value) != price or not price_value.is_finite() or price_value < 0:
            raise ParsingException(0, f"price '{price}' is not a canonical non-negative decimal")
        if price_value % self.tick_size != 0:
            raise ParsingException(0, f"price {price} is not aligned to tick {self.tick_size}")
        if not size.isdigit() or str(int(size)) != size:
            raise ParsingException(0, f"size '{size}' is not a canonical non-negative integer")
        size_value = int(size)

        if kind in (EventKind.SUBMIT, EventKind.EXECUTE):
            if size_value <= 0:
                raise ParsingException(0, f"{kind.value} record needs a positive size")
            if price_value <= 0:
                raise ParsingException(0, f"{kind.value} record needs a positive price")
        if kind is EventKind.SUBMIT and side is Side.BUY and size_value % BOARD_LOT:
            raise ParsingException(0, f"buy size {size_value} is not a multiple of the {BOARD_LOT}-share board lot")
        return OrderEvent(
            stock_id=stock_id,
            date=date,
            time=time,
            event_kind=kind,
            order_id=order_id,
            side=side,
            price=price_value,
            size=size_value,
            investor_class=investor,
            seconds=seconds,
        )

    @staticmethod
    def _check_references(event, submissions):
        key = (event.stock_id, event.order_id)
        if event.event_kind is EventKind.SUBMIT:
            if key in submissions:
                raise ParsingException(0, f"duplicate submission of order {event.order_id}")
            return
        original = submissions.get(key)
        if original is None:
            raise ParsingException(0, f"{event.event_kind.value} references unknown order {event.order_id}")
        if original.side is not event.side:
            raise ParsingException(0, f"{event.event_kind.value} side differs from order {event.order_id}")


def parse_stream(source, delimiter=",", tick_size=Decimal("0.01")):
    """
    Parse an order-flow input

    Args:
        source: path or iterable of lines
        delimiter: column delimiter
        tick_size: price grid the prices must lie on
    Returns:
        ParseResult
    """
    return OrderFileParser(delimiter, tick_size).parse(source)


def serialize_stream(events, delimiter=","):
    """
    Inverse of parse_stream: header plus one line per event, newline terminated. Writing the accepted events of a
    parse reproduces the accepted subset of the input.
    """
    lines = [delimiter.join(HEADER)]
    for event in events:
        lines.append(
            delimiter.join(
                [
                    event.stock_id,
                    event.date,
                    event.time,
                    event.event_kind.value,
                    event.order_id,
                    event.side.value,
                    str(event.price),
                    str(event.size),
                    event.investor_class.value,
                ]
            )
        )
    return "\n".join(lines) + "\n"


def read_split_table(path, delimiter=","):
    """
    Read a split table

    Args:
        path: file with columns stock_id, effective_date, factor
    Returns:
        dict mapping (stock_id, effective_date) to factor
    Raises:
        ConfigurationException for a factor <= 0
    """
    if not path:
        return {}
    if not Path(path).is_file():
        raise UndefinedFileException(path)
    frame = pd.read_csv(path, sep=delimiter, dtype=str)
    if list(frame.columns) != SPLIT_TABLE_HEADER:
        raise ConfigurationException(f"split table header must be {SPLIT_TABLE_HEADER}")
    table = {}
    for stock_id, effective_date, factor in frame.itertuples(index=False):
        try:
            value = float(factor)
        except ValueError:
            raise ConfigurationException(f"split factor '{factor}' for {stock_id} is not a number")
        if not value > 0:
            raise ConfigurationException(f"split factor {value} for {stock_id} on {effective_date} must be > 0")
        table[(stock_id, effective_date)] = value
    return table
