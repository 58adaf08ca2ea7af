"""
Tests the order-flow file parser
"""
import tempfile
import unittest
from decimal import Decimal
from pathlib import Path

import pytest

from flow_events.common.data_types.exceptions import (
    ConfigurationException,
    ParsingException,
    StreamOrderException,
    UndefinedFileException,
)
from flow_events.common.data_types.order_data import EventKind, InvestorClass, Side
from flow_events.common.parsers.order_file_parser import (
    HEADER,
    parse_stream,
    read_split_table,
    serialize_stream,
)

HEADER_LINE = ",".join(HEADER)


def lines(*records):
    return [HEADER_LINE] + list(records)


class ParserTestCases(unittest.TestCase):
    def test_empty_input(self):
        result = parse_stream([])
        self.assertEqual(result.events, [])
        self.assertEqual(result.rejected_count, 0)

    def test_header_only(self):
        result = parse_stream(lines())
        self.assertEqual(result.accepted_count, 0)
        self.assertEqual(result.rejected_count, 0)

    def test_bad_header_is_fatal(self):
        with self.assertRaises(ParsingException):
            parse_stream(["stock,date", "S1,20030102"])

    def test_linked_submit_execute_cancel(self):
        source = lines(
            "S1,20030102,093000,submit,o1,B,10.00,300,I",
            "S1,20030102,093001,submit,o2,S,10.00,100,N",
            "S1,20030102,093001,execute,o1,B,10.00,100,I",
            "S1,20030102,093001,execute,o2,S,10.00,100,N",
            "S1,20030102,093005,cancel,o1,B,10.00,200,I",
        )
        result = parse_stream(source)
        self.assertEqual(result.rejected_count, 0)
        linked = [event for event in result.events if event.order_id == "o1"]
        self.assertEqual([event.event_kind for event in linked], [EventKind.SUBMIT, EventKind.EXECUTE, EventKind.CANCEL])
        first = linked[0]
        self.assertEqual(first.side, Side.BUY)
        self.assertEqual(first.price, Decimal("10.00"))
        self.assertEqual(first.size, 300)
        self.assertEqual(first.investor_class, InvestorClass.INDIVIDUAL)
        self.assertAlmostEqual(first.seconds, 9.5 * 3600)

    def test_buy_board_lot_violation_rejected(self):
        result = parse_stream(lines("S1,20030102,093000,submit,o1,B,10.00,150,I"))
        self.assertEqual(result.accepted_count, 0)
        self.assertEqual(result.rejected_count, 1)
        self.assertEqual(result.rejects[0].line_number, 2)
        self.assertIn("board lot", result.rejects[0].getMsg())

    def test_odd_lot_sell_accepted(self):
        result = parse_stream(lines("S1,20030102,093000,submit,o1,S,10.00,150,I"))
        self.assertEqual(result.accepted_count, 1)

    def test_record_rejections_continue(self):
        source = lines(
            "S1,20030102,093000,submit,o1,B,10.00,100,I",
            "S1,20030102,093001,submit,o2,B,10.005,100,I",
            "S1,20030102,093002,submit,o3,B,010.00,100,I",
            "S1,20030102,093003,submit,o4,B,10.00,0,I",
            "S1,20030102,093004,cancel,o9,B,10.00,100,I",
            "S1,20030102,093005,cancel,o1,S,10.00,100,I",
            "S1,20030102,093006,submit,o1,B,10.00,100,I",
            "S1,20030102,093007,submit,o5,X,10.00,100,I",
            "S1,2003010,093008,submit,o6,B,10.00,100,I",
            "S1,20030102,093009,submit,o7,B,10.00,100",
            "S1,20030102,093010,submit,o8,S,9.99,100,N",
        )
        result = parse_stream(source)
        self.assertEqual([event.order_id for event in result.events], ["o1", "o8"])
        self.assertEqual([reject.line_number for reject in result.rejects], list(range(3, 12)))

    def test_decreasing_timestamp_is_fatal(self):
        source = lines(
            "S1,20030102,093005,submit,o1,B,10.00,100,I",
            "S2,20030102,093000,submit,o2,B,10.00,100,I",
            "S1,20030102,093004,submit,o3,B,10.00,100,I",
        )
        with self.assertRaises(StreamOrderException) as context:
            parse_stream(source)
        self.assertEqual(context.exception.line_number, 4)
        self.assertEqual(context.exception.stock_id, "S1")

    def test_round_trip_reproduces_accepted_subset(self):
        accepted = [
            "S1,20030102,093000.250,submit,o1,B,10.00,300,I",
            "S1,20030102,093001,submit,o2,S,9.50,250,N",
            "S1,20030102,093001,execute,o1,B,9.50,250,I",
            "S1,20030102,093001,execute,o2,S,9.50,250,N",
        ]
        source = lines(accepted[0], "S1,20030102,093000.500,submit,o9,B,10.00,150,I", *accepted[1:])
        result = parse_stream(source)
        self.assertEqual(serialize_stream(result.events), "\n".join([HEADER_LINE] + accepted) + "\n")

    def test_file_input_and_delimiter(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "orders.txt"
            path.write_text("|".join(HEADER) + "\nS1|20030102|093000|submit|o1|B|10.00|100|N\n")
            result = parse_stream(path, delimiter="|")
            self.assertEqual(result.accepted_count, 1)
            self.assertEqual(serialize_stream(result.events, "|"), path.read_text())

    def test_missing_file(self):
        with self.assertRaises(UndefinedFileException):
            parse_stream("/nonexistent/orders.csv")


def test_split_table(tmp_path):
    path = tmp_path / "splits.csv"
    path.write_text("stock_id,effective_date,factor\nS1,20030115,2\nS2,20030201,1.5\n")
    assert read_split_table(path) == {("S1", "20030115"): 2.0, ("S2", "20030201"): 1.5}
    assert read_split_table("") == {}


@pytest.mark.parametrize("factor", ["0", "-2", "abc"])
def test_split_table_rejects_bad_factor(tmp_path, factor):
    path = tmp_path / "splits.csv"
    path.write_text(f"stock_id,effective_date,factor\nS1,20030115,{factor}\n")
    with pytest.raises(ConfigurationException):
        read_split_table(path)
