"""
Tests the replay of order streams into minute bars
"""
import numpy as np
import pytest

from flow_events.analysis.ingest import (
    apply_split_adjustment,
    build_minute_bars,
    replay_stock,
    restrict_to_sessions,
)
from flow_events.common.data_types.order_data import Aggressiveness, InvestorClass, Side
from flow_events.common.parsers.order_file_parser import HEADER, parse_stream

HEADER_LINE = ",".join(HEADER)


def stream(*records):
    return parse_stream([HEADER_LINE] + list(records)).events


QUOTES = (
    "S1,20030102,093000,submit,b1,B,10.00,1000,I",
    "S1,20030102,093000,submit,a1,S,10.02,2000,N",
)


def test_carry_forward_of_the_first_quote():
    series, diagnostics = replay_stock("S1", stream(*QUOTES))
    assert series.dates == ("20030102",)
    np.testing.assert_allclose(series.mid_price, 10.01)
    np.testing.assert_allclose(series.spread, 0.02, atol=1e-12)
    assert not diagnostics


def test_market_buy_volume_lands_in_its_minute():
    records = QUOTES + (
        "S1,20030102,100600,submit,b2,B,10.02,1000,I",
        "S1,20030102,100600,execute,b2,B,10.02,1000,I",
        "S1,20030102,100600,execute,a1,S,10.02,1000,N",
    )
    series, diagnostics = replay_stock("S1", stream(*records))
    market_buys = series.select("vol", Side.BUY, "market")
    assert market_buys[0, 36] == 1000
    assert market_buys.sum() == 1000
    assert series.select("vol", Side.BUY, Aggressiveness.FILLED, InvestorClass.INDIVIDUAL)[0, 36] == 1000
    assert series.exec_buy[0, 36] == 1000
    assert series.exec_sell[0, 36] == 1000
    assert not diagnostics


def test_quote_is_last_state_before_the_minute_ends():
    records = QUOTES + ("S1,20030102,093130,submit,b2,B,10.01,100,I",)
    series, _ = replay_stock("S1", stream(*records))
    assert series.best_bid[0, 0] == 10.00
    assert series.best_bid[0, 1] == 10.01
    assert series.best_bid[0, 239] == 10.01


def test_executions_are_conserved():
    records = QUOTES + (
        "S1,20030102,094000,submit,s2,S,10.00,300,N",
        "S1,20030102,094000,execute,s2,S,10.00,300,N",
        "S1,20030102,094000,execute,b1,B,10.00,300,I",
        "S1,20030102,100000,submit,b3,B,10.02,500,I",
        "S1,20030102,100000,execute,b3,B,10.02,500,I",
        "S1,20030102,100000,execute,a1,S,10.02,500,N",
    )
    series, _ = replay_stock("S1", stream(*records))
    assert series.exec_buy.sum() == series.exec_sell.sum() == 800


def test_cancel_of_filled_order_is_counted():
    records = QUOTES + (
        "S1,20030102,094000,submit,s2,S,10.00,1000,N",
        "S1,20030102,094000,execute,s2,S,10.00,1000,N",
        "S1,20030102,094000,execute,b1,B,10.00,1000,I",
        "S1,20030102,094500,cancel,b1,B,10.00,1000,I",
    )
    _, diagnostics = replay_stock("S1", stream(*records))
    assert diagnostics["cancel_not_resting"] == 1


def test_execution_mismatch_is_diagnosed():
    records = QUOTES + (
        "S1,20030102,094000,submit,s2,S,10.00,300,N",
        "S1,20030102,094000,execute,s2,S,10.00,200,N",
        "S1,20030102,094000,execute,b1,B,10.00,300,I",
    )
    _, diagnostics = replay_stock("S1", stream(*records))
    assert diagnostics["execution_mismatch"] == 1


def test_day_without_two_sided_quote_is_dropped():
    records = QUOTES + ("S1,20030103,093000,submit,b9,B,10.00,100,I",)
    series, _ = replay_stock("S1", stream(*records))
    assert series.dates == ("20030102",)


def test_book_resets_between_days():
    records = QUOTES + (
        "S1,20030103,093000,submit,b9,B,9.00,100,I",
        "S1,20030103,093000,submit,a9,S,9.10,100,I",
    )
    series, _ = replay_stock("S1", stream(*records))
    assert series.dates == ("20030102", "20030103")
    np.testing.assert_allclose(series.mid_price[1], 9.05)


def test_restrict_to_sessions():
    events = stream(
        "S1,20030102,092500,submit,b0,B,10.00,100,I",
        "S1,20030102,093000,submit,b1,B,10.00,100,I",
        "S1,20030102,113000,submit,b2,B,10.00,100,I",
        "S1,20030102,145959.999,submit,b3,B,10.00,100,I",
        "S1,20030102,150000,submit,b4,B,10.00,100,I",
    )
    kept, excluded = restrict_to_sessions(events)
    assert [event.order_id for event in kept] == ["b1", "b3"]
    assert excluded == 3


def test_build_minute_bars_per_stock():
    events = stream(
        *QUOTES,
        "S2,20030102,093000,submit,b1,B,5.00,100,I",
        "S2,20030102,093000,submit,a1,S,5.10,100,I",
    )
    bars = build_minute_bars(events)
    assert sorted(bars) == ["S1", "S2"]
    np.testing.assert_allclose(bars["S2"].mid_price, 5.05)


def test_split_adjustment():
    records = QUOTES + (
        "S1,20030103,093000,submit,b5,B,5.00,1000,I",
        "S1,20030103,093000,submit,a5,S,5.01,2000,N",
    )
    series, _ = replay_stock("S1", stream(*records))
    adjusted = apply_split_adjustment(series, {("S1", "20030103"): 2.0})
    np.testing.assert_allclose(adjusted.best_bid[0], 5.00)
    np.testing.assert_allclose(adjusted.best_bid[1], 5.00)
    assert adjusted.volume[0].sum() == pytest.approx(2 * series.volume[0].sum())
    np.testing.assert_array_equal(adjusted.count, series.count)
    np.testing.assert_array_equal(adjusted.split_factor, [2.0, 1.0])
    assert apply_split_adjustment(series, {("S9", "20030103"): 2.0}) is series


def test_records_of_orders_submitted_before_the_open_are_dropped():
    events = stream(
        "S1,20030102,092000,submit,a0,S,10.05,100,N",
        "S1,20030102,092000,submit,b0,B,9.95,100,N",
        *QUOTES,
        "S1,20030102,093100,cancel,a0,S,10.05,100,N",
        "S1,20030102,093200,cancel,b1,B,10.00,1000,I",
    )
    kept, excluded = restrict_to_sessions(events)
    assert [(event.event_kind.value, event.order_id) for event in kept] == [
        ("submit", "b1"),
        ("submit", "a1"),
        ("cancel", "b1"),
    ]
    assert excluded == 3


def test_empty_opposite_side_counts_only_after_the_open():
    records = QUOTES + (
        "S1,20030102,094000,submit,b2,B,10.02,2000,I",
        "S1,20030102,094000,execute,b2,B,10.02,2000,I",
        "S1,20030102,094000,execute,a1,S,10.02,2000,N",
        "S1,20030102,095000,submit,b3,B,10.00,100,I",
    )
    _, diagnostics = replay_stock("S1", stream(*records))
    assert diagnostics == {"empty_opposite_side": 1}
