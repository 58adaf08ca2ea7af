"""
Tests extreme-event detection, including an exhaustive reference scan of every admissible window
"""
import math

import numpy as np
import pytest

from flow_events.analysis.detect import (
    FilterConfig,
    ReturnSeries,
    average_window_volatility,
    deduplicate_first_per_day,
    detect_all,
    events_frame,
    events_from_frame,
    log_returns,
    realized_volatility,
)
from flow_events.common.data_types.event_data import EventSign, ExtremeEvent
from flow_events.common.data_types.exceptions import ConfigurationException


def mid_from_returns(returns, base=10.0):
    """Mid-price grid whose minute log returns are the given (days, 240) values, column 0 ignored"""
    steps = np.array(returns, dtype=float)
    steps[:, 0] = 0.0
    return base * np.exp(np.cumsum(steps, axis=1))


def scan_every_window(series, config):
    """Reference detection: loops over every stock-day, end minute and window length"""
    log_mid = series.log_mid
    days = log_mid.shape[0]
    returns = np.diff(log_mid, axis=1)
    averages = {}
    for window in range(1, config.window_max + 1):
        values = []
        for day in range(days):
            for end in range(window + 1, 241):
                block = returns[day, end - window - 1:end - 1]
                values.append(math.sqrt(float(np.sum(block * block))))
        averages[window] = sum(values) / len(values)

    found = []
    for day in range(days):
        for end in range(config.first_minute, config.last_minute + 1):
            for window in range(1, min(config.window_max, end - 1) + 1):
                value = log_mid[day, end - 1] - log_mid[day, end - 1 - window]
                if abs(value) >= config.threshold_abs and abs(value) >= config.volatility_multiple * averages[window]:
                    found.append((series.stock_id, day, end, window, EventSign.of(value)))
                    break
    first = {}
    for item in found:
        first.setdefault(item[:2], item)
    return sorted(first.values())


@pytest.fixture
def noisy_sample():
    rng = np.random.default_rng(11)
    series = []
    for stock in ("S1", "S2"):
        returns = rng.normal(0.0, 0.002, size=(10, 240))
        returns[1, 49] += 0.05
        returns[3, 99] -= 0.06
        returns[5, 2] += 0.05
        returns[7, 200] += 0.08
        returns[8, 60:64] += 0.012
        series.append(ReturnSeries.from_mid(stock, mid_from_returns(returns)))
    return series


@pytest.mark.oracle
def test_detection_matches_exhaustive_scan(noisy_sample):
    config = FilterConfig()
    detected = [
        (event.stock_id, event.day, event.minute, event.window, event.sign)
        for event in detect_all(noisy_sample, config)
    ]
    expected = []
    for series in noisy_sample:
        expected.extend(scan_every_window(series, config))
    assert detected == expected
    assert len(detected) >= 6


def test_single_ramp_gives_one_event_with_minimal_window():
    returns = np.zeros((5, 240))
    returns[2, 99:102] = 0.015
    events = detect_all([ReturnSeries.from_mid("S1", mid_from_returns(returns))])
    assert len(events) == 1
    event = events[0]
    assert (event.day, event.minute, event.window, event.sign) == (2, 102, 3, EventSign.POSITIVE)
    assert event.cumulative_return == pytest.approx(0.045)


def test_exclusion_windows_are_respected():
    returns = np.zeros((3, 240))
    returns[0, 2] = -0.05
    returns[1, 190] = 0.05
    events = detect_all([ReturnSeries.from_mid("S1", mid_from_returns(returns))])
    assert [(event.day, event.minute, event.sign) for event in events] == [(0, 6, EventSign.NEGATIVE)]
    assert events[0].window == 4


def test_windows_do_not_cross_the_overnight_gap():
    mid = np.full((2, 240), 10.0)
    mid[1] = 11.0
    assert detect_all([ReturnSeries.from_mid("S1", mid)]) == []


def test_relative_filter_rejects_volatile_stock():
    rng = np.random.default_rng(5)
    returns = rng.uniform(-0.03, 0.03, size=(20, 240))
    events = detect_all([ReturnSeries.from_mid("S1", mid_from_returns(returns))], FilterConfig(window_max=5))
    assert events == []


def test_window_volatility_of_constant_returns():
    returns = np.full((2, 240), 0.001)
    series = ReturnSeries.from_mid("S1", mid_from_returns(returns))
    volatility = series.window_volatility(4)
    assert np.all(np.isnan(volatility[:, :4]))
    np.testing.assert_allclose(volatility[:, 4:], math.sqrt(4) * 0.001, rtol=1e-9)
    assert average_window_volatility(series, 4) == pytest.approx(0.002, rel=1e-9)
    assert average_window_volatility(series, 4, "clock").shape == (240,)


def test_log_returns_first_minute_is_undefined():
    returns = log_returns(np.array([[10.0, 11.0, 11.0] + [11.0] * 237]))
    assert math.isnan(returns[0, 0])
    assert returns[0, 1] == pytest.approx(math.log(1.1))
    assert realized_volatility([0.3, 0.4]) == pytest.approx(0.5)


def test_deduplicate_keeps_first_per_day():
    events = [
        ExtremeEvent("S1", 0, 50),
        ExtremeEvent("S1", 0, 20),
        ExtremeEvent("S1", 1, 70),
        ExtremeEvent("S2", 0, 90),
    ]
    assert [event.key for event in deduplicate_first_per_day(events)] == [("S1", 0, 20), ("S1", 1, 70), ("S2", 0, 90)]


def test_events_frame_round_trip():
    events = [ExtremeEvent("S1", 3, 47, "20030107", EventSign.NEGATIVE, 2, -0.051)]
    assert events_from_frame(events_frame(events)) == events


@pytest.mark.parametrize(
    "settings",
    [
        {"threshold_abs": 0},
        {"window_max": 0},
        {"volatility_multiple": -1},
        {"opening_exclusion": 200, "closing_exclusion": 60},
        {"volatility_reference": "daily"},
    ],
)
def test_invalid_filter_settings(settings):
    with pytest.raises(ConfigurationException):
        FilterConfig(**settings)
