"""
Tests event-aligned trajectories, group averages, peaks and the aligned cumulative return
"""
import numpy as np
import pytest

from flow_events.analysis.detect import ReturnSeries, detect_all
from flow_events.analysis.quantities import compute_quantity, default_quantities, parse_quantity
from flow_events.analysis.study import (
    GroupAverage,
    aligned_cumulative_return,
    event_groups,
    extract_trajectory,
    find_peak,
    group_average,
    offsets,
    peak_table,
)
from flow_events.common.data_types.event_data import EventSign, ExtremeEvent
from flow_events.common.data_types.exceptions import ConfigurationException, EmptyGroupException
from flow_events.synth.bars import generate_bars
from flow_events.synth.scenario import InjectedEvent, ScenarioSpec


def event(day, minute, stock="S1", sign=EventSign.POSITIVE):
    return ExtremeEvent(stock, day, minute, sign=sign)


def curve(mean):
    mean = np.asarray(mean, dtype=float)
    pre = (len(mean) - 1) // 2
    return GroupAverage("positive", "volume", np.arange(-pre, len(mean) - pre), mean, np.ones(len(mean), dtype=int))


def test_trajectory_crosses_day_boundaries():
    grid = np.arange(3 * 240, dtype=float).reshape(3, 240)
    trajectory = extract_trajectory(event(1, 10), grid)
    values = dict(zip(trajectory.offsets, trajectory.values))
    assert values[0] == grid[1, 9]
    assert values[-100] == grid[0, 149]
    assert values[200] == grid[1, 209]
    assert trajectory.in_sample.all()


def test_trajectory_outside_sample_is_nan():
    grid = np.ones((2, 240))
    trajectory = extract_trajectory(event(0, 10), grid)
    assert np.isnan(trajectory.values[0])
    assert not trajectory.in_sample[0]
    assert np.isnan(dict(zip(trajectory.offsets, trajectory.values))[-10])
    assert dict(zip(trajectory.offsets, trajectory.values))[-9] == 1.0


def test_group_average_ignores_missing_values():
    first = np.full((2, 240), 2.0)
    second = np.full((2, 240), 4.0)
    second[1, 19] = np.nan
    trajectories = [extract_trajectory(event(1, 20), first), extract_trajectory(event(1, 20, "S2"), second)]
    average = group_average(trajectories, "positive", "volume")
    assert average.value_at(0) == 2.0
    assert average.value_at(1) == 3.0
    assert average.counts[average.offsets.tolist().index(0)] == 1
    assert np.array_equal(average.offsets, offsets())


def test_empty_group_raises():
    with pytest.raises(EmptyGroupException):
        group_average([], "negative", "volume")
    with pytest.raises(EmptyGroupException):
        aligned_cumulative_return([], {}, "negative")


@pytest.mark.parametrize(
    "peaks, expected",
    [
        ({-1: 5.0, 1: 5.0}, -1),
        ({2: 5.0, -3: 5.0}, 2),
        ({0: 4.0, 7: 5.0}, 7),
    ],
)
def test_peak_tie_break(peaks, expected):
    mean = np.ones(21)
    for minute, value in peaks.items():
        mean[minute + 10] = value
    assert find_peak(curve(mean)) == (expected, 5.0)


def test_peak_of_masked_curve():
    with pytest.raises(EmptyGroupException):
        find_peak(curve(np.full(21, np.nan)))


def test_aligned_cumulative_return():
    returns = np.full((3, 240), 0.001)
    returns[:, 0] = np.nan
    aligned = aligned_cumulative_return([event(1, 50)], {"S1": returns}, "positive")
    values = dict(zip(aligned.offsets, aligned.curve))
    assert values[0] == 0.0
    assert values[10] == pytest.approx(0.01)
    assert values[-10] == pytest.approx(-0.01)


def test_aligned_cumulative_return_takes_overnight_return_as_zero():
    returns = np.full((3, 240), 0.001)
    returns[:, 0] = np.nan
    aligned = aligned_cumulative_return([event(1, 5)], {"S1": returns}, "positive")
    assert dict(zip(aligned.offsets, aligned.curve))[-10] == pytest.approx(-0.009)


def test_event_groups():
    events = [event(0, 10), event(1, 10, sign=EventSign.NEGATIVE), event(2, 10)]
    groups = event_groups(events, ("sign", "all"))
    assert {name: len(members) for name, members in groups.items()} == {"positive": 2, "negative": 1, "all": 3}
    assert event_groups([], ("sign",)) == {"positive": [], "negative": []}
    with pytest.raises(ConfigurationException):
        event_groups(events, ("volume",))


def test_peak_table_fills_missing_curves_with_nan():
    mean = np.ones(21)
    mean[13] = 3.0
    table = peak_table({("positive", "vol.buy.filled"): curve(mean)}, "positive")
    assert len(table) == 8
    row = table[(table.aggressiveness == "filled") & (table.side == "buy")].iloc[0]
    assert (row.t_max, row.v_max) == (3, 3.0)
    assert np.isnan(row.t_max_number)


def test_quantity_names():
    names = default_quantities()
    assert len(names) == len(set(names))
    for name in names:
        parse_quantity(name)
    for bad in ("vol.up.market", "rate.individual.market.both", "price"):
        with pytest.raises(ConfigurationException):
            parse_quantity(bad)


def test_compute_quantity_shapes():
    series = generate_bars(ScenarioSpec(days=3, seed=1))[0]["SYN000"]
    for name in ("abs_return", "volume", "spread", "buy_imbalance", "rate.institution.cancel.sell"):
        assert compute_quantity(series, name).shape == (3, 240)


def random_trajectories(rng, count, transform=lambda grid: grid):
    grids = [rng.normal(size=(3, 240)) for _ in range(count)]
    return [extract_trajectory(event(1, 100, f"S{index}"), transform(grid)) for index, grid in enumerate(grids)]


def test_group_average_is_linear():
    original = group_average(random_trajectories(np.random.default_rng(1), 5))
    scaled = group_average(random_trajectories(np.random.default_rng(1), 5, lambda grid: 2.5 * grid - 1.0))
    np.testing.assert_allclose(scaled.mean, 2.5 * original.mean - 1.0, rtol=1e-12, atol=1e-12)


def test_group_average_ignores_event_order():
    rng = np.random.default_rng(2)
    trajectories = random_trajectories(rng, 8)
    shuffled = [trajectories[index] for index in rng.permutation(len(trajectories))]
    np.testing.assert_array_equal(group_average(shuffled).mean, group_average(trajectories).mean)


def test_group_average_recovers_a_shared_template():
    rng = np.random.default_rng(3)
    sigma, count = 0.5, 50
    template = 1.0 + 5.0 * (np.abs(offsets()) + 1.0) ** -0.5
    trajectories = []
    for index in range(count):
        flat = np.ones(3 * 240)
        # event at day 1 minute 100: t = -100 is flat index 239
        flat[139 + 100:139 + 100 + template.size] = template + sigma * rng.standard_normal(template.size)
        trajectories.append(extract_trajectory(event(1, 100, f"S{index}"), flat.reshape(3, 240)))
    deviation = np.abs(group_average(trajectories).mean - template) / (sigma / np.sqrt(count))
    assert np.count_nonzero(deviation > 3) <= 5
    assert deviation.max() < 5


REVERSAL = dict(jump=0.05, reversal=0.01, reversal_minutes=15)


def test_cumulative_return_after_a_jump_and_reversal():
    spec = ScenarioSpec(days=10, noise=0.0, return_scale=0.0, events=(InjectedEvent("SYN000", 4, 60, **REVERSAL),))
    bars, _ = generate_bars(spec)
    returns = ReturnSeries.from_bars(bars["SYN000"]).returns
    aligned = aligned_cumulative_return([event(4, 60, "SYN000")], {"SYN000": returns}, "positive")
    values = dict(zip(aligned.offsets, aligned.curve))
    assert values[0] == 0.0
    assert values[-1] == pytest.approx(-0.05, abs=1e-9)
    assert values[-100] == pytest.approx(-0.05, abs=1e-9)
    assert values[6] == pytest.approx(-0.004, abs=1e-9)
    assert values[15] == pytest.approx(-0.01, abs=1e-9)
    assert values[200] == pytest.approx(-0.01, abs=1e-9)


@pytest.mark.slow
def test_cumulative_return_reversal_over_an_ensemble():
    stocks = tuple(f"R{index}" for index in range(5))
    injected = tuple(InjectedEvent(stock, day, 60, **REVERSAL) for stock in stocks for day in (5, 15, 25))
    spec = ScenarioSpec(stocks=stocks, days=30, seed=29, events=injected)
    bars, _ = generate_bars(spec)
    series = {stock: ReturnSeries.from_bars(bars[stock]) for stock in stocks}
    detected = detect_all(list(series.values()))
    assert sorted((found.stock_id, found.day, found.minute) for found in detected) == sorted(
        (injected_event.stock_id, injected_event.day, injected_event.minute) for injected_event in injected
    )
    aligned = aligned_cumulative_return(detected, {stock: series[stock].returns for stock in stocks}, "positive")
    values = dict(zip(aligned.offsets, aligned.curve))
    assert values[0] == 0.0
    # the event bar is column 59, so t covers columns 60 .. 59 + t of the same day
    volatility = spec.return_scale * np.asarray(spec.profiles["abs_return"])
    for minute in (15, 180):
        band = 3 * np.sqrt(np.sum(volatility[60:60 + minute] ** 2)) / np.sqrt(len(detected))
        assert abs(values[minute] + 0.01) <= band
