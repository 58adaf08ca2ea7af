"""
bars.py:

Synthetic minute bars with closed-form ground truth. Every quantity is seasonal profile x multiplicative log-normal
noise of mean 1 x the event overlays, and the price path is a noisy random walk carrying the injected jumps and
reversals.
"""
import logging

import numpy as np

from flow_events.analysis.quantities import AGGRESSIVENESS, INVESTORS, SIDES, parse_quantity
from flow_events.common.data_types.bar_data import CLASS_KEYS, BarSeries, class_column, class_mask
from flow_events.common.utils.trading_clock import MINUTES_PER_DAY
from flow_events.synth.scenario import GroundTruth

LOGGER = logging.getLogger("synth")

WINDOW = np.arange(-100, 201)


def _noise(rng, scale, shape):
    """Log-normal factors of mean 1"""
    if scale == 0:
        return np.ones(shape)
    return np.exp(scale * rng.standard_normal(shape) - 0.5 * scale * scale)


def _selector_cells(selector):
    """Boolean cell mask of a volume overlay selector; 'volume' selects every market cell"""
    if selector == "volume":
        return class_mask(aggressiveness="market")
    _, parts = parse_quantity(selector)
    investor = INVESTORS[parts[2]] if len(parts) == 3 else None
    return class_mask(SIDES[parts[0]], AGGRESSIVENESS[parts[1]], investor)


def _specificity(selector):
    return 0 if selector == "volume" else len(selector.split("."))


def event_shapes(spec, stock_id):
    """
    Flat (days * 240) multiplicative shapes per overlay selector of one stock

    Returns:
        dict selector -> array
    """
    size = spec.days * MINUTES_PER_DAY
    shapes = {}
    for event in spec.events:
        if event.stock_id != stock_id:
            continue
        positions = event.day * MINUTES_PER_DAY + event.minute - 1 + WINDOW
        inside = (positions >= 0) & (positions < size)
        for overlay in spec.overlays_of(event):
            shape = shapes.setdefault(overlay.quantity, np.ones(size))
            shape[positions[inside]] *= overlay.shape(WINDOW[inside])
    return shapes


def _cell_shapes(shapes, size):
    """(size, cells) shape of every class cell, taking the most specific volume selector that covers the cell"""
    cells = np.ones((size, len(CLASS_KEYS)))
    selectors = sorted((name for name in shapes if name not in ("abs_return", "spread")), key=_specificity)
    for selector in selectors:
        mask = _selector_cells(selector)
        cells[:, mask] = shapes[selector][:, None]
    return cells


def generate_stock(spec, stock_index, dates):
    stock_id = spec.stocks[stock_index]
    rng = np.random.default_rng([spec.seed, stock_index])
    days, size = spec.days, spec.days * MINUTES_PER_DAY
    minute_of = np.tile(np.arange(MINUTES_PER_DAY), days)
    shapes = event_shapes(spec, stock_id)
    ones = np.ones(size)

    volatility = np.asarray(spec.profiles["abs_return"])[minute_of] * shapes.get("abs_return", ones)
    returns = spec.return_scale * volatility * rng.standard_normal(size)
    for event in spec.events:
        if event.stock_id != stock_id:
            continue
        center = event.day * MINUTES_PER_DAY + event.minute - 1
        returns[center] = event.direction * event.jump
        if event.reversal > 0:
            stop = min(center + 1 + event.reversal_minutes, size)
            returns[center + 1:stop] += -event.direction * event.reversal / event.reversal_minutes
    # no return across the overnight gap
    returns[minute_of == 0] = 0.0
    mid = spec.base_price * np.exp(np.cumsum(returns))

    spread = (
        spec.base_spread
        * np.asarray(spec.profiles["spread"])[minute_of]
        * _noise(rng, spec.noise, size)
        * shapes.get("spread", ones)
    )
    base = np.array([spec.class_volume.get(class_column("vol", key), 0.0) for key in CLASS_KEYS])
    volume = (
        base[None, :]
        * np.asarray(spec.profiles["volume"])[minute_of][:, None]
        * _noise(rng, spec.noise, (size, len(CLASS_KEYS)))
        * _cell_shapes(shapes, size)
    )
    count = np.rint(volume / spec.order_size)
    executed = volume[:, class_mask(aggressiveness="market")].sum(axis=1)

    def grid(values):
        return values.reshape((days, MINUTES_PER_DAY) + values.shape[1:])

    return BarSeries(
        stock_id=stock_id,
        dates=tuple(dates),
        best_bid=grid(mid - spread / 2.0),
        best_ask=grid(mid + spread / 2.0),
        exec_buy=grid(executed),
        exec_sell=grid(executed),
        volume=grid(volume),
        count=grid(count),
    )


def generate_bars(spec):
    """
    Bars of every stock of a scenario

    Args:
        spec: validated ScenarioSpec
    Returns:
        tuple (dict stock_id -> BarSeries, GroundTruth)
    """
    spec.validate()
    dates = spec.dates()
    bars = {stock_id: generate_stock(spec, index, dates) for index, stock_id in enumerate(spec.stocks)}
    truth = GroundTruth(
        events=list(spec.events),
        profiles={name: list(values) for name, values in spec.profiles.items()},
    )
    for event in spec.events:
        for overlay in spec.overlays_of(event):
            truth.alphas.setdefault(overlay.quantity, []).append(overlay.alpha)
    LOGGER.info("Generated %d stocks x %d days with %d injected events", len(bars), spec.days, len(spec.events))
    return bars, truth
