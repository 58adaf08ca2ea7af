"""
quantities.py:

Named per-minute quantities computed from a BarSeries on the (days, 240) grid. Names:

    abs_return, volume, spread, buy_imbalance, sell_imbalance
    vol.<side>.<aggressiveness|market>[.<investor>]     share volume of a class cell selection
    cnt.<side>.<aggressiveness|market>[.<investor>]     order number of a class cell selection
    rate.<investor>.<market|limit|cancel>[.<side>]      relative order rate

with side in buy/sell, aggressiveness in partially_filled/filled/limit/canceled and investor in
individual/institution. Rates are proportions already and are studied without deseasonalization.
"""
from dataclasses import dataclass

import numpy as np

from flow_events.analysis.classify import imbalance, rate_grids
from flow_events.analysis.detect import log_returns
from flow_events.common.data_types.exceptions import ConfigurationException
from flow_events.common.data_types.order_data import Aggressiveness, InvestorClass, Side

SIDES = {side.label: side for side in Side}
INVESTORS = {investor.label: investor for investor in InvestorClass}
AGGRESSIVENESS = {aggressiveness.value: aggressiveness for aggressiveness in Aggressiveness}
AGGRESSIVENESS["market"] = "market"
RATE_KINDS = ("market", "limit", "cancel")

BASIC_QUANTITIES = ["abs_return", "volume", "spread", "buy_imbalance", "sell_imbalance"]


def _market_volume(series, side):
    return series.select("vol", side, "market")


@dataclass(frozen=True)
class Quantity:
    name: str

    def __post_init__(self):
        parse_quantity(self.name)

    @property
    def deseasonalized(self):
        return not self.name.startswith("rate.")

    @property
    def fittable(self):
        """Relaxation fits apply to deseasonalized quantities whose normal level is 1"""
        return self.deseasonalized

    def values(self, series):
        return compute_quantity(series, self.name)


def parse_quantity(name):
    """
    Validate a quantity name

    Returns:
        tuple (kind, parts) with kind one of basic, vol, cnt, rate
    Raises:
        ConfigurationException for unknown names
    """
    if name in BASIC_QUANTITIES:
        return "basic", ()
    parts = name.split(".")
    kind = parts[0]
    if kind in ("vol", "cnt") and len(parts) in (3, 4):
        if parts[1] in SIDES and parts[2] in AGGRESSIVENESS and (len(parts) == 3 or parts[3] in INVESTORS):
            return kind, tuple(parts[1:])
    if kind == "rate" and len(parts) in (3, 4):
        if parts[1] in INVESTORS and parts[2] in RATE_KINDS and (len(parts) == 3 or parts[3] in SIDES):
            return kind, tuple(parts[1:])
    raise ConfigurationException(f"unknown quantity '{name}'")


def compute_quantity(series, name):
    """
    Grid of one quantity

    Args:
        series: BarSeries
        name: quantity name (see module docstring)
    Returns:
        (days, 240) float array, NaN where the quantity is undefined
    """
    kind, parts = parse_quantity(name)
    if name == "abs_return":
        return np.abs(log_returns(series.mid_price))
    if name == "volume":
        return _market_volume(series, None)
    if name == "spread":
        return np.array(series.spread)
    if name == "buy_imbalance":
        return imbalance(_market_volume(series, Side.BUY), _market_volume(series, Side.SELL))
    if name == "sell_imbalance":
        return imbalance(_market_volume(series, Side.SELL), _market_volume(series, Side.BUY))
    if kind in ("vol", "cnt"):
        investor = INVESTORS[parts[2]] if len(parts) == 3 else None
        return series.select(kind, SIDES[parts[0]], AGGRESSIVENESS[parts[1]], investor)
    side = SIDES[parts[2]] if len(parts) == 3 else None
    rates = rate_grids(series, INVESTORS[parts[0]], side)
    return np.array(getattr(rates, parts[1]))


def default_quantities():
    """Every quantity of the standard study"""
    names = list(BASIC_QUANTITIES)
    names += [f"vol.{side}.market" for side in SIDES]
    for side in SIDES:
        for aggressiveness in Aggressiveness:
            names.append(f"vol.{side}.{aggressiveness.value}")
            names.append(f"cnt.{side}.{aggressiveness.value}")
    names += [f"vol.{side}.market.{investor}" for side in SIDES for investor in INVESTORS]
    names += [f"rate.{investor}.{kind}" for investor in INVESTORS for kind in RATE_KINDS]
    names += [f"rate.{investor}.{kind}.{side}" for investor in INVESTORS for kind in RATE_KINDS for side in SIDES]
    return names
