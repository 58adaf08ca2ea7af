"""
scenario.py:

Scenario description of the synthetic generator and the ground truth it produces. Scenarios are plain JSON
documents; every field has a default so a minimal scenario only lists its events.
"""
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from flow_events.analysis.quantities import parse_quantity
from flow_events.common.data_types.exceptions import ConfigurationException, ScenarioException
from flow_events.common.utils.trading_clock import MINUTES_PER_DAY

OVERLAY_SELECTORS = ("abs_return", "volume", "spread")

# normal-period relative rates (market, limit, cancel) per investor class
DEFAULT_RATES = {"individual": (0.26, 0.60, 0.14), "institution": (0.42, 0.49, 0.09)}


def u_shaped_profile(low=0.5, high=2.0, minutes=MINUTES_PER_DAY):
    """Profile equal to high at the open and the close and to low at mid-day, on each session separately"""
    half = minutes // 2
    position = (np.arange(half) + 0.5) / half
    session = low + (high - low) * (2.0 * position - 1.0) ** 2
    return np.concatenate([session, session])


def _default_profiles():
    return {name: u_shaped_profile().tolist() for name in OVERLAY_SELECTORS}


def _default_class_volume():
    """Mean shares per minute of each class cell at profile level 1, keyed by quantity selector"""
    return {
        "vol.buy.filled.individual": 1500.0,
        "vol.sell.filled.individual": 1500.0,
        "vol.buy.partially_filled.individual": 300.0,
        "vol.sell.partially_filled.individual": 300.0,
        "vol.buy.limit.individual": 3500.0,
        "vol.sell.limit.individual": 3500.0,
        "vol.buy.canceled.individual": 800.0,
        "vol.sell.canceled.individual": 800.0,
        "vol.buy.filled.institution": 1200.0,
        "vol.sell.filled.institution": 1000.0,
        "vol.buy.partially_filled.institution": 300.0,
        "vol.sell.partially_filled.institution": 200.0,
        "vol.buy.limit.institution": 2000.0,
        "vol.sell.limit.institution": 1500.0,
        "vol.buy.canceled.institution": 400.0,
        "vol.sell.canceled.institution": 200.0,
    }


@dataclass(frozen=True)
class Overlay:
    """
    Event-aligned multiplicative shape of one quantity selector:

        H                               at t = t_max
        1 + (H - 1)(1 + t_max - t)^-b   for t_max - ramp_minutes <= t < t_max
        1 + h t^-alpha                  for t >= 1 and t > t_max
        linear from H to 1 + h          for t_max < t < 1

    and 1 everywhere else, with H = height, h = decay and b = ramp_exponent.
    """

    quantity: str
    height: float
    alpha: float
    t_max: int = 0
    decay: Optional[float] = None
    ramp_exponent: float = 1.0
    ramp_minutes: int = 30

    @property
    def amplitude(self):
        return self.decay if self.decay is not None else 0.5 * (self.height - 1.0)

    def validate(self):
        if self.quantity not in OVERLAY_SELECTORS:
            try:
                kind, _ = parse_quantity(self.quantity)
            except ConfigurationException as exc:
                raise ScenarioException(exc.getMsg())
            if kind != "vol":
                raise ScenarioException(f"overlay on '{self.quantity}': only volume cells can carry an overlay")
        if not self.alpha > 0:
            raise ScenarioException(f"overlay on {self.quantity}: alpha must be > 0")
        if not self.height > 1 or not self.amplitude > 0:
            raise ScenarioException(f"overlay on {self.quantity}: height must be > 1 and decay > 0")
        if self.amplitude + 1.0 >= self.height:
            raise ScenarioException(f"overlay on {self.quantity}: 1 + decay must stay below the height")
        if not -100 < self.t_max < 200:
            raise ScenarioException(f"overlay on {self.quantity}: t_max outside the event window")
        if self.ramp_minutes < 0 or not self.ramp_exponent > 0:
            raise ScenarioException(f"overlay on {self.quantity}: invalid ramp")

    def shape(self, offsets):
        offsets = np.asarray(offsets)
        values = np.ones(offsets.shape)
        height, decay = self.height, self.amplitude
        ramp = (offsets < self.t_max) & (offsets >= self.t_max - self.ramp_minutes)
        values[ramp] = 1.0 + (height - 1.0) * (1.0 + self.t_max - offsets[ramp]) ** (-self.ramp_exponent)
        values[offsets == self.t_max] = height
        tail = (offsets > self.t_max) & (offsets >= 1)
        values[tail] = 1.0 + decay * offsets[tail].astype(float) ** (-self.alpha)
        bridge = (offsets > self.t_max) & (offsets < 1)
        if np.any(bridge):
            fraction = (offsets[bridge] - self.t_max) / (1.0 - self.t_max)
            values[bridge] = height + (1.0 + decay - height) * fraction
        return values


@dataclass(frozen=True)
class InjectedEvent:
    stock_id: str
    day: int
    minute: int
    sign: str = "positive"
    jump: float = 0.05
    reversal: float = 0.0
    reversal_minutes: int = 15
    overlays: Tuple[Overlay, ...] = ()

    @property
    def direction(self):
        return 1.0 if self.sign == "positive" else -1.0


@dataclass(frozen=True)
class OrderFlowSpec:
    """Parameters of the zero-intelligence order-flow simulator"""

    orders_per_minute: float = 5.0
    institution_share: float = 0.3
    buy_fraction: float = 0.5
    partial_fraction: float = 0.2
    max_lots: int = 10
    tick: float = 0.01
    rates: Dict[str, Tuple[float, float, float]] = field(default_factory=lambda: dict(DEFAULT_RATES))

    def action_probabilities(self, investor):
        """
        Probabilities of (market, limit, cancel) actions such that the logical-order rates match the targets. A
        partially filled market action yields one market and one limit logical order.
        """
        market, limit, cancel = self.rates[investor]
        weights = np.array([market, limit - market * self.partial_fraction, cancel])
        if np.any(weights < 0):
            raise ScenarioException(f"rates of {investor} cannot be reached with partial_fraction {self.partial_fraction}")
        return weights / weights.sum()


@dataclass(frozen=True)
class ScenarioSpec:
    stocks: Tuple[str, ...] = ("SYN000",)
    days: int = 20
    seed: int = 0
    start_date: str = "20030102"
    noise: float = 0.2
    return_scale: float = 0.0005
    base_price: float = 10.0
    base_spread: float = 0.02
    order_size: float = 500.0
    profiles: Dict[str, List[float]] = field(default_factory=_default_profiles)
    class_volume: Dict[str, float] = field(default_factory=_default_class_volume)
    overlays: Tuple[Overlay, ...] = ()
    events: Tuple[InjectedEvent, ...] = ()
    orderflow: OrderFlowSpec = field(default_factory=OrderFlowSpec)

    def validate(self):
        """Raises ScenarioException when the scenario violates an invariant"""
        if not self.stocks or self.days < 1:
            raise ScenarioException("at least one stock and one day are needed")
        if self.noise < 0 or self.return_scale < 0 or not self.base_price > 0 or not self.order_size > 0:
            raise ScenarioException("noise, return_scale, base_price and order_size must be non-negative/positive")
        for name in OVERLAY_SELECTORS:
            profile = np.asarray(self.profiles.get(name, []), dtype=float)
            if profile.shape != (MINUTES_PER_DAY,) or np.any(profile <= 0):
                raise ScenarioException(f"profile of {name} must hold {MINUTES_PER_DAY} positive values")
        for overlay in self.overlays:
            overlay.validate()
        taken = {}
        for event in self.events:
            if event.stock_id not in self.stocks:
                raise ScenarioException(f"event on unknown stock {event.stock_id}")
            if not 0 <= event.day < self.days or not 2 <= event.minute <= MINUTES_PER_DAY:
                raise ScenarioException(f"event at day {event.day} minute {event.minute} outside the sample")
            if event.sign not in ("positive", "negative"):
                raise ScenarioException(f"event sign must be positive or negative, got {event.sign}")
            if not event.jump > 0 or event.reversal < 0 or event.reversal_minutes < 1:
                raise ScenarioException("jump must be > 0, reversal >= 0 and reversal_minutes >= 1")
            for overlay in event.overlays:
                overlay.validate()
            position = event.day * MINUTES_PER_DAY + event.minute - 1
            for other in taken.get(event.stock_id, []):
                if abs(other - position) <= 300:
                    raise ScenarioException(f"events of {event.stock_id} closer than the 301-minute window")
            taken.setdefault(event.stock_id, []).append(position)
        for investor in DEFAULT_RATES:
            rates = self.orderflow.rates.get(investor)
            if rates is None or len(rates) != 3 or min(rates) < 0 or not math.isclose(sum(rates), 1.0, abs_tol=1e-9):
                raise ScenarioException(f"rates of {investor} must be three non-negative values adding to 1")
            self.orderflow.action_probabilities(investor)
        return self

    def overlays_of(self, event):
        return event.overlays if event.overlays else self.overlays

    def dates(self):
        start = pd.Timestamp(self.start_date)
        return [day.strftime("%Y%m%d") for day in pd.bdate_range(start, periods=self.days)]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        try:
            values = dict(data)
            values["overlays"] = tuple(Overlay(**item) for item in values.get("overlays", ()))
            values["events"] = tuple(
                InjectedEvent(**{**item, "overlays": tuple(Overlay(**overlay) for overlay in item.get("overlays", ()))})
                for item in values.get("events", ())
            )
            if "orderflow" in values:
                flow = dict(values["orderflow"])
                if "rates" in flow:
                    flow["rates"] = {key: tuple(value) for key, value in flow["rates"].items()}
                values["orderflow"] = OrderFlowSpec(**flow)
            if "stocks" in values:
                values["stocks"] = tuple(values["stocks"])
            known = {item.name for item in fields(cls)}
            unknown = set(values) - known
            if unknown:
                raise ScenarioException(f"unknown scenario keys {sorted(unknown)}")
            return cls(**values).validate()
        except TypeError as exc:
            raise ScenarioException(str(exc))

    @classmethod
    def load(cls, path):
        try:
            with open(path, "r") as file_handle:
                return cls.from_dict(json.load(file_handle))
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioException(f"cannot read scenario {path}: {exc}")

    def dump(self, path):
        with open(path, "w") as file_handle:
            json.dump(self.to_dict(), file_handle, indent=2, sort_keys=True)
            file_handle.write("\n")


@dataclass
class GroundTruth:
    """Everything the generator put into its output"""

    events: List[InjectedEvent] = field(default_factory=list)
    alphas: Dict[str, List[float]] = field(default_factory=dict)
    profiles: Dict[str, List[float]] = field(default_factory=dict)
    labels: List[Tuple] = field(default_factory=list)

    LABEL_COLUMNS = ["stock_id", "date", "order_id", "aggressiveness", "side", "investor_class", "size"]

    def label_counts(self):
        counts = {}
        for label in self.labels:
            counts[label[3]] = counts.get(label[3], 0) + 1
        return dict(sorted(counts.items()))

    def labels_frame(self):
        return pd.DataFrame(self.labels, columns=self.LABEL_COLUMNS)

    def to_dict(self):
        return {
            "events": [asdict(event) for event in self.events],
            "alphas": self.alphas,
            "profiles": self.profiles,
            "label_counts": self.label_counts(),
        }

    def dump(self, path):
        path = Path(path)
        with open(path, "w") as file_handle:
            json.dump(self.to_dict(), file_handle, indent=2, sort_keys=True)
            file_handle.write("\n")
        return path
