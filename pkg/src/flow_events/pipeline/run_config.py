"""
run_config.py:

Typed view of a whole run. RunConfig is read from a ConfigManager and written back into a fresh one, so a run's
settings can be stored next to its outputs and reloaded without loss.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from flow_events.analysis.detect import FilterConfig
from flow_events.analysis.quantities import default_quantities, parse_quantity
from flow_events.analysis.relax import DEFAULT_FIT_RANGE
from flow_events.analysis.study import GROUP_DEFINITIONS
from flow_events.common.data_types.exceptions import ConfigurationException, UndefinedFileException
from flow_events.common.utils.config_manager import ConfigManager

RANGE_PREFIX = "range."
SYNTH_MODES = ("bars", "orders")


def _join(values):
    return ",".join(str(value) for value in values)


@dataclass(frozen=True)
class RunConfig:
    inputs: Tuple[str, ...] = ()
    split_table: str = ""
    output: str = "flow_events_output"
    delimiter: str = ","
    exclude_outside_sessions: bool = True
    filter: FilterConfig = field(default_factory=FilterConfig)
    exclude_event_days: bool = False
    pre_window: int = 100
    post_window: int = 200
    quantities: Tuple[str, ...] = ()
    groups: Tuple[str, ...] = ("sign",)
    fit_range: Tuple[int, int] = DEFAULT_FIT_RANGE
    fit_ranges: Tuple[Tuple[str, Tuple[int, int]], ...] = ()
    seed: Optional[int] = None
    scenario: str = ""
    synth_mode: str = "bars"
    precision: int = 6
    output_delimiter: str = ","

    def __post_init__(self):
        if self.pre_window < 0 or self.post_window < 1:
            raise ConfigurationException("pre_window must be >= 0 and post_window >= 1")
        for name in self.quantities:
            parse_quantity(name)
        for name in self.groups:
            if name not in GROUP_DEFINITIONS:
                raise ConfigurationException(f"unknown group definition '{name}', expected one of {GROUP_DEFINITIONS}")
        for name, _ in self.fit_ranges:
            parse_quantity(name)
        if self.synth_mode not in SYNTH_MODES:
            raise ConfigurationException(f"[synth] mode must be one of {SYNTH_MODES}, got {self.synth_mode}")
        if self.precision < 0:
            raise ConfigurationException("[output] precision must be >= 0")

    @property
    def study_quantities(self):
        return list(self.quantities) if self.quantities else default_quantities()

    @property
    def range_overrides(self):
        return dict(self.fit_ranges)

    @classmethod
    def from_config(cls, config=None):
        """
        Args:
            config: ConfigManager, the singleton when omitted
        Raises:
            ConfigurationException on any invalid value
        """
        config = config if config is not None else ConfigManager.get_instance()
        seed = config.get("synth", "seed").strip()
        overrides = tuple(
            sorted(
                (key[len(RANGE_PREFIX):], config.get_range("relax", key))
                for key in config.options("relax")
                if key.startswith(RANGE_PREFIX)
            )
        )
        return cls(
            inputs=tuple(config.get_list("paths", "inputs")),
            split_table=config.get("paths", "split_table"),
            output=config.get("paths", "output"),
            delimiter=config.get("ingest", "delimiter"),
            exclude_outside_sessions=config.get_flag("ingest", "exclude_outside_sessions"),
            filter=FilterConfig.from_config(config),
            exclude_event_days=config.get_flag("deseason", "exclude_event_days"),
            pre_window=config.get_number("study", "pre_window", int),
            post_window=config.get_number("study", "post_window", int),
            quantities=tuple(config.get_list("study", "quantities")),
            groups=tuple(config.get_list("study", "groups")) or ("sign",),
            fit_range=config.get_range("relax", "fit_range"),
            fit_ranges=overrides,
            seed=int(seed) if seed else None,
            scenario=config.get("synth", "scenario"),
            synth_mode=config.get("synth", "mode"),
            precision=config.get_number("output", "precision", int),
            output_delimiter=config.get("output", "delimiter"),
        )

    def to_config(self):
        """A new ConfigManager holding exactly these settings"""
        config = ConfigManager()
        values = {
            "paths": {"inputs": _join(self.inputs), "split_table": self.split_table, "output": self.output},
            "ingest": {
                "delimiter": self.delimiter,
                "exclude_outside_sessions": str(self.exclude_outside_sessions).lower(),
            },
            "detect": {
                "threshold_abs": repr(self.filter.threshold_abs),
                "window_max": str(self.filter.window_max),
                "volatility_multiple": repr(self.filter.volatility_multiple),
                "opening_exclusion": str(self.filter.opening_exclusion),
                "closing_exclusion": str(self.filter.closing_exclusion),
                "volatility_reference": self.filter.volatility_reference,
            },
            "deseason": {"exclude_event_days": str(self.exclude_event_days).lower()},
            "study": {
                "pre_window": str(self.pre_window),
                "post_window": str(self.post_window),
                "quantities": _join(self.quantities),
                "groups": _join(self.groups),
            },
            "relax": {"fit_range": _join(self.fit_range)},
            "synth": {
                "seed": "" if self.seed is None else str(self.seed),
                "scenario": self.scenario,
                "mode": self.synth_mode,
            },
            "output": {"precision": str(self.precision), "delimiter": self.output_delimiter},
        }
        for quantity, bounds in self.fit_ranges:
            values["relax"][f"{RANGE_PREFIX}{quantity}"] = _join(bounds)
        for section, items in values.items():
            for key, value in items.items():
                config.set(section, key, value)
        return config

    def write(self, path):
        with open(path, "w") as file_handle:
            self.to_config().write(file_handle)
        return Path(path)

    def check_inputs(self):
        """Raises UndefinedFileException for the first input path that does not exist"""
        for path in self.inputs:
            if not Path(path).is_file():
                raise UndefinedFileException(path)
        if self.split_table and not Path(self.split_table).is_file():
            raise UndefinedFileException(self.split_table)
