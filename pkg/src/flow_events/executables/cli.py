"""
cli.py:

This file sets up the argument parsing shared by the flow-events commands. Each ParserBase subclass contributes one
group of arguments and post-processes them; commands assemble the groups they need with CompositeParser.

Configuration is layered: built-in defaults, then the --config file, then the command-line flags, which mirror the
config keys one to one.
"""
import argparse
import datetime
import itertools
import os
from abc import ABC, abstractmethod
from typing import Any, Dict, Tuple

import flow_events.common.logger
from flow_events.analysis.detect import VOLATILITY_REFERENCES
from flow_events.analysis.study import GROUP_DEFINITIONS
from flow_events.common.data_types.exceptions import ConfigurationException
from flow_events.common.utils.config_manager import ConfigManager
from flow_events.pipeline.run_config import RANGE_PREFIX, SYNTH_MODES, RunConfig

# argparse destination -> (config section, config key)
CONFIG_OVERRIDES = {
    "inputs": ("paths", "inputs"),
    "split_table": ("paths", "split_table"),
    "output": ("paths", "output"),
    "delimiter": ("ingest", "delimiter"),
    "threshold_abs": ("detect", "threshold_abs"),
    "window_max": ("detect", "window_max"),
    "volatility_multiple": ("detect", "volatility_multiple"),
    "opening_exclusion": ("detect", "opening_exclusion"),
    "closing_exclusion": ("detect", "closing_exclusion"),
    "volatility_reference": ("detect", "volatility_reference"),
    "exclude_event_days": ("deseason", "exclude_event_days"),
    "pre_window": ("study", "pre_window"),
    "post_window": ("study", "post_window"),
    "quantities": ("study", "quantities"),
    "groups": ("study", "groups"),
    "fit_range": ("relax", "fit_range"),
    "seed": ("synth", "seed"),
    "scenario": ("synth", "scenario"),
    "synth_mode": ("synth", "mode"),
    "precision": ("output", "precision"),
}


class ParserBase(ABC):
    """Base parser for handling flow-events command lines

    Parsers must define "get_arguments", producing the flags they handle, and "handle_arguments" to do any necessary
    processing of the parsed values.
    """

    DESCRIPTION = None

    @property
    def description(self):
        """Return parser description"""
        return self.DESCRIPTION if self.DESCRIPTION else "Unknown command line parser"

    @abstractmethod
    def get_arguments(self) -> Dict[Tuple[str, ...], Dict[str, Any]]:
        """Return argument list handled by this parser

        Returns:
            dictionary of flag tuple to keyword arguments of argparse's add_argument
        """

    def get_parser(self) -> argparse.ArgumentParser:
        """Return an argument parser to parse arguments here-in"""
        parser = argparse.ArgumentParser(description=self.description, add_help=True)
        self.add_to(parser)
        return parser

    def add_to(self, parser):
        """Add the arguments to an existing parser or subparser"""
        for flags, keywords in self.get_arguments().items():
            parser.add_argument(*flags, **keywords)
        return parser

    @abstractmethod
    def handle_arguments(self, args, **kwargs):
        """Post-process the parser's arguments

        Args:
            args: arguments namespace of processed arguments
        Returns: namespace with processed results of arguments.
        """


class CompositeParser(ParserBase):
    """Composite parser handles parsing as a composition of multiple other parsers"""

    def __init__(self, constituents, description=None):
        """Construct this parser by instantiating the sub-parsers"""
        self.given = description
        constructed = [constituent() for constituent in constituents]
        flattened = itertools.chain.from_iterable(
            item.constituents if isinstance(item, CompositeParser) else [item] for item in constructed
        )
        # one instance per parser class, first occurrence wins
        unique = {}
        for item in flattened:
            unique.setdefault(type(item), item)
        self.constituent_parsers = list(unique.values())

    @property
    def constituents(self):
        """Get constituent"""
        return self.constituent_parsers

    @property
    def description(self):
        """Return parser description"""
        return self.given if self.given else ",".join(item.description for item in self.constituents)

    def get_arguments(self) -> Dict[Tuple[str, ...], Dict[str, Any]]:
        """Get the argument from all constituents"""
        arguments = {}
        for constituent in self.constituents:
            arguments.update(constituent.get_arguments())
        return arguments

    def handle_arguments(self, args, **kwargs):
        """Process all constituent arguments"""
        for constituent in self.constituents:
            args = constituent.handle_arguments(args, **kwargs)
        return args


class LogDeployParser(ParserBase):
    """
    A parser that handles log files by reading in a '--logs' directory. Without one, log output goes to the console.
    """

    DESCRIPTION = "Process arguments needed to specify a logging"

    def get_arguments(self) -> Dict[Tuple[str, ...], Dict[str, Any]]:
        """Return arguments to parse logging options"""
        return {
            ("-l", "--logs"): {
                "dest": "logs",
                "action": "store",
                "default": None,
                "type": str,
                "help": "Logging directory. Created if non-existent. [default: console only]",
            },
            ("--log-directly",): {
                "dest": "log_directly",
                "action": "store_true",
                "default": False,
                "help": "Logging directory is used directly, no extra dated directories created.",
            },
            ("--log-to-stdout",): {
                "action": "store_true",
                "default": False,
                "help": "Log to standard out along with log output files",
            },
        }

    def handle_arguments(self, args, **kwargs):
        """
        Read the arguments specified in this parser and set up the python logging

        :param args: parsed arguments as namespace
        :return: args namespace
        """
        if args.logs is not None:
            if not args.log_directly:
                args.logs = os.path.abspath(
                    os.path.join(args.logs, datetime.datetime.now().strftime("%Y_%m_%d-%H_%M_%S"))
                )
                # A dated directory has been set, all log handling must now be direct
                args.log_directly = True
            os.makedirs(args.logs, exist_ok=True)
        flow_events.common.logger.configure_py_log(
            args.logs, filename="flow-events", mirror_to_stdout=args.log_to_stdout
        )
        return args


class FilterParser(ParserBase):
    """Extreme-event filter settings, each one overriding its [detect] key"""

    DESCRIPTION = "Process arguments of the extreme-event filters"

    def get_arguments(self) -> Dict[Tuple[str, ...], Dict[str, Any]]:
        return {
            ("--threshold-abs",): {
                "dest": "threshold_abs",
                "type": float,
                "default": None,
                "help": "Absolute filter on the cumulative log return. [default: 0.04]",
            },
            ("--window-max",): {
                "dest": "window_max",
                "type": int,
                "default": None,
                "help": "Largest window length in minutes. [default: 60]",
            },
            ("--volatility-multiple",): {
                "dest": "volatility_multiple",
                "type": float,
                "default": None,
                "help": "Relative filter multiple of the average window volatility. [default: 6]",
            },
            ("--opening-exclusion",): {
                "dest": "opening_exclusion",
                "type": int,
                "default": None,
                "help": "Minutes after the open without events. [default: 5]",
            },
            ("--closing-exclusion",): {
                "dest": "closing_exclusion",
                "type": int,
                "default": None,
                "help": "Minutes before the close without events. [default: 60]",
            },
            ("--volatility-reference",): {
                "dest": "volatility_reference",
                "choices": VOLATILITY_REFERENCES,
                "default": None,
                "help": "Average the window volatility over all windows of a length or per clock minute.",
            },
        }

    def handle_arguments(self, args, **kwargs):
        return args


class StudyParser(ParserBase):
    """Event study, deseasonalization and fit settings"""

    DESCRIPTION = "Process arguments of the event study and the relaxation fits"

    def get_arguments(self) -> Dict[Tuple[str, ...], Dict[str, Any]]:
        return {
            ("--quantities",): {
                "dest": "quantities",
                "nargs": "+",
                "default": None,
                "help": "Quantities to study, e.g. abs_return vol.buy.market rate.institution.cancel [default: all]",
            },
            ("--groups",): {
                "dest": "groups",
                "nargs": "+",
                "choices": GROUP_DEFINITIONS,
                "default": None,
                "help": "Event group definitions. [default: sign]",
            },
            ("--pre-window",): {"dest": "pre_window", "type": int, "default": None, "help": "[default: 100]"},
            ("--post-window",): {"dest": "post_window", "type": int, "default": None, "help": "[default: 200]"},
            ("--exclude-event-days",): {
                "dest": "exclude_event_days",
                "action": "store_true",
                "default": None,
                "help": "Leave days with an event out of the intraday patterns",
            },
            ("--fit-range",): {
                "dest": "fit_range",
                "nargs": 2,
                "type": int,
                "metavar": ("LO", "HI"),
                "default": None,
                "help": "Fit range in minutes after the event. [default: 1 300]",
            },
            ("--quantity-fit-range",): {
                "dest": "quantity_fit_ranges",
                "nargs": 3,
                "action": "append",
                "metavar": ("QUANTITY", "LO", "HI"),
                "default": None,
                "help": "Fit range of one quantity, may be repeated",
            },
        }

    def handle_arguments(self, args, **kwargs):
        return args


class RunConfigParser(ParserBase):
    """
    Loads the configuration file, applies the flag overrides of every parser and attaches the resulting RunConfig
    as args.run_config.
    """

    DESCRIPTION = "Process arguments needed to configure a run"

    def get_arguments(self) -> Dict[Tuple[str, ...], Dict[str, Any]]:
        return {
            ("-c", "--config"): {
                "dest": "config",
                "type": str,
                "default": None,
                "help": "Configuration file, missing keys keep their defaults",
            },
            ("-i", "--inputs"): {
                "dest": "inputs",
                "nargs": "+",
                "default": None,
                "help": "Order-flow input files",
            },
            ("--split-table",): {"dest": "split_table", "type": str, "default": None, "help": "Stock split table"},
            ("-o", "--output"): {
                "dest": "output",
                "type": str,
                "default": None,
                "help": "Output directory of the run. [default: flow_events_output]",
            },
            ("--delimiter",): {"dest": "delimiter", "type": str, "default": None, "help": "Input delimiter"},
            ("--precision",): {"dest": "precision", "type": int, "default": None, "help": "Decimals of outputs"},
            ("--scenario",): {"dest": "scenario", "type": str, "default": None, "help": "Synthetic scenario JSON"},
            ("--seed",): {"dest": "seed", "type": int, "default": None, "help": "Seed replacing the scenario's"},
            ("--synth-mode",): {
                "dest": "synth_mode",
                "choices": SYNTH_MODES,
                "default": None,
                "help": "Generate minute bars or a tick-level order stream. [default: bars]",
            },
        }

    def handle_arguments(self, args, **kwargs):
        """
        Raises:
            ConfigurationException for invalid values, UndefinedFileException for a missing config file
        """
        ConfigManager.reset_instance()
        config = ConfigManager.get_instance()
        if getattr(args, "config", None):
            if not os.path.isfile(args.config):
                raise ConfigurationException(f"config file {args.config} not found")
            config.set_configs(args.config)
        for dest, (section, key) in CONFIG_OVERRIDES.items():
            value = getattr(args, dest, None)
            if value is None:
                continue
            if isinstance(value, (list, tuple)):
                value = ",".join(str(item) for item in value)
            elif isinstance(value, bool):
                value = str(value).lower()
            config.set(section, key, str(value))
        for quantity, low, high in getattr(args, "quantity_fit_ranges", None) or []:
            config.set("relax", f"{RANGE_PREFIX}{quantity}", f"{low},{high}")
        args.run_config = RunConfig.from_config(config)
        return args
