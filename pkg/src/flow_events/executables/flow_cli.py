#!/usr/bin/env python3
# PYTHON_ARGCOMPLETE_OK

"""
Parses the given flow-events command line and runs the selected pipeline stage, the whole pipeline or the report.
The process exit status names the failing stage.
"""

import abc
import argparse
import logging
import sys
from typing import Callable

import argcomplete

from flow_events.common.data_types.exceptions import (
    ConfigurationException,
    FlowEventsException,
    ManifestException,
    StageFailure,
)
from flow_events.executables.cli import (
    CompositeParser,
    FilterParser,
    LogDeployParser,
    RunConfigParser,
    StudyParser,
)
from flow_events.pipeline.report import report
from flow_events.pipeline.standard import StandardPipeline
from flow_events.version import VERSION

LOGGER = logging.getLogger("cli")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CODES = {
    "config": 2,
    "ingest": 3,
    "classify": 4,
    "detect": 5,
    "study": 6,
    "fit": 7,
    "synth": 8,
    "report": 9,
}


class CliSubparserInjectorBase(abc.ABC):
    """
    An abstract class for CLI commands to implement; provides methods for
    injecting a new parser for this command into a parent parser
    """

    NAME = None
    HELP = None
    PARSERS = (LogDeployParser, RunConfigParser, FilterParser, StudyParser)

    @classmethod
    def inject_subparser(cls, parent_parser):
        """
        Adds this command as a sub-command to an existing parser, so that it
        can be passed in as an argument (similar to git's CLI tool)
        """
        command_parser = cls.create_subparser(parent_parser)
        cls.add_arguments(command_parser)
        command_parser.set_defaults(func=cls.command_func, validate=cls.validate_args)

    @classmethod
    def create_subparser(cls, parent_parser) -> argparse.ArgumentParser:
        return parent_parser.add_parser(cls.NAME, description=cls.HELP, help=cls.HELP)

    @classmethod
    def composite(cls):
        return CompositeParser(cls.PARSERS, cls.HELP)

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser):
        """
        Add all the required and optional arguments for this command to the
        given parser
        """
        cls.composite().add_to(parser)

    @classmethod
    def validate_args(cls, parser: argparse.ArgumentParser, args: argparse.Namespace):
        """
        Post-process the parsed arguments: logging setup, configuration layering

        Raises:
            ConfigurationException for invalid settings
        """
        return cls.composite().handle_arguments(args)

    @classmethod
    @abc.abstractmethod
    def command_func(cls, parsed_args, **kwargs) -> Callable:
        """
        Executes the appropriate function when this command is called
        """


class StageSubparserInjector(CliSubparserInjectorBase):
    """One pipeline stage on the configured output directory"""

    @classmethod
    def command_func(cls, parsed_args, **kwargs):
        pipeline = StandardPipeline().setup(parsed_args.run_config)
        counts = getattr(pipeline, cls.NAME)()
        print(f"{cls.NAME}: " + ", ".join(f"{key}={value}" for key, value in sorted(counts.items())))


class IngestSubparserInjector(StageSubparserInjector):
    NAME = "ingest"
    HELP = "Parse and validate order-flow files into per-stock streams"


class ClassifySubparserInjector(StageSubparserInjector):
    NAME = "classify"
    HELP = "Replay the streams through the book, classify orders and build minute bars"


class DetectSubparserInjector(StageSubparserInjector):
    NAME = "detect"
    HELP = "Detect extreme intraday price changes in the minute bars"


class StudySubparserInjector(StageSubparserInjector):
    NAME = "study"
    HELP = "Deseasonalize and average quantities around the detected events"


class FitSubparserInjector(StageSubparserInjector):
    NAME = "fit"
    HELP = "Fit power-law relaxations to the group curves"


class SynthSubparserInjector(StageSubparserInjector):
    NAME = "synth"
    HELP = "Generate a synthetic scenario with known ground truth"


class RunSubparserInjector(CliSubparserInjectorBase):
    NAME = "run"
    HELP = "Run the whole pipeline"

    @classmethod
    def command_func(cls, parsed_args, **kwargs):
        pipeline = StandardPipeline().setup(parsed_args.run_config)
        manifest = pipeline.run()
        print(f"run: {len(manifest.files)} files listed in {manifest.path}")


class ReportSubparserInjector(CliSubparserInjectorBase):
    NAME = "report"
    HELP = "Summarize a finished run from its manifest"
    PARSERS = (LogDeployParser,)

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser):
        super().add_arguments(parser)
        parser.add_argument("manifest", help="Output directory of the run or its manifest.json")
        parser.add_argument("--xlsx", default=None, help="Also write the summary tables to this spreadsheet")

    @classmethod
    def command_func(cls, parsed_args, **kwargs):
        try:
            print(report(parsed_args.manifest, parsed_args.xlsx), end="")
        except ManifestException as exc:
            raise StageFailure("report", exc)


COMMANDS = (
    IngestSubparserInjector,
    ClassifySubparserInjector,
    DetectSubparserInjector,
    StudySubparserInjector,
    FitSubparserInjector,
    SynthSubparserInjector,
    RunSubparserInjector,
    ReportSubparserInjector,
)


def create_parser():
    parser = argparse.ArgumentParser(
        description="extreme-event analytics of tick-level order flow: detection, event study and relaxation fits"
    )
    parser.add_argument("-V", "--version", action="version", version=VERSION)

    # Add subcommands to the parser
    subparser_root = parser.add_subparsers(dest="command")
    for command in COMMANDS:
        command.inject_subparser(subparser_root)
    return parser


def parse_args(parser: argparse.ArgumentParser, arguments):
    """
    Parses the given arguments and returns the resulting namespace; having this
    separate allows for unit testing if needed
    """
    args = parser.parse_args(arguments)
    if not args.command:
        return None
    return args.validate(parser, args)


def main(arguments=None):
    """
    Entry point

    Args:
        arguments: argument list, the process arguments when None
    Returns:
        exit status
    """
    parser = create_parser()
    argcomplete.autocomplete(parser)
    try:
        args_ns = parse_args(parser, sys.argv[1:] if arguments is None else arguments)
    except ConfigurationException as exc:
        print(f"[ERROR] {exc.getMsg()}", file=sys.stderr)
        return EXIT_CODES["config"]
    if args_ns is None:
        # no argument provided, so print the help message
        parser.print_help()
        return EXIT_OK

    try:
        args_ns.func(args_ns)
    except StageFailure as failure:
        print(f"[ERROR] {failure.getMsg()}", file=sys.stderr)
        return EXIT_CODES.get(failure.stage, EXIT_UNEXPECTED)
    except ConfigurationException as exc:
        print(f"[ERROR] {exc.getMsg()}", file=sys.stderr)
        return EXIT_CODES["config"]
    except FlowEventsException as exc:
        print(f"[ERROR] {exc.getMsg()}", file=sys.stderr)
        return EXIT_UNEXPECTED
    except Exception as exc:
        LOGGER.exception("Unexpected failure")
        print(f"[ERROR] {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
