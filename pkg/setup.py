#!/usr/bin/env python
####
# flow_events Python Package:
#
# Extreme-event analytics of tick-level order flow. The package replays order streams through a matching engine to
# classify order aggressiveness, builds minute bars, detects extreme intraday price changes, averages deseasonalized
# quantities around them and fits the power-law relaxation that follows. A synthetic generator with known ground truth
# drives every stage for validation.
#
# Endpoints:
# - flow-events: run a pipeline stage, the whole pipeline, or the report of a finished run
#
# Optional Features:
# - Report XLSX Output: spreadsheet export of the report tables when openpyxl is installed
#
# Developer and Dynamic Installation:
# ```
# pip install -e .
# ```
###

from setuptools import find_packages, setup

setup(
    ####
    # Package Description:
    ####
    name="flow_events",
    version="1.0.0",
    license="Apache 2.0 License",
    description="Extreme price change detection and order-flow event studies on tick-level data.",
    long_description="""
This package contains the Python files used to detect extreme intraday price changes in tick-level order-flow data and
to characterize the order flow around them: deseasonalized event-aligned averages, peak statistics, order
aggressiveness and investor-type decompositions, and power-law relaxation exponents.
    """,
    keywords=["market microstructure", "limit order book", "event study", "power law"],
    ####
    # Included Packages:
    #
    # Will search for and included all python packages under the "src" directory. The root package is set to 'src'
    # to avoid package names of the form src.flow_events.
    ####
    packages=find_packages("src"),
    package_dir={"": "src"},
    include_package_data=True,
    zip_safe=False,
    ####
    # Entry Points:
    ####
    entry_points={
        "console_scripts": [
            "flow-events = flow_events.executables.flow_cli:main",
        ],
    },
    ####
    # Classifiers:
    ####
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Operating System :: Unix",
        "Operating System :: POSIX",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: Implementation :: CPython",
    ],
    python_requires=">=3.9",
    install_requires=[
        "argcomplete>=1.12.3",
        "numpy>=1.22",
        "pandas>=1.5",
        "scipy>=1.8",
        "sortedcontainers>=2.4",
        "pytest>=6.2.4",
        "openpyxl>=3.0.10",
    ],
)
