""" Versioning information for flow_events

This file contains versioning and compatibility definitions for the files written by the pipeline stages. The
manifest of every run carries the output schema version so that report can refuse a run written by an incompatible
release.
"""

VERSION = "1.0.0"

# Bumped whenever a column is added, removed or reordered in any stage output
OUTPUT_SCHEMA_VERSION = 1
MINIMUM_SUPPORTED_SCHEMA_VERSION = 1
