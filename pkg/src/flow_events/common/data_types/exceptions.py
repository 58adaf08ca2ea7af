"""
@brief Exception classes for every flow_events stage

All stages raise subclasses of FlowEventsException so that the pipeline can name the failing stage and the CLI can
convert the failure into an exit code.
"""


class FlowEventsException(Exception):
    def __init__(self, val):
        self.except_msg = val
        super().__init__(val)

    def getMsg(self):
        return self.except_msg


class UndefinedFileException(FlowEventsException):
    def __init__(self, val):
        super().__init__(f"Path does not exist or cannot be read: {str(val)}!")


class ParsingException(FlowEventsException):
    """Record-level schema violation. Collected by the parser, never fatal on its own."""

    def __init__(self, line_number, val):
        self.line_number = line_number
        super().__init__(f"Line {line_number}: {str(val)}")


class StreamOrderException(FlowEventsException):
    def __init__(self, stock_id, line_number):
        self.stock_id = stock_id
        self.line_number = line_number
        super().__init__(
            f"Line {line_number}: timestamp decreases within stock {stock_id}, feed is corrupted"
        )


class ConfigurationException(FlowEventsException):
    def __init__(self, val):
        super().__init__(f"Configuration error: {str(val)}")


class DimensionMismatchException(FlowEventsException):
    def __init__(self, expected, actual):
        super().__init__(f"Dimension mismatch: expected {expected}, got {actual}")


class EmptyGroupException(FlowEventsException):
    def __init__(self, val):
        super().__init__(f"No events detected: {str(val)}")


class FitRefusedException(FlowEventsException):
    def __init__(self, quantity, points):
        self.points = points
        super().__init__(
            f"Power-law fit refused for {quantity}: {points} positive points in range, at least 3 needed"
        )


class ManifestException(FlowEventsException):
    def __init__(self, val):
        super().__init__(f"Bad manifest: {str(val)}")


class ScenarioException(FlowEventsException):
    def __init__(self, val):
        super().__init__(f"Invalid scenario: {str(val)}")


class StageFailure(FlowEventsException):
    """Wraps a failure with the name of the pipeline stage that produced it"""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        detail = cause.getMsg() if isinstance(cause, FlowEventsException) else str(cause)
        super().__init__(f"Stage '{stage}' failed: {detail}")
