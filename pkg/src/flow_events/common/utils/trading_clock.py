"""
@brief Intraday clock of the continuous double auction

Maps wall-clock times to the 240-minute intraday axis t' = 1..240. The morning session [09:30, 11:30) maps onto
t' = 1..120 and the afternoon session [13:00, 15:00) onto t' = 121..240. Bar t' covers [t'-1, t') minutes after the
session start, so the quote state recorded for t' is the last one strictly before the minute boundary.
"""
from dataclasses import dataclass

MINUTES_PER_DAY = 240


def clock_seconds(hours, minutes, seconds=0.0):
    return hours * 3600 + minutes * 60 + seconds


@dataclass(frozen=True)
class TradingClock:
    """Two trading sessions of one day, expressed in seconds after midnight"""

    morning_session: tuple = (clock_seconds(9, 30), clock_seconds(11, 30))
    afternoon_session: tuple = (clock_seconds(13, 0), clock_seconds(15, 0))

    @property
    def minutes_per_day(self):
        return int(
            (self.morning_session[1] - self.morning_session[0]
             + self.afternoon_session[1] - self.afternoon_session[0]) // 60
        )

    def in_session(self, seconds):
        """True when the time (seconds after midnight) lies inside one of the sessions"""
        return (self.morning_session[0] <= seconds < self.morning_session[1]) or (
            self.afternoon_session[0] <= seconds < self.afternoon_session[1]
        )

    def intraday_index(self, seconds):
        """
        Intraday minute t' of a time inside a session.

        Args:
            seconds: time of day in seconds after midnight
        Returns:
            t' in 1..minutes_per_day, or None when the time is outside both sessions
        """
        start, end = self.morning_session
        if start <= seconds < end:
            return int((seconds - start) // 60) + 1
        start, end = self.afternoon_session
        if start <= seconds < end:
            morning_minutes = int((self.morning_session[1] - self.morning_session[0]) // 60)
            return morning_minutes + int((seconds - start) // 60) + 1
        return None

    def minute_start(self, intraday_index):
        """Seconds after midnight at which bar t' starts. Inverse of intraday_index on minute boundaries."""
        if not 1 <= intraday_index <= self.minutes_per_day:
            raise ValueError(f"Intraday index {intraday_index} outside 1..{self.minutes_per_day}")
        morning_minutes = int((self.morning_session[1] - self.morning_session[0]) // 60)
        if intraday_index <= morning_minutes:
            return self.morning_session[0] + (intraday_index - 1) * 60
        return self.afternoon_session[0] + (intraday_index - morning_minutes - 1) * 60
