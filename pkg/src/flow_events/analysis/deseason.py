"""
deseason.py:

Intraday pattern removal. The pattern P(t') of a quantity is its mean over days at every intraday minute, estimated
per stock and quantity; the deseasonalized series is x(d, t') = X(d, t') / P(t'). Minutes where P is zero or not
estimable are masked and yield NaN.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from flow_events.common.data_types.exceptions import DimensionMismatchException

LOGGER = logging.getLogger("deseason")


@dataclass(frozen=True)
class IntradayPattern:
    quantity: str
    values: np.ndarray
    mask: np.ndarray

    @property
    def fully_masked(self):
        return not np.any(self.mask)


@dataclass(frozen=True)
class DeseasonalizedSeries:
    stock_id: str
    quantity: str
    values: np.ndarray


def estimate_pattern(grid, quantity="", excluded_days=None):
    """
    Cross-day mean profile

    Args:
        grid: X on the (days, minutes) grid, NaN entries are ignored
        quantity: name carried into the pattern
        excluded_days: optional boolean array over days left out of the mean
    Returns:
        IntradayPattern; mask is True where P is finite and > 0
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2 or grid.shape[0] == 0:
        raise DimensionMismatchException("(days >= 1, minutes)", grid.shape)
    used = grid
    if excluded_days is not None and np.any(excluded_days):
        keep = ~np.asarray(excluded_days, dtype=bool)
        if np.any(keep):
            used = grid[keep]
        else:
            LOGGER.warning("Pattern of %s: every day excluded, using all days", quantity)
    counts = np.sum(np.isfinite(used), axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(counts > 0, np.nansum(used, axis=0) / np.where(counts > 0, counts, 1), np.nan)
    mask = np.isfinite(values) & (values > 0)
    if not np.any(mask):
        LOGGER.warning("Pattern of %s is zero or undefined at every minute, fully masked", quantity)
    return IntradayPattern(quantity, values, mask)


def deseasonalize(grid, pattern, stock_id=""):
    """
    x = X / P

    Raises:
        DimensionMismatchException when the grid's minute axis differs from the pattern's
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2 or grid.shape[1] != pattern.values.shape[0]:
        raise DimensionMismatchException(("days", pattern.values.shape[0]), grid.shape)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(pattern.mask, grid / np.where(pattern.mask, pattern.values, 1.0), np.nan)
    return DeseasonalizedSeries(stock_id, pattern.quantity, values)


def pattern_frame(stock_id, patterns):
    """Export table, one row per (quantity, minute)"""
    frames = []
    for pattern in patterns:
        minutes = len(pattern.values)
        frames.append(
            pd.DataFrame(
                {
                    "stock_id": stock_id,
                    "quantity": pattern.quantity,
                    "minute": np.arange(1, minutes + 1),
                    "pattern": pattern.values,
                    "mask": pattern.mask.astype(int),
                }
            )
        )
    if not frames:
        return pd.DataFrame(columns=["stock_id", "quantity", "minute", "pattern", "mask"])
    return pd.concat(frames, ignore_index=True)
