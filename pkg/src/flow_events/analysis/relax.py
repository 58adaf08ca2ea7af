"""
relax.py:

Power-law relaxation after events. The excess variable x_ex(t) = x(t) - 1 of a deseasonalized group curve is fitted
as x_ex ~ A t^(-alpha) by ordinary least squares of ln x_ex on ln t. Non-positive or missing points in the fit range
are dropped and counted.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from flow_events.common.data_types.exceptions import (
    ConfigurationException,
    EmptyGroupException,
    FitRefusedException,
)

LOGGER = logging.getLogger("relax")

DEFAULT_FIT_RANGE = (1, 300)
MINIMUM_POINTS = 3

REPORT_COLUMNS = [
    "group",
    "quantity",
    "status",
    "alpha",
    "stderr",
    "amplitude",
    "t_lo",
    "t_hi",
    "points_used",
    "points_dropped",
    "capped",
    "r_squared",
    "residual_std",
    "message",
]


@dataclass(frozen=True)
class ExcessSeries:
    group: str
    quantity: str
    offsets: np.ndarray
    values: np.ndarray

    @property
    def horizon(self):
        return int(self.offsets[-1]) if len(self.offsets) else 0


def excess(average):
    """x_ex(t) = x(t) - 1 for t = 1..horizon of a GroupAverage"""
    after = average.offsets >= 1
    return ExcessSeries(average.group, average.quantity, average.offsets[after], average.mean[after] - 1.0)


@dataclass(frozen=True)
class RelaxationFit:
    group: str
    quantity: str
    alpha: float
    stderr: float
    amplitude: float
    t_lo: int
    t_hi: int
    points_used: int
    points_dropped: int
    capped: bool = False
    r_squared: float = float("nan")
    residual_std: float = float("nan")

    def describe(self):
        return f"α = {self.alpha:.2f} ± {self.stderr:.2f}"

    def to_row(self):
        return {
            "group": self.group,
            "quantity": self.quantity,
            "status": "ok",
            "alpha": self.alpha,
            "stderr": self.stderr,
            "amplitude": self.amplitude,
            "t_lo": self.t_lo,
            "t_hi": self.t_hi,
            "points_used": self.points_used,
            "points_dropped": self.points_dropped,
            "capped": int(self.capped),
            "r_squared": self.r_squared,
            "residual_std": self.residual_std,
            "message": "",
        }


def fit_power_law(series, fit_range=DEFAULT_FIT_RANGE):
    """
    Log-log least squares fit of an excess series

    Args:
        series: ExcessSeries
        fit_range: (t_lo, t_hi) in minutes after the event; t_hi above the series horizon is capped
    Returns:
        RelaxationFit
    Raises:
        ConfigurationException for an invalid range, FitRefusedException with fewer than 3 usable points
    """
    t_lo, t_hi = (int(value) for value in fit_range)
    if t_lo < 1 or t_hi < t_lo:
        raise ConfigurationException(f"fit range [{t_lo},{t_hi}] must satisfy 1 <= t_lo <= t_hi")
    capped = t_hi > series.horizon
    if capped:
        LOGGER.warning(
            "%s/%s: fit range [%d,%d] capped at the horizon %d",
            series.group, series.quantity, t_lo, t_hi, series.horizon,
        )
        t_hi = series.horizon
    in_range = (series.offsets >= t_lo) & (series.offsets <= t_hi)
    size = max(t_hi - t_lo + 1, 0)
    with np.errstate(invalid="ignore"):
        usable = in_range & np.isfinite(series.values) & (series.values > 0)
    used = int(np.sum(usable))
    if used < MINIMUM_POINTS:
        raise FitRefusedException(f"{series.group}/{series.quantity}", used)
    log_t = np.log(series.offsets[usable].astype(float))
    log_x = np.log(series.values[usable])
    regression = stats.linregress(log_t, log_x)
    residuals = log_x - (regression.intercept + regression.slope * log_t)
    return RelaxationFit(
        group=series.group,
        quantity=series.quantity,
        alpha=float(-regression.slope),
        stderr=float(regression.stderr),
        amplitude=float(np.exp(regression.intercept)),
        t_lo=t_lo,
        t_hi=t_hi,
        points_used=used,
        points_dropped=size - used,
        capped=capped,
        r_squared=float(regression.rvalue ** 2),
        residual_std=float(np.std(residuals, ddof=2)) if used > 2 else float("nan"),
    )


def fit_range_for(quantity, ranges, default=DEFAULT_FIT_RANGE):
    """Per-quantity override or the default range"""
    return ranges.get(quantity, default)


def fit_report(averages, ranges=None, default_range=DEFAULT_FIT_RANGE, fittable=lambda quantity: True):
    """
    Fit every group curve

    Args:
        averages: dict (group, quantity) -> GroupAverage
        ranges: dict quantity -> (t_lo, t_hi) overrides
        fittable: predicate selecting the quantities to fit
    Returns:
        (list of RelaxationFit, report DataFrame in REPORT_COLUMNS order, refused fits listed with status 'refused')
    """
    ranges = ranges or {}
    fits, rows = [], []
    for (group, quantity) in sorted(averages):
        if not fittable(quantity):
            continue
        t_lo, t_hi = fit_range_for(quantity, ranges, default_range)
        try:
            fit = fit_power_law(excess(averages[(group, quantity)]), (t_lo, t_hi))
        except (FitRefusedException, EmptyGroupException) as exc:
            LOGGER.warning(exc.getMsg())
            rows.append(
                dict.fromkeys(REPORT_COLUMNS, np.nan)
                | {
                    "group": group,
                    "quantity": quantity,
                    "status": "refused",
                    "t_lo": t_lo,
                    "t_hi": t_hi,
                    "points_used": getattr(exc, "points", 0),
                    "message": exc.getMsg(),
                }
            )
            continue
        fits.append(fit)
        rows.append(fit.to_row())
    return fits, pd.DataFrame(rows, columns=REPORT_COLUMNS)
