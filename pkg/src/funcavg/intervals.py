"""Interval estimates tagged by construction method."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

#: Every interval construction the package can produce.
METHODS = frozenset({
    "hoeffding",        # range-based bound, full pooled range
    "hoeffding-u",      # doubled replicate range, sharper centered constant
    "hoeffding-u2",     # doubled replicate range, general constant
    "percentile",       # quantiles of the replicate distribution
    "t-dist",           # classical Student-t regression interval
    "u-concentration",  # residual-range concentration bound for coefficients
})


def check_alpha(alpha: float) -> float:
    if not (np.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie strictly inside (0, 1), got {alpha}")
    return float(alpha)


@dataclass(frozen=True)
class IntervalEstimate:
    """A point estimate together with a two-sided confidence interval.

    Endpoints are closed: ``contains`` uses ``lower <= theta <= upper``.
    """

    point: float
    lower: float
    upper: float
    alpha: float
    method: str

    def __post_init__(self):
        check_alpha(self.alpha)
        if self.method not in METHODS:
            raise ParameterError(
                f"unknown method tag {self.method!r}; expected one of {sorted(METHODS)}")
        if not (np.isfinite(self.point) and np.isfinite(self.lower)
                and np.isfinite(self.upper)):
            raise ParameterError("interval endpoints and point must be finite")
        if self.lower > self.upper:
            raise ParameterError(
                f"interval endpoints out of order: ({self.lower}, {self.upper})")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, theta: float) -> bool:
        return bool(self.lower <= theta <= self.upper)

    def excludes(self, value: float) -> bool:
        """True when ``value`` falls strictly outside the closed interval."""
        return not self.contains(value)
