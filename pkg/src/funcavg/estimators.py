"""Point estimators for the functional average of a bounded outcome.

The target is the uniform average of the outcome's support, not its
expectation, so the natural estimators are built from observed distinct
values and observed extremes rather than from sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParameterError

__all__ = [
    "as_sample",
    "TwoArmSample",
    "discrete_plugin_average",
    "midrange",
    "sample_mean",
    "arm_contrast",
    "ESTIMATORS",
]


def as_sample(values) -> np.ndarray:
    """Validate and return a 1-D float sample array.

    Raises :class:`~funcavg.errors.DataError` when the input is empty,
    not one-dimensional, or contains non-finite entries.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise DataError(f"sample must be 1-D, got shape {x.shape}")
    if x.size == 0:
        raise DataError("sample must contain at least one value")
    if not np.all(np.isfinite(x)):
        raise DataError("sample contains non-finite values")
    return x


def discrete_plugin_average(values, tolerance: float = 0.0) -> float:
    """Mean of the distinct observed values.

    Duplicates carry no extra weight: each distinct value counts once, so
    the estimate tracks the support rather than the probability mass on it.
    Support points that never appear in the sample contribute nothing;
    consistency rests on every value eventually being observed.

    Parameters
    ----------
    values : array-like
        Observed outcomes.
    tolerance : float, optional
        Distinctness threshold for continuous-ish data.  After sorting,
        neighbours closer than this are merged into one group represented
        by its group mean.  The default ``0.0`` treats only exact
        duplicates as equal, the right choice for integer outcomes.
    """
    x = as_sample(values)
    if tolerance < 0:
        raise ParameterError(f"tolerance must be non-negative, got {tolerance}")
    sx = np.sort(x)
    if tolerance == 0.0:
        return float(np.unique(sx).mean())
    # Groups are maximal runs of sorted values whose consecutive gaps stay
    # within the tolerance.
    boundaries = np.flatnonzero(np.diff(sx) > tolerance) + 1
    groups = np.split(sx, boundaries)
    return float(np.mean([g.mean() for g in groups]))


def midrange(values) -> float:
    """Midpoint of the observed extremes, ``(min + max) / 2``."""
    x = as_sample(values)
    return float((x.min() + x.max()) / 2.0)


def sample_mean(values) -> float:
    """Arithmetic mean, included for side-by-side comparisons."""
    return float(as_sample(values).mean())


ESTIMATORS = {
    "plugin": discrete_plugin_average,
    "midrange": midrange,
    "mean": sample_mean,
}


@dataclass(frozen=True)
class TwoArmSample:
    """Outcomes split by a binary treatment label."""

    treated: np.ndarray
    control: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "treated", as_sample(self.treated))
        object.__setattr__(self, "control", as_sample(self.control))

    @classmethod
    def from_labels(cls, values, labels) -> "TwoArmSample":
        """Split ``values`` by a 0/1 label array of the same length."""
        y = as_sample(values)
        t = np.asarray(labels)
        if t.shape != y.shape:
            raise DataError(
                f"labels shape {t.shape} does not match values shape {y.shape}")
        if not np.isin(t, (0, 1)).all():
            raise DataError("labels must contain only 0 and 1")
        mask = t == 1
        if mask.all() or not mask.any():
            raise DataError("both treatment arms must be non-empty")
        return cls(treated=y[mask], control=y[~mask])

    @property
    def n_treated(self) -> int:
        return self.treated.size

    @property
    def n_control(self) -> int:
        return self.control.size


def arm_contrast(two_arm: TwoArmSample, estimator="midrange", **kwargs) -> float:
    """Treatment-arm estimate minus control-arm estimate.

    ``estimator`` is a key of :data:`ESTIMATORS` or any callable mapping a
    sample to a float; keyword arguments are forwarded to it per arm.
    """
    fn = ESTIMATORS.get(estimator, estimator) if isinstance(estimator, str) else estimator
    if not callable(fn):
        raise ParameterError(
            f"unknown estimator {estimator!r}; expected one of {sorted(ESTIMATORS)} "
            "or a callable")
    return float(fn(two_arm.treated, **kwargs) - fn(two_arm.control, **kwargs))
