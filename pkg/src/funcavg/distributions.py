"""Seedable samplers for every generating process used by the simulations.

Supports are always bounded and known, because the estimands downstream are
functionals of the support rather than of moments.  Each sampler takes an
explicit :class:`~funcavg.rng.RngStream` so that simulation runs are
reproducible draw for draw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ParameterError
from .rng import RngStream

__all__ = [
    "TruncatedNormalSpec",
    "BernoulliSpec",
    "BinomialSpec",
    "sample_truncated_normal",
    "sample_bernoulli",
    "sample_bernoulli_probs",
    "sample_binomial",
    "true_functional_average",
    "round_to_integers",
]


@dataclass(frozen=True)
class TruncatedNormalSpec:
    """Normal distribution restricted to the closed interval [lower, upper].

    Parameters
    ----------
    lower, upper : float
        Support endpoints, ``lower < upper``.
    mu, sigma : float
        Location and scale of the parent normal before truncation.
    """

    lower: float
    upper: float
    mu: float
    sigma: float

    def __post_init__(self):
        vals = (self.lower, self.upper, self.mu, self.sigma)
        if not all(np.isfinite(v) for v in vals):
            raise ParameterError(f"truncated normal parameters must be finite, got {vals}")
        if not self.lower < self.upper:
            raise ParameterError(
                f"truncation requires lower < upper, got [{self.lower}, {self.upper}]")
        if self.sigma <= 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")

    @property
    def support(self) -> tuple[float, float]:
        return (self.lower, self.upper)


@dataclass(frozen=True)
class BernoulliSpec:
    """Coin flip with success probability ``p``."""

    p: float

    def __post_init__(self):
        if not (np.isfinite(self.p) and 0.0 <= self.p <= 1.0):
            raise ParameterError(f"p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class BinomialSpec:
    """Number of successes in ``trials`` flips with success probability ``p``."""

    trials: int
    p: float

    def __post_init__(self):
        if not (isinstance(self.trials, (int, np.integer)) and self.trials >= 1):
            raise ParameterError(f"trials must be a positive integer, got {self.trials}")
        if not (np.isfinite(self.p) and 0.0 <= self.p <= 1.0):
            raise ParameterError(f"p must lie in [0, 1], got {self.p}")

    @property
    def support(self) -> tuple[int, int]:
        return (0, self.trials)


def _check_size(n) -> int:
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ParameterError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def sample_truncated_normal(spec: TruncatedNormalSpec, n, rng: RngStream) -> np.ndarray:
    """Draw ``n`` values from a truncated normal by CDF inversion.

    Uniform variates are mapped through the inverse of the truncated CDF.
    When both cut points sit in the upper tail the computation runs on
    survival probabilities instead, which keeps the tail inversion accurate
    where the plain CDF would lose all precision to cancellation.

    Returns
    -------
    numpy.ndarray
        Float array of shape ``(n,)`` with every value inside
        ``[spec.lower, spec.upper]``.
    """
    n = _check_size(n)
    u = rng.generator().random(n)
    a = (spec.lower - spec.mu) / spec.sigma
    b = (spec.upper - spec.mu) / spec.sigma
    if a >= 0:
        # Both endpoints at or above the parent mean: mirror into the lower
        # tail, where ndtr keeps full relative precision.
        qa = ndtr(-a)
        qb = ndtr(-b)
        z = -ndtri(qa + u * (qb - qa))
    else:
        pa = ndtr(a)
        pb = ndtr(b)
        z = ndtri(pa + u * (pb - pa))
    out = spec.mu + spec.sigma * z
    return np.clip(out, spec.lower, spec.upper)


def sample_bernoulli(spec: BernoulliSpec, n, rng: RngStream) -> np.ndarray:
    """Draw ``n`` Bernoulli(p) values as an integer 0/1 array."""
    n = _check_size(n)
    return (rng.generator().random(n) < spec.p).astype(np.int64)


def sample_bernoulli_probs(probs, rng: RngStream) -> np.ndarray:
    """Draw one Bernoulli value per entry of ``probs``.

    Used for treatment assignment whose probability depends on a covariate.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ParameterError("probs must be a non-empty 1-D array")
    if not np.all(np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise ParameterError("every probability must lie in [0, 1]")
    return (rng.generator().random(p.size) < p).astype(np.int64)


def sample_binomial(spec: BinomialSpec, n, rng: RngStream) -> np.ndarray:
    """Draw ``n`` Binomial(trials, p) counts as an integer array."""
    n = _check_size(n)
    return rng.generator().binomial(spec.trials, spec.p, size=n).astype(np.int64)


def true_functional_average(lower: float, upper: float) -> float:
    """Uniform average of a regular support: the midpoint of its endpoints.

    For an interval, or for any grid of evenly spaced values, averaging the
    support uniformly gives ``(lower + upper) / 2`` regardless of how the
    probability mass is distributed over it.
    """
    if not (np.isfinite(lower) and np.isfinite(upper)):
        raise ParameterError(f"support endpoints must be finite, got ({lower}, {upper})")
    if lower > upper:
        raise ParameterError(f"support endpoints out of order: ({lower}, {upper})")
    return (lower + upper) / 2.0


def round_to_integers(values) -> np.ndarray:
    """Round to the nearest integer, ties away from zero.

    ``2.5`` becomes ``3`` and ``-2.5`` becomes ``-3``, matching the
    convention used to build integer-valued outcomes from continuous draws.
    """
    x = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ParameterError("cannot round non-finite values")
    return np.copysign(np.floor(np.abs(x) + 0.5), x).astype(np.int64)
