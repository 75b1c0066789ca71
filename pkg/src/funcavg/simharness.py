"""Monte Carlo experiment runner for the five benchmark tables.

Each experiment is declared by an :class:`ExperimentSpec` and produces an
:class:`ExperimentReport` holding one row per (variant, sample size,
estimator, interval method) cell.  Every reported number is an
arithmetic average over iterations, including the confidence interval
endpoints, alongside empirical coverage of the true target and
empirical power against zero.

The experiments:

* ``table2``: midrange estimation for three truncated normal laws,
  contrasting the full-sample Hoeffding interval with Hoeffding and
  percentile intervals built from sqrt(n)-out-of-n resampling.
* ``table3``: the same laws widened to [0, 40] and rounded to integers;
  distinct-value plug-in vs midrange, with range-doubling intervals.
* ``table4``: a confounded two-arm design where the midrange contrast
  stays consistent while the unadjusted regression slope does not.
* ``table5``: the discrete analogue of table4 with binomial noise.
* ``table6``: regression slope intervals (t, residual-range, bootstrap)
  under a bounded symmetric error.

Determinism contract: every iteration draws from its own child stream
keyed by (experiment number, variant index, sample-size index, iteration
index) under the experiment's base seed, and per-iteration results land in
arrays indexed by iteration before any aggregation.  Reports are
therefore byte-reproducible and independent of execution order; the
runner checks key uniqueness before running.  Wall time is recorded on
the report object but deliberately left out of emitted files.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bootstrap import (
    BootstrapConfig,
    hoeffding_ci,
    hoeffding_u_ci,
    percentile_ci,
    popoviciu_check,
    resample,
)
from .distributions import (
    BernoulliSpec,
    BinomialSpec,
    TruncatedNormalSpec,
    round_to_integers,
    sample_bernoulli,
    sample_bernoulli_probs,
    sample_binomial,
    sample_truncated_normal,
)
from .errors import ParameterError
from .estimators import TwoArmSample, discrete_plugin_average, midrange
from .intervals import IntervalEstimate, check_alpha
from .regression import DesignMatrix, ols_fit, t_ci, u_concentration_ci
from .rng import RngStream

EXPERIMENTS = ("table2", "table3", "table4", "table5", "table6")

DESK_ITERATIONS = 200
DESK_GRID = (500, 2500)
FULL_ITERATIONS = 1000
FULL_GRID = (500, 2500, 5000, 10000)
DEFAULT_REPLICATES = 500

# Generating laws, with the target each estimator is judged against.
_TABLE2_LAWS = (
    ("TN(0,20,10,5)", TruncatedNormalSpec(0.0, 20.0, 10.0, 5.0), 10.0),
    ("TN(0,15,10,3)", TruncatedNormalSpec(0.0, 15.0, 10.0, 3.0), 7.5),
    ("TN(0,15,5,3)", TruncatedNormalSpec(0.0, 15.0, 5.0, 3.0), 7.5),
)
_TABLE3_LAWS = (
    ("round(TN(0,40,20,5))", TruncatedNormalSpec(0.0, 40.0, 20.0, 5.0), 20.0),
    ("round(TN(0,40,25,8))", TruncatedNormalSpec(0.0, 40.0, 25.0, 8.0), 20.0),
    ("round(TN(0,40,15,8))", TruncatedNormalSpec(0.0, 40.0, 15.0, 8.0), 20.0),
)
_TABLE4_NOISE = (("tau=5", 5.0), ("tau=25", 25.0))
_TABLE5_NOISE = (("tau=30", 30), ("tau=50", 50))
_TABLE6_VARIANTS = ("slope",)

_EXPERIMENT_NUMBER = {name: int(name[-1]) for name in EXPERIMENTS}


def variant_labels(experiment: str) -> tuple[str, ...]:
    """All variant labels an experiment can run, in stream-key order."""
    if experiment == "table2":
        return tuple(label for label, _, _ in _TABLE2_LAWS)
    if experiment == "table3":
        return tuple(label for label, _, _ in _TABLE3_LAWS)
    if experiment == "table4":
        return tuple(label for label, _ in _TABLE4_NOISE)
    if experiment == "table5":
        return tuple(label for label, _ in _TABLE5_NOISE)
    if experiment == "table6":
        return _TABLE6_VARIANTS
    raise ParameterError(
        f"unknown experiment {experiment!r}; expected one of {', '.join(EXPERIMENTS)}")


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one simulation experiment.

    ``variants`` restricts the run to a subset of :func:`variant_labels`;
    the default ``None`` runs them all.  Stream keys are derived from a
    variant's position in the full label tuple, so a restricted run
    reproduces exactly the rows the unrestricted run would produce for
    those variants.
    """

    experiment: str
    n_grid: tuple[int, ...] = DESK_GRID
    iterations: int = DESK_ITERATIONS
    replicates: int = DEFAULT_REPLICATES
    alpha: float = 0.05
    seed: int = 0
    variants: tuple[str, ...] | None = None

    def __post_init__(self):
        labels = variant_labels(self.experiment)  # validates the id
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid:
            raise ParameterError("n_grid must not be empty")
        for n in grid:
            # 4 is the smallest size every interval recipe here accepts.
            if n < 4:
                raise ParameterError(f"sample sizes must be at least 4, got {n}")
        if len(set(grid)) != len(grid):
            raise ParameterError(f"n_grid has repeated sizes: {grid}")
        if not (isinstance(self.iterations, (int, np.integer)) and self.iterations >= 1):
            raise ParameterError(
                f"iterations must be a positive integer, got {self.iterations!r}")
        if not (isinstance(self.replicates, (int, np.integer)) and self.replicates >= 1):
            raise ParameterError(
                f"replicates must be a positive integer, got {self.replicates!r}")
        check_alpha(self.alpha)
        if not (isinstance(self.seed, (int, np.integer)) and self.seed >= 0):
            raise ParameterError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.variants is not None:
            chosen = tuple(self.variants)
            object.__setattr__(self, "variants", chosen)
            unknown = [v for v in chosen if v not in labels]
            if unknown:
                raise ParameterError(
                    f"unknown variants for {self.experiment}: {unknown}; "
                    f"available: {', '.join(labels)}")
            if len(set(chosen)) != len(chosen):
                raise ParameterError(f"variants listed twice: {chosen}")

    def selected_variants(self) -> tuple[tuple[int, str], ...]:
        """(stream index, label) pairs this spec will actually run."""
        labels = variant_labels(self.experiment)
        if self.variants is None:
            return tuple(enumerate(labels))
        return tuple((labels.index(v), v) for v in self.variants)


def desk_spec(experiment: str, seed: int = 0, **overrides) -> ExperimentSpec:
    """Minutes-scale profile: M=200, B=500, n in {500, 2500}."""
    return ExperimentSpec(experiment=experiment, seed=seed, **overrides)


def full_spec(experiment: str, seed: int = 0, **overrides) -> ExperimentSpec:
    """Full-scale profile: M=1000, n in {500, 2500, 5000, 10000}."""
    overrides.setdefault("n_grid", FULL_GRID)
    overrides.setdefault("iterations", FULL_ITERATIONS)
    return ExperimentSpec(experiment=experiment, seed=seed, **overrides)


@dataclass(frozen=True)
class ReportRow:
    """Aggregated result for one (variant, n, estimator, method) cell.

    ``mean_lower``/``mean_upper``/``coverage``/``power`` are ``None`` for
    point-only rows (an estimator reported without an interval).
    """

    experiment: str
    variant: str
    n: int
    estimator: str
    method: str
    target: float
    mean_estimate: float
    mean_lower: float | None = None
    mean_upper: float | None = None
    coverage: float | None = None
    power: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.mean_estimate):
            raise ParameterError(f"mean estimate is not finite: {self.mean_estimate!r}")
        interval_fields = (self.mean_lower, self.mean_upper, self.coverage, self.power)
        present = [x is not None for x in interval_fields]
        if any(present) and not all(present):
            raise ParameterError("interval fields must be all present or all absent")
        if self.mean_lower is not None:
            if not (math.isfinite(self.mean_lower) and math.isfinite(self.mean_upper)):
                raise ParameterError("mean interval endpoints must be finite")
            if self.mean_lower > self.mean_upper:
                raise ParameterError(
                    f"mean lower {self.mean_lower} exceeds mean upper {self.mean_upper}")
            for name, value in (("coverage", self.coverage), ("power", self.power)):
                if not 0.0 <= value <= 1.0:
                    raise ParameterError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class ExperimentReport:
    """Everything a finished run knows, plus self-check tallies.

    ``range_checks_passed`` counts bootstrap distributions whose replicate
    spread stayed within the variance bound implied by their range (a
    sanity check that can only fail on a bookkeeping bug).
    ``wall_time`` is in seconds and is never written to report files, so
    emitted artifacts stay byte-identical across reruns.
    """

    spec: ExperimentSpec
    rows: tuple[ReportRow, ...]
    range_checks_passed: int
    range_checks_total: int
    streams_used: int
    wall_time: float = field(compare=False)


def empirical_coverage(intervals, target: float) -> float:
    """Fraction of intervals containing the target; endpoints count as in."""
    cis = list(intervals)
    if not cis:
        raise ParameterError("empirical coverage needs at least one interval")
    return sum(1 for ci in cis if ci.contains(target)) / len(cis)


def empirical_power(intervals, null_value: float = 0.0) -> float:
    """Fraction of intervals excluding the null value."""
    cis = list(intervals)
    if not cis:
        raise ParameterError("empirical power needs at least one interval")
    return sum(1 for ci in cis if ci.excludes(null_value)) / len(cis)


class _CellTally:
    """Per-iteration results for one (variant, n) cell, indexed by iteration.

    Point estimates and intervals are stored in slots, not appended, so
    aggregation cannot depend on the order iterations finished in.
    """

    def __init__(self, iterations: int):
        self.iterations = iterations
        self.points: dict[str, list] = {}
        self.intervals: dict[tuple[str, str], list] = {}

    def record_point(self, estimator: str, iteration: int, value: float) -> None:
        slots = self.points.setdefault(estimator, [None] * self.iterations)
        slots[iteration] = value

    def record_interval(self, estimator: str, method: str, iteration: int,
                        ci: IntervalEstimate) -> None:
        key = (estimator, method)
        slots = self.intervals.setdefault(key, [None] * self.iterations)
        slots[iteration] = ci

    def rows(self, experiment: str, variant: str, n: int, target: float,
             point_only: tuple[str, ...] = ()) -> list[ReportRow]:
        out = []
        for estimator in point_only:
            out.append(ReportRow(
                experiment=experiment, variant=variant, n=n,
                estimator=estimator, method="none", target=target,
                mean_estimate=float(np.mean(self.points[estimator]))))
        for (estimator, method), cis in self.intervals.items():
            out.append(ReportRow(
                experiment=experiment, variant=variant, n=n,
                estimator=estimator, method=method, target=target,
                mean_estimate=float(np.mean(self.points[estimator])),
                mean_lower=float(np.mean([ci.lower for ci in cis])),
                mean_upper=float(np.mean([ci.upper for ci in cis])),
                coverage=empirical_coverage(cis, target),
                power=empirical_power(cis, 0.0)))
        return out


class _RangeCheckCounter:
    def __init__(self, alpha: float):
        self.alpha = alpha
        self.passed = 0
        self.total = 0

    def check(self, dist) -> None:
        self.total += 1
        if popoviciu_check(dist, self.alpha):
            self.passed += 1


def _audited_streams(spec: ExperimentSpec) -> dict[tuple[int, int, int], RngStream]:
    """One stream per (variant index, n index, iteration), checked unique.

    The key tuple carries the experiment number as well, so streams stay
    distinct across experiments run under one base seed.
    """
    number = _EXPERIMENT_NUMBER[spec.experiment]
    streams: dict[tuple[int, int, int], RngStream] = {}
    for vi, _label in spec.selected_variants():
        for ni in range(len(spec.n_grid)):
            for it in range(spec.iterations):
                streams[(vi, ni, it)] = RngStream(spec.seed, (number, vi, ni, it))
    keys = [s.key for s in streams.values()]
    if len(set(keys)) != len(keys):  # cannot happen; guards future key edits
        raise ParameterError("internal stream keys collide; refusing to run")
    return streams


def _require(spec: ExperimentSpec, experiment: str) -> None:
    if spec.experiment != experiment:
        raise ParameterError(
            f"spec is for {spec.experiment!r}, runner expects {experiment!r}")


def run_table2(spec: ExperimentSpec) -> ExperimentReport:
    """Midrange for three truncated normal laws, three interval recipes.

    Per iteration: draw the sample, take the midrange, then build one
    full-size bootstrap (Hoeffding interval) and one sqrt(n)-out-of-n
    bootstrap shared by the subsampled Hoeffding and percentile
    intervals; both subsampled intervals read off the same replicates.
    """
    _require(spec, "table2")
    start = time.perf_counter()
    streams = _audited_streams(spec)
    checks = _RangeCheckCounter(spec.alpha)
    rows: list[ReportRow] = []
    for vi, label in spec.selected_variants():
        law, theta = next((l, t) for lab, l, t in _TABLE2_LAWS if lab == label)
        for ni, n in enumerate(spec.n_grid):
            tally = _CellTally(spec.iterations)
            for it in range(spec.iterations):
                stream = streams[(vi, ni, it)]
                values = sample_truncated_normal(law, n, stream.child(0))
                full = resample(
                    values, BootstrapConfig(spec.replicates, stream.child(1)), midrange)
                sub = resample(
                    values,
                    BootstrapConfig(spec.replicates, stream.child(2), resample_size="sqrt"),
                    midrange)
                checks.check(full)
                checks.check(sub)
                tally.record_point("midrange", it, full.statistic)
                tally.record_interval("midrange", "hoeffding", it,
                                      hoeffding_ci(full, spec.alpha))
                tally.record_interval("midrange", "hoeffding-m", it,
                                      hoeffding_ci(sub, spec.alpha))
                tally.record_interval("midrange", "percentile-m", it,
                                      percentile_ci(sub, spec.alpha))
            rows.extend(tally.rows(spec.experiment, label, n, theta))
    return ExperimentReport(
        spec=spec, rows=tuple(rows),
        range_checks_passed=checks.passed, range_checks_total=checks.total,
        streams_used=len(streams), wall_time=time.perf_counter() - start)


def run_table3(spec: ExperimentSpec) -> ExperimentReport:
    """Integer-rounded laws: distinct-value plug-in vs midrange.

    Both estimators get intervals from the doubled replicate range, in the
    concentrated form (the statistic of a bounded symmetric-support sample
    sits near the centre of its range) and the general form, each read off
    the same full-size bootstrap per estimator.
    """
    _require(spec, "table3")
    start = time.perf_counter()
    streams = _audited_streams(spec)
    checks = _RangeCheckCounter(spec.alpha)
    rows: list[ReportRow] = []
    for vi, label in spec.selected_variants():
        law, theta = next((l, t) for lab, l, t in _TABLE3_LAWS if lab == label)
        for ni, n in enumerate(spec.n_grid):
            tally = _CellTally(spec.iterations)
            for it in range(spec.iterations):
                stream = streams[(vi, ni, it)]
                draws = sample_truncated_normal(law, n, stream.child(0))
                values = round_to_integers(draws).astype(float)
                for ei, (estimator, fn) in enumerate(
                        (("plugin", discrete_plugin_average), ("midrange", midrange))):
                    dist = resample(
                        values,
                        BootstrapConfig(spec.replicates, stream.child(1 + ei)), fn)
                    checks.check(dist)
                    tally.record_point(estimator, it, dist.statistic)
                    tally.record_interval(estimator, "hoeffding-u", it,
                                          hoeffding_u_ci(dist, spec.alpha, centered=True))
                    tally.record_interval(estimator, "hoeffding-u2", it,
                                          hoeffding_u_ci(dist, spec.alpha, centered=False))
            rows.extend(tally.rows(spec.experiment, label, n, theta))
    return ExperimentReport(
        spec=spec, rows=tuple(rows),
        range_checks_passed=checks.passed, range_checks_total=checks.total,
        streams_used=len(streams), wall_time=time.perf_counter() - start)


def _draw_two_arm(
        n: int, stream: RngStream,
        noise_fn) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Confounded design shared by table4 and table5.

    A Bernoulli(.5) confounder shifts both the outcome and the treatment
    probability (.3 + .5 C).  The treatment vector alone is redrawn until
    both arms have at least 2 units; the confounder and noise draws stay
    fixed so the redraw cannot tilt the outcome law.
    """
    confounder = sample_bernoulli(BernoulliSpec(0.5), n, stream.child(0, 0))
    noise = noise_fn(n, stream.child(0, 1))
    probs = 0.3 + 0.5 * confounder
    attempt = 0
    while True:
        treated = sample_bernoulli_probs(probs, stream.child(0, 2, attempt))
        n_treated = int(treated.sum())
        if 2 <= n_treated <= n - 2:
            break
        attempt += 1
    return confounder, noise, treated


def _contrast_statistic(estimator_fn) -> Callable[[np.ndarray], float]:
    def statistic(rows: np.ndarray) -> float:
        arms = TwoArmSample.from_labels(rows[:, 0], rows[:, 1])
        return estimator_fn(arms.treated) - estimator_fn(arms.control)
    return statistic


def run_table4(spec: ExperimentSpec) -> ExperimentReport:
    """Confounded continuous outcome: midrange contrast vs naive slope.

    Outcomes are 100 + 10 T + 50 C + e with e truncated normal on
    [-50, 50]; the confounder C inflates the unadjusted regression slope
    to roughly 35 while the midrange contrast stays consistent for the
    true gap of 10.  Outcome and treatment rows are resampled jointly for
    the bootstrap interval.
    """
    _require(spec, "table4")
    start = time.perf_counter()
    streams = _audited_streams(spec)
    checks = _RangeCheckCounter(spec.alpha)
    delta = 10.0
    rows: list[ReportRow] = []
    mr_statistic = _contrast_statistic(midrange)
    for vi, label in spec.selected_variants():
        tau = next(t for lab, t in _TABLE4_NOISE if lab == label)
        noise_law = TruncatedNormalSpec(-50.0, 50.0, 0.0, tau)

        def noise_fn(n, child, law=noise_law):
            return sample_truncated_normal(law, n, child)

        for ni, n in enumerate(spec.n_grid):
            tally = _CellTally(spec.iterations)
            for it in range(spec.iterations):
                stream = streams[(vi, ni, it)]
                confounder, noise, treated = _draw_two_arm(n, stream, noise_fn)
                outcome = 100.0 + 10.0 * treated + 50.0 * confounder + noise
                design = DesignMatrix(
                    np.column_stack([np.ones(n), treated]), ("intercept", "t"))
                tally.record_point("ols", it, ols_fit(design, outcome).coefficient(1))
                paired = np.column_stack([outcome, treated])
                dist = resample(
                    paired, BootstrapConfig(spec.replicates, stream.child(1)),
                    mr_statistic)
                checks.check(dist)
                tally.record_point("midrange", it, dist.statistic)
                tally.record_interval("midrange", "hoeffding", it,
                                      hoeffding_ci(dist, spec.alpha))
            rows.extend(tally.rows(spec.experiment, label, n, delta,
                                   point_only=("ols",)))
    return ExperimentReport(
        spec=spec, rows=tuple(rows),
        range_checks_passed=checks.passed, range_checks_total=checks.total,
        streams_used=len(streams), wall_time=time.perf_counter() - start)


def run_table5(spec: ExperimentSpec) -> ExperimentReport:
    """Confounded integer outcome: plug-in and midrange contrasts.

    Outcomes are 10 C + e + 5 T with binomial(tau, 1/2) noise, so the
    support is a run of integers and the distinct-value plug-in applies.
    Intervals use the doubled replicate range as in table3.
    """
    _require(spec, "table5")
    start = time.perf_counter()
    streams = _audited_streams(spec)
    checks = _RangeCheckCounter(spec.alpha)
    delta = 5.0
    rows: list[ReportRow] = []
    statistics = (("plugin", _contrast_statistic(discrete_plugin_average)),
                  ("midrange", _contrast_statistic(midrange)))
    for vi, label in spec.selected_variants():
        tau = next(t for lab, t in _TABLE5_NOISE if lab == label)
        noise_law = BinomialSpec(tau, 0.5)

        def noise_fn(n, child, law=noise_law):
            return sample_binomial(law, n, child).astype(float)

        for ni, n in enumerate(spec.n_grid):
            tally = _CellTally(spec.iterations)
            for it in range(spec.iterations):
                stream = streams[(vi, ni, it)]
                confounder, noise, treated = _draw_two_arm(n, stream, noise_fn)
                outcome = 10.0 * confounder + noise + 5.0 * treated
                design = DesignMatrix(
                    np.column_stack([np.ones(n), treated]), ("intercept", "t"))
                tally.record_point("ols", it, ols_fit(design, outcome).coefficient(1))
                paired = np.column_stack([outcome, treated])
                for ei, (estimator, fn) in enumerate(statistics):
                    dist = resample(
                        paired,
                        BootstrapConfig(spec.replicates, stream.child(1 + ei)), fn)
                    checks.check(dist)
                    tally.record_point(estimator, it, dist.statistic)
                    tally.record_interval(estimator, "hoeffding-u", it,
                                          hoeffding_u_ci(dist, spec.alpha, centered=True))
                    tally.record_interval(estimator, "hoeffding-u2", it,
                                          hoeffding_u_ci(dist, spec.alpha, centered=False))
            rows.extend(tally.rows(spec.experiment, label, n, delta,
                                   point_only=("ols",)))
    return ExperimentReport(
        spec=spec, rows=tuple(rows),
        range_checks_passed=checks.passed, range_checks_total=checks.total,
        streams_used=len(streams), wall_time=time.perf_counter() - start)


def _slope_statistic(rows: np.ndarray) -> float:
    design = DesignMatrix(
        np.column_stack([np.ones(rows.shape[0]), rows[:, 1]]), ("intercept", "t"))
    return ols_fit(design, rows[:, 0]).coefficient(1)


def run_table6(spec: ExperimentSpec) -> ExperimentReport:
    """Slope intervals under a bounded symmetric error.

    Outcomes are 100 + 20 T + U with U truncated normal on [-10, 10], so
    the unadjusted slope targets 20.  Three intervals per fit: Student t,
    the residual-range concentration interval, and the bootstrap range
    interval from joint row resampling.
    """
    _require(spec, "table6")
    start = time.perf_counter()
    streams = _audited_streams(spec)
    checks = _RangeCheckCounter(spec.alpha)
    delta = 20.0
    error_law = TruncatedNormalSpec(-10.0, 10.0, 0.0, 2.0)
    rows: list[ReportRow] = []
    for vi, label in spec.selected_variants():
        for ni, n in enumerate(spec.n_grid):
            tally = _CellTally(spec.iterations)
            for it in range(spec.iterations):
                stream = streams[(vi, ni, it)]
                treated = sample_bernoulli(BernoulliSpec(0.3), n, stream.child(0, 0))
                noise = sample_truncated_normal(error_law, n, stream.child(0, 1))
                outcome = 100.0 + 20.0 * treated + noise
                design = DesignMatrix(
                    np.column_stack([np.ones(n), treated]), ("intercept", "t"))
                fit = ols_fit(design, outcome)
                tally.record_point("ols", it, fit.coefficient(1))
                tally.record_interval("ols", "t-dist", it, t_ci(fit, 1, spec.alpha))
                tally.record_interval("ols", "u-concentration", it,
                                      u_concentration_ci(fit, 1, spec.alpha))
                paired = np.column_stack([outcome, treated])
                dist = resample(
                    paired, BootstrapConfig(spec.replicates, stream.child(1)),
                    _slope_statistic)
                checks.check(dist)
                tally.record_interval("ols", "hoeffding", it,
                                      hoeffding_ci(dist, spec.alpha))
            rows.extend(tally.rows(spec.experiment, label, n, delta))
    return ExperimentReport(
        spec=spec, rows=tuple(rows),
        range_checks_passed=checks.passed, range_checks_total=checks.total,
        streams_used=len(streams), wall_time=time.perf_counter() - start)


_RUNNERS = {
    "table2": run_table2,
    "table3": run_table3,
    "table4": run_table4,
    "table5": run_table5,
    "table6": run_table6,
}


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Dispatch a spec to its runner."""
    return _RUNNERS[spec.experiment](spec)


# Emission.  CSV carries exact shortest-round-trip floats so a report can
# be re-ingested losslessly; the text table rounds for reading.

CSV_COLUMNS = ("experiment", "variant", "n", "estimator", "method", "target",
               "mean_estimate", "mean_lower", "mean_upper", "coverage", "power")


def _csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow([_csv_value(getattr(row, name)) for name in CSV_COLUMNS])
    return buf.getvalue()


def report_text(report: ExperimentReport) -> str:
    """Aligned table plus the run's parameters and self-check tallies.

    Deliberately excludes wall time: the text file is part of the
    byte-for-byte reproducibility contract.
    """
    header = ("variant", "n", "estimator", "method", "estimate",
              "interval", "EC", "EP")
    lines = [header]
    for row in report.rows:
        if row.mean_lower is None:
            interval, ec, ep = "", "", ""
        else:
            interval = f"({row.mean_lower:.2f}, {row.mean_upper:.2f})"
            ec = f"{row.coverage:.3f}"
            ep = f"{row.power:.3f}"
        lines.append((row.variant, str(row.n), row.estimator, row.method,
                      f"{row.mean_estimate:.3f}", interval, ec, ep))
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    rendered = []
    for line in lines:
        rendered.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
    rendered.insert(1, "  ".join("-" * w for w in widths))
    spec = report.spec
    rendered.append("")
    rendered.append(f"experiment={spec.experiment}  iterations={spec.iterations}  "
                    f"replicates={spec.replicates}  alpha={spec.alpha}  seed={spec.seed}")
    rendered.append(f"independent streams: {report.streams_used}")
    rendered.append(f"replicate-spread self-checks passed: "
                    f"{report.range_checks_passed} of {report.range_checks_total}")
    return "\n".join(rendered) + "\n"


def write_report(report: ExperimentReport, prefix: str) -> tuple[str, str]:
    """Write ``{prefix}.csv`` and ``{prefix}.txt``; returns both paths."""
    csv_path = f"{prefix}.csv"
    text_path = f"{prefix}.txt"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report_csv(report))
    with open(text_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report_text(report))
    return csv_path, text_path


def read_report_csv(path: str) -> tuple[ReportRow, ...]:
    """Parse a report CSV written by :func:`write_report` back into rows.

    Floats are emitted in shortest round-trip form, so the rows read back
    compare equal to the ones the report was written from.
    """
    from .errors import CsvParseError, SchemaError

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a report header") from None
        if tuple(header) != CSV_COLUMNS:
            raise SchemaError(f"{path}: header {header!r} is not a report header")
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if len(record) != len(CSV_COLUMNS):
                raise CsvParseError(lineno, "", f"expected {len(CSV_COLUMNS)} fields, "
                                               f"got {len(record)}")
            raw = dict(zip(CSV_COLUMNS, record))
            try:
                rows.append(ReportRow(
                    experiment=raw["experiment"], variant=raw["variant"],
                    n=int(raw["n"]), estimator=raw["estimator"],
                    method=raw["method"], target=float(raw["target"]),
                    mean_estimate=float(raw["mean_estimate"]),
                    mean_lower=float(raw["mean_lower"]) if raw["mean_lower"] else None,
                    mean_upper=float(raw["mean_upper"]) if raw["mean_upper"] else None,
                    coverage=float(raw["coverage"]) if raw["coverage"] else None,
                    power=float(raw["power"]) if raw["power"] else None))
            except ValueError as exc:
                raise CsvParseError(lineno, "", str(exc)) from None
    return tuple(rows)
