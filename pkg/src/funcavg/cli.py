"""Command-line front end: CSV in, estimates, diagnostics, simulations out.

Three subcommands:

* ``estimate``: treatment-contrast estimates from a CSV file, one row of
  output per requested method (LR, MR, S, PS, Av).
* ``simulate``: run one of the five benchmark experiments and emit its
  report.
* ``diagnose``: per-group distribution shape numbers and, when a model
  is given, the residual support-symmetry report.

Exit codes are a stable contract: 0 on success, 2 for usage errors
(unknown flags, bad table ids, unknown method names), 1 when the data or
a numerical procedure is at fault.  The active seed is echoed to stderr
on every run; the ``FUNCAVG_SEED`` environment variable supplies a
default, and an explicit ``--seed`` beats it.
"""

from __future__ import annotations

import csv
import os
import sys

import click
import numpy as np

from .bootstrap import BootstrapConfig, hoeffding_ci, resample
from .dataset import Dataset
from .diagnostics import ecdf, mean_midrange_distance, residual_support_symmetry, sum_symmetry_gap
from .errors import CsvParseError, DataError, FuncavgError, SchemaError
from .estimators import TwoArmSample, midrange
from .formula import ModelSpec, Term
from .intervals import IntervalEstimate
from .regression import (
    build_design,
    ols_fit,
    ps_stratified_contrast,
    standardization_bootstrap_se,
    standardization_contrast,
    t_ci,
)
from .rng import RngStream
from .simharness import (
    DEFAULT_REPLICATES,
    DESK_GRID,
    DESK_ITERATIONS,
    FULL_GRID,
    FULL_ITERATIONS,
    ExperimentSpec,
    report_text,
    run_experiment,
    write_report,
)

_MISSING_MARKERS = {"", "na", "nan"}
METHOD_NAMES = ("LR", "MR", "S", "PS", "Av")


def ingest_csv(path: str, columns=None) -> tuple[Dataset, int]:
    """Read a CSV with a header row into a Dataset of float columns.

    Only the referenced ``columns`` are parsed (all columns when None).
    Rows with a missing value (empty cell, NA, NaN) in any referenced
    column are dropped; the count of dropped rows is returned alongside
    the data.  Non-numeric text in a referenced column is an error, not a
    missing value, so typos fail loudly instead of shrinking the sample.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [name.strip() for name in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: file is empty, expected a header row") from None
        if len(set(header)) != len(header):
            raise SchemaError(f"{path}: duplicate column names in header: {header}")
        wanted = list(columns) if columns is not None else list(header)
        missing = [c for c in wanted if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: no column named {', '.join(repr(c) for c in missing)}; "
                f"available: {', '.join(header)}")
        positions = [header.index(c) for c in wanted]
        kept: list[list[float]] = []
        dropped = 0
        for lineno, record in enumerate(reader, start=2):
            if len(record) != len(header):
                raise CsvParseError(lineno, "", f"expected {len(header)} fields, "
                                                f"got {len(record)}")
            parsed = []
            for name, pos in zip(wanted, positions):
                cell = record[pos].strip()
                if cell.lower() in _MISSING_MARKERS:
                    parsed = None
                    break
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise CsvParseError(lineno, name,
                                        f"cannot parse {cell!r} as a number") from None
            if parsed is None:
                dropped += 1
            else:
                kept.append(parsed)
    if not kept:
        raise DataError(f"{path}: no complete rows for columns {', '.join(wanted)}")
    matrix = np.array(kept, dtype=float)
    data = Dataset({name: matrix[:, j] for j, name in enumerate(wanted)})
    return data, dropped


def center_continuous(data: Dataset, names) -> tuple[Dataset, list[str]]:
    """Mean-center the named columns that take more than two values.

    Binary indicator columns are left alone so their coefficients keep
    their group-contrast reading.
    """
    centered = []
    for name in names:
        col = data.column(name)
        if np.unique(col).size > 2:
            data = data.with_column(name, col - col.mean())
            centered.append(name)
    return data, centered


def _resolve_seed(flag_value) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get("FUNCAVG_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise click.UsageError(
                f"FUNCAVG_SEED must be an integer, got {env!r}") from None
    return 0


def _normalize_methods(ctx, param, values):
    canon = {name.lower(): name for name in METHOD_NAMES}
    if not values:
        return ("Av",)
    out = []
    for value in values:
        try:
            out.append(canon[value.lower()])
        except KeyError:
            raise click.UsageError(
                f"unknown method {value!r}; choose from {', '.join(METHOD_NAMES)}")
    return tuple(out)


@click.group()
def main():
    """Functional average estimation toolkit."""


def _fail(exc: FuncavgError) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


def _estimate_rows(data: Dataset, outcome: str, treatment: str, covariates,
                   methods, alpha: float, replicates: int,
                   seed: int) -> list[tuple[str, str, IntervalEstimate]]:
    """One (parameter, method, interval) triple per requested method.

    Bootstrap-based methods draw from disjoint child streams of the run
    seed keyed by the method's position in the canonical method tuple,
    so adding one method to a run never shifts another method's numbers.
    """
    parameter = f"{outcome}: {treatment}=1 vs {treatment}=0"
    base = RngStream(seed)
    rows = []
    for method in methods:
        stream = base.child(METHOD_NAMES.index(method))
        if method == "LR":
            design, y = build_design(data, ModelSpec(outcome, (Term((treatment,)),)))
            ci = t_ci(ols_fit(design, y), treatment, alpha)
        elif method == "MR":
            if not covariates:
                raise click.UsageError("method MR needs --covariates")
            model = ModelSpec(outcome, (Term((treatment,)),)
                              + tuple(Term((c,)) for c in covariates))
            design, y = build_design(data, model)
            ci = t_ci(ols_fit(design, y), treatment, alpha)
        elif method == "S":
            if not covariates:
                raise click.UsageError("method S needs --covariates")
            model = ModelSpec(outcome, (Term((treatment,)),)
                              + tuple(Term((c,)) for c in covariates))
            ci = standardization_bootstrap_se(
                data, model, treatment, stream, replicates=replicates, alpha=alpha)
        elif method == "PS":
            if not covariates:
                raise click.UsageError("method PS needs --covariates")
            ci = ps_stratified_contrast(
                data, outcome, treatment, covariates, stream,
                replicates=replicates, alpha=alpha)
        else:  # Av
            values = data.column(outcome)
            labels = data.column(treatment)
            TwoArmSample.from_labels(values, labels)  # validates the arms
            paired = np.column_stack([values, labels])

            def contrast(rows_: np.ndarray) -> float:
                arms = TwoArmSample.from_labels(rows_[:, 0], rows_[:, 1])
                return midrange(arms.treated) - midrange(arms.control)

            dist = resample(paired, BootstrapConfig(replicates, stream), contrast)
            ci = hoeffding_ci(dist, alpha)
        rows.append((parameter, method, ci))
    return rows


def _estimate_text(rows, alpha: float) -> str:
    header = ("parameter", "method", "estimate", f"{100 * (1 - alpha):g}% interval")
    lines = [header]
    for parameter, method, ci in rows:
        lines.append((parameter, method, f"{ci.point:.4f}",
                      f"({ci.lower:.4f}, {ci.upper:.4f})"))
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    out = ["  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip()
           for line in lines]
    out.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def _estimate_csv(rows) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("parameter", "method", "estimate", "lower", "upper",
                     "alpha", "interval_method"))
    for parameter, method, ci in rows:
        writer.writerow((parameter, method, repr(ci.point), repr(ci.lower),
                         repr(ci.upper), repr(ci.alpha), ci.method))
    return buf.getvalue()


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--outcome", required=True, help="Outcome column name.")
@click.option("--treatment", required=True, help="Binary treatment column name.")
@click.option("--covariates", default="", help="Comma-separated covariate columns.")
@click.option("--method", "methods", multiple=True, callback=_normalize_methods,
              help="LR, MR, S, PS, or Av; repeatable. Default Av.")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--b", "replicates", type=int, default=DEFAULT_REPLICATES,
              show_default=True, help="Bootstrap replicates for S, PS, Av.")
@click.option("--center", is_flag=True,
              help="Mean-center continuous covariates first.")
@click.option("--seed", type=int, default=None, help="Base seed (default 0 "
              "or FUNCAVG_SEED).")
@click.option("--out", default=None, help="Prefix: write {out}.csv and {out}.txt.")
def estimate(input_path, outcome, treatment, covariates, methods, alpha,
             replicates, center, seed, out):
    """Estimate the treatment contrast in INPUT_PATH by each method."""
    seed = _resolve_seed(seed)
    click.echo(f"seed: {seed}", err=True)
    covariate_names = tuple(c.strip() for c in covariates.split(",") if c.strip())
    referenced = dict.fromkeys((outcome, treatment) + covariate_names)
    try:
        data, dropped = ingest_csv(input_path, tuple(referenced))
        if dropped:
            click.echo(f"dropped {dropped} incomplete rows", err=True)
        if center:
            data, centered = center_continuous(data, covariate_names)
            if centered:
                click.echo(f"centered: {', '.join(centered)}", err=True)
        rows = _estimate_rows(data, outcome, treatment, covariate_names,
                              methods, alpha, replicates, seed)
    except FuncavgError as exc:
        _fail(exc)
    text = _estimate_text(rows, alpha)
    if out is not None:
        with open(f"{out}.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write(_estimate_csv(rows))
        with open(f"{out}.txt", "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    click.echo(text, nl=False)


@main.command()
@click.option("--table", type=click.IntRange(2, 6), required=True,
              help="Which benchmark experiment to run (2 to 6).")
@click.option("--m-iterations", "--m", "iterations", type=int, default=None,
              help=f"Monte Carlo iterations (default {DESK_ITERATIONS}, "
                   f"{FULL_ITERATIONS} with --full).")
@click.option("--b", "replicates", type=int, default=DEFAULT_REPLICATES,
              show_default=True, help="Bootstrap replicates per iteration.")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--full", is_flag=True,
              help=f"Full-scale profile: sample sizes {FULL_GRID}, "
                   f"M={FULL_ITERATIONS}.")
@click.option("--seed", type=int, default=None, help="Base seed (default 0 "
              "or FUNCAVG_SEED).")
@click.option("--out", default=None, help="Prefix: write {out}.csv and {out}.txt.")
def simulate(table, iterations, replicates, alpha, full, seed, out):
    """Run one benchmark experiment and emit its report."""
    seed = _resolve_seed(seed)
    click.echo(f"seed: {seed}", err=True)
    if iterations is None:
        iterations = FULL_ITERATIONS if full else DESK_ITERATIONS
    try:
        spec = ExperimentSpec(
            experiment=f"table{table}",
            n_grid=FULL_GRID if full else DESK_GRID,
            iterations=iterations, replicates=replicates,
            alpha=alpha, seed=seed)
        report = run_experiment(spec)
    except FuncavgError as exc:
        _fail(exc)
    if out is not None:
        csv_path, text_path = write_report(report, out)
        click.echo(f"wrote {csv_path} and {text_path}", err=True)
    click.echo(report_text(report), nl=False)


def _group_label(value: float) -> str:
    return f"{value:g}"


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--treatment", required=True,
              help="Grouping column; one report row per distinct value.")
@click.option("--outcome", required=True,
              help="Outcome column the per-group numbers describe.")
@click.option("--covariates", default="",
              help="If given, also fit outcome ~ treatment + covariates and "
                   "report residual support symmetry.")
@click.option("--center", is_flag=True,
              help="Mean-center continuous covariates before the fit.")
@click.option("--out", default=None,
              help="Prefix: write {out}.txt and {out}_ecdf_{group}.csv files.")
def diagnose(input_path, treatment, outcome, covariates, center, out):
    """Shape diagnostics per treatment group of INPUT_PATH."""
    covariate_names = tuple(c.strip() for c in covariates.split(",") if c.strip())
    referenced = dict.fromkeys((outcome, treatment) + covariate_names)
    try:
        data, dropped = ingest_csv(input_path, tuple(referenced))
        if dropped:
            click.echo(f"dropped {dropped} incomplete rows", err=True)
        if center:
            data, _ = center_continuous(data, covariate_names)
        values = data.column(outcome)
        groups = data.column(treatment)
        distinct = np.unique(groups)
        if distinct.size > 10:
            raise DataError(f"column {treatment!r} has {distinct.size} distinct "
                            "values; too many to group by")
        lines = [("group", "n", "gap", "gap/range", "mean-midrange",
                  "area-below", "area-above")]
        curves = {}
        for g in distinct:
            sample = values[groups == g]
            label = _group_label(g)
            if sample.size < 2 or sample.min() == sample.max():
                click.echo(f"warning: group {treatment}={label} has no spread; "
                           "skipped", err=True)
                continue
            curve = ecdf(sample)
            curves[label] = curve
            lines.append((label, str(sample.size),
                          f"{sum_symmetry_gap(sample):.4f}",
                          f"{sum_symmetry_gap(sample, normalized=True):.4f}",
                          f"{mean_midrange_distance(sample):.4f}",
                          f"{curve.area_below():.4f}",
                          f"{curve.area_above():.4f}"))
        widths = [max(len(line[i]) for line in lines) for i in range(len(lines[0]))]
        rendered = ["  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip()
                    for line in lines]
        rendered.insert(1, "  ".join("-" * w for w in widths))
        if covariate_names:
            model = ModelSpec(outcome, (Term((treatment,)),)
                              + tuple(Term((c,)) for c in covariate_names))
            design, y = build_design(data, model)
            fit = ols_fit(design, y)
            sym = residual_support_symmetry(fit)
            rendered.append("")
            rendered.append(f"residual support: max {sym.max_residual:.4f}  "
                            f"min {sym.min_residual:.4f}  "
                            f"asymmetry {sym.asymmetry:.4f}")
        text = "\n".join(rendered) + "\n"
    except FuncavgError as exc:
        _fail(exc)
    if out is not None:
        with open(f"{out}.txt", "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        for label, curve in curves.items():
            with open(f"{out}_ecdf_{label}.csv", "w", encoding="utf-8",
                      newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(("value", "cumulative_fraction"))
                for v, h in zip(curve.values, curve.heights):
                    writer.writerow((repr(float(v)), repr(float(h))))
    click.echo(text, nl=False)


if __name__ == "__main__":
    main()
