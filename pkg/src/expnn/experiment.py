"""Scale sweeps: run an operator over a list of scales and record errors and bounds."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import registry
from .analysis import (BoundReport, RateFit, bound_theorem2, bound_theorem3,
                       bound_theorem4, bound_theorem6, fit_rate)
from .density import make_kernel
from .errors import DomainError, FitError, InvalidConfigError, UnknownNameError
from .operators import (FAMILIES, OperatorConfig, classical_eval, log_grid, nn_eval,
                        nn_eval_multi_grid, quasi_eval)
from .sigmoids import ConditionReport, check_conditions, get_sigmoid

CSV_HEADER = ("n", "sup_error", "mean_error", "bound_t3", "bound_t4", "bound_t6",
              "satisfied")
DEFAULT_WINDOW = (0.5, 2.0)


@dataclass
class ExperimentConfig:
    kernel_name: str = "tanh"
    operator_family: str = "E_n"
    function_name: str = "sinlog"
    interval: Optional[tuple] = None
    scales: tuple = (10, 30, 100, 300, 1000)
    nu: float = 0.5
    grid_points: int = 501
    truncation_K: Optional[int] = None
    output_dir: str = "expnn-out"
    seed: int = 0
    random_points: int = 0
    figures: bool = True

    def validate(self):
        if self.operator_family not in FAMILIES:
            raise UnknownNameError(
                f"unknown operator {self.operator_family!r}; known: {', '.join(FAMILIES)}")
        scales = list(self.scales)
        if not scales or any(b <= a for a, b in zip(scales, scales[1:])):
            raise InvalidConfigError("scales must be non-empty and strictly increasing")
        if any(s <= 0 for s in scales):
            raise InvalidConfigError("scales must be positive")
        if self.interval is not None:
            a, b = self.interval
            if not 0 < a < b:
                raise InvalidConfigError(f"interval needs 0 < a < b, got {self.interval}")
        if not 0 < self.nu < 1:
            raise InvalidConfigError("nu must lie in (0, 1)")
        if self.grid_points < 2:
            raise InvalidConfigError("grid_points must be at least 2")
        if self.truncation_K is not None and self.truncation_K < 1:
            raise InvalidConfigError("truncation_K must be positive")
        return self


@dataclass
class ScaleRow:
    n: float
    sup_error: float
    mean_error: float
    bound_t3: float = math.nan
    bound_t4: float = math.nan
    bound_t6: float = math.nan
    reports: list = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return all(r.satisfied for r in self.reports)


@dataclass
class SweepResult:
    config: ExperimentConfig
    per_scale: list
    rate: Optional[RateFit]
    condition_report: ConditionReport
    grid: np.ndarray = field(repr=False)
    profiles: dict = field(repr=False, default_factory=dict)

    @property
    def bound_reports(self) -> list[BoundReport]:
        return [r for row in self.per_scale for r in row.reports]

    @property
    def all_satisfied(self) -> bool:
        return all(row.satisfied for row in self.per_scale)


def worker_count() -> int:
    """Thread cap from ``EXPNN_THREADS`` (0 or unset: one per CPU)."""
    raw = os.environ.get("EXPNN_THREADS", "0").strip() or "0"
    n = int(raw)
    return n if n > 0 else (os.cpu_count() or 1)


def _resolve(cfg):
    sigmoid = get_sigmoid(cfg.kernel_name)
    report = check_conditions(sigmoid, 10.0, 1000)
    kernel = make_kernel(sigmoid)
    f = registry.get(cfg.function_name).handle
    family = cfg.operator_family
    if family == "E_n_multivariate":
        if cfg.interval is not None:
            f = f.with_domain(tuple(tuple(cfg.interval) for _ in range(f.dimension)))
    else:
        if f.dimension != 1:
            raise DomainError(f"{f.name} is {f.dimension}-dimensional; use E_n_multivariate")
        if cfg.interval is not None:
            f = f.with_domain(*cfg.interval)
        elif family in ("Q_n", "S_w"):
            f = f.with_domain(*DEFAULT_WINDOW)
    return report, kernel, f


def _eval_grid(cfg, f):
    if f.dimension > 1:
        per_axis = cfg.grid_points if f.dimension <= 2 else min(cfg.grid_points, 41)
        return [log_grid(a, b, per_axis) for a, b in f.box]
    a, b = f.interval
    x = log_grid(a, b, cfg.grid_points)
    if cfg.random_points:
        rng = np.random.default_rng(cfg.seed)
        extra = np.exp(rng.uniform(math.log(a), math.log(b), cfg.random_points))
        x = np.unique(np.concatenate([x, extra]))
    return x


def _one_scale(cfg, kernel, f, grid, n):
    family = cfg.operator_family
    op = OperatorConfig(family, kernel, n, cfg.truncation_K, f.dimension)
    if family == "E_n_multivariate":
        approx = nn_eval_multi_grid(op, f, grid)
        mesh = np.stack(np.meshgrid(*grid, indexing="ij"), axis=-1)
        truth = f.eval(mesh)
    else:
        evaluator = {"E_n": nn_eval, "Q_n": quasi_eval, "S_w": classical_eval}[family]
        approx = evaluator(op, f, grid)
        truth = f.eval(grid)
    err = np.abs(approx - truth)
    row = ScaleRow(n, float(err.max()), float(err.mean()))

    tanh = kernel.sigmoid.name == "tanh"
    nu = cfg.nu
    if family == "E_n":
        if tanh and f.has("continuous"):
            rep = bound_theorem3(f, int(n), nu, kernel=kernel, measured=row.sup_error)
            row.bound_t3 = rep.bound
            row.reports.append(rep)
        if tanh and f.has("C2"):
            rep = bound_theorem4(f, int(n), nu, kernel=kernel, measured=row.sup_error)
            row.bound_t4 = rep.bound
            row.reports.append(rep)
        if f.holder is not None:
            row.reports.append(bound_theorem2(f, kernel, int(n), measured=row.sup_error))
    elif family == "Q_n" and tanh and f.has("continuous"):
        rep = bound_theorem6(f, int(n), nu, kernel=kernel, window=f.interval,
                             K=cfg.truncation_K, measured=row.sup_error)
        row.bound_t6 = rep.bound
        row.reports.append(rep)
    return row, err


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> SweepResult:
    """Sweep the configured operator over ``cfg.scales``.

    With ``write`` the CSV files, gnuplot script, summary and (optionally)
    figures are written to ``cfg.output_dir``.
    """
    cfg.validate()
    report, kernel, f = _resolve(cfg)
    grid = _eval_grid(cfg, f)
    with ThreadPoolExecutor(max_workers=min(worker_count(), len(cfg.scales))) as pool:
        outcomes = list(pool.map(lambda n: _one_scale(cfg, kernel, f, grid, n), cfg.scales))
    rows = [row for row, _ in outcomes]
    profiles = {row.n: err for row, err in outcomes}
    try:
        rate = fit_rate({row.n: row.sup_error for row in rows})
    except FitError:
        rate = None
    result = SweepResult(cfg, rows, rate, report, grid, profiles)
    if write:
        write_outputs(result, cfg.output_dir)
    return result


def _fmt(v) -> str:
    return "%.17g" % v


def emit_csv(result: SweepResult, path) -> None:
    """``results.csv``: one row per scale, 17 significant digits, ``nan`` for absent bounds."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in result.per_scale:
            w.writerow([_fmt(row.n), _fmt(row.sup_error), _fmt(row.mean_error),
                        _fmt(row.bound_t3), _fmt(row.bound_t4), _fmt(row.bound_t6),
                        "true" if row.satisfied else "false"])


def emit_bounds_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("theorem", "n", "nu", "bound", "measured_sup_error", "satisfied"))
        for r in result.bound_reports:
            w.writerow([r.theorem, _fmt(r.n), _fmt(r.nu), _fmt(r.bound),
                        _fmt(r.measured_sup_error), "true" if r.satisfied else "false"])


def gnuplot_script(result: SweepResult) -> str:
    cfg = result.config
    title = f"{cfg.operator_family} / {cfg.kernel_name} / {cfg.function_name}"
    lines = [
        "# columns of results.csv: 1 n, 2 sup_error, 3 mean_error,",
        "# 4 bound_t3, 5 bound_t4, 6 bound_t6, 7 satisfied",
        "set datafile separator ','",
        "set datafile missing 'nan'",
        "set terminal pngcairo size 900,600",
        "set output 'convergence_gnuplot.png'",
        "set logscale xy",
        "set format y '10^{%L}'",
        "set xlabel 'n'",
        "set ylabel 'error'",
        f"set title '{title}'",
        "set key outside right",
        "plot 'results.csv' every ::1 using 1:2 with linespoints title 'sup error', \\",
        "     '' every ::1 using 1:3 with linespoints title 'mean error', \\",
        "     '' every ::1 using 1:4 with lines dashtype 2 title 'bound T3', \\",
        "     '' every ::1 using 1:5 with lines dashtype 3 title 'bound T4', \\",
        "     '' every ::1 using 1:6 with lines dashtype 4 title 'bound T6'",
    ]
    return "\n".join(lines) + "\n"


def summary_text(result: SweepResult) -> str:
    cfg = result.config
    cr = result.condition_report
    out = ["expnn sweep summary", ""]
    for fld in fields(cfg):
        out.append(f"{fld.name} = {getattr(cfg, fld.name)}")
    out += ["", "sigmoid conditions:",
            f"  concavity (C2): {cr.condition_1_c2_concave}",
            f"  left-tail decay: {cr.condition_2_decay} (slope {cr.decay_slope:.4g})",
            f"  odd symmetry: {cr.condition_3_odd_symmetry} "
            f"(max deviation {cr.symmetry_deviation:.3g})",
            "", f"{'n':>8} {'sup_error':>12} {'mean_error':>12}  bounds"]
    for row in result.per_scale:
        marks = " ".join(f"{r.theorem}={'ok' if r.satisfied else 'VIOLATED'}"
                         for r in row.reports) or "-"
        out.append(f"{row.n:>8g} {row.sup_error:>12.4e} {row.mean_error:>12.4e}  {marks}")
    out.append("")
    if result.rate is not None:
        out.append(f"rate fit: slope {result.rate.slope:.4f}, "
                   f"r^2 {result.rate.r_squared:.4f}")
    else:
        out.append("rate fit: not available (need 4 positive errors over a decade)")
    checked = len(result.bound_reports)
    failed = sum(not r.satisfied for r in result.bound_reports)
    out.append(f"bound checks: {checked - failed}/{checked} satisfied")
    return "\n".join(out) + "\n"


def write_outputs(result: SweepResult, output_dir) -> Path:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(result, out / "results.csv")
    emit_bounds_csv(result, out / "bounds.csv")
    (out / "plot.gp").write_text(gnuplot_script(result), newline="\n")
    (out / "summary.txt").write_text(summary_text(result), newline="\n")
    if result.config.figures:
        from .plotting import render_figures
        render_figures(result, out)
    return out
