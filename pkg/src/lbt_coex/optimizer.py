"""Graceful-coexistence check and linear search for the best cellular CW."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

from .airtime import analyze
from .config import CoexConfig, validate
from .parallel import ordered_map

Z_MIN = 2
Z_MAX = 64
Z_DEFAULT = 16

TRACE_COLUMNS = ("q_w", "q_c", "z", "s_co_w_bps", "s_co_c_bps", "s_only_w_bps",
                 "constraint_met", "s_total_bps")
GRID_COLUMNS = ("q_w", "q_c", "z_star", "feasible", "s_total_bps", "improvement")
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ZTrace:
    Z: int
    S_co_W: float
    S_co_C: float
    S_only_W: float
    constraint_met: bool
    S_total: float
    converged: bool = True
    tau_W: float = 0.0
    tau_C: float = 0.0
    residual: float = 0.0


@dataclass(frozen=True)
class OptimalCwResult:
    q_W: float
    q_C: float
    z_star: int | None
    feasible: bool
    per_z_trace: tuple[ZTrace, ...]
    baseline: float

    @property
    def best(self) -> ZTrace | None:
        if self.z_star is None:
            return None
        return next(t for t in self.per_z_trace if t.Z == self.z_star)


@dataclass(frozen=True)
class SweepCell:
    q_W: float
    q_C: float
    result: OptimalCwResult
    S_total_default: float
    improvement: float | None


@dataclass(frozen=True)
class SweepGrid:
    q_W_values: tuple[float, ...]
    q_C_values: tuple[float, ...]
    cells: tuple[SweepCell, ...] = field(repr=False)
    z_default: int = Z_DEFAULT

    def cell(self, q_W: float, q_C: float) -> SweepCell:
        i = self.q_W_values.index(q_W)
        j = self.q_C_values.index(q_C)
        return self.cells[i * len(self.q_C_values) + j]

    def z_star_table(self) -> list[list[int | None]]:
        n = len(self.q_C_values)
        return [[c.result.z_star for c in self.cells[i * n:(i + 1) * n]]
                for i in range(len(self.q_W_values))]

    def mean_improvement(self) -> float | None:
        vals = [c.improvement for c in self.cells if c.improvement is not None]
        return sum(vals) / len(vals) if vals else None


def wifi_only_baseline(q_W: float, n: int, config: CoexConfig) -> float:
    """Per-AP throughput (bits/s) of ``n`` identical Wi-Fi APs at traffic ``q_W``."""
    if n < 1:
        raise ValueError("baseline needs at least one AP")
    only = config.replace(n_W=n, n_C=0, q_W=q_W)
    fp, rep = analyze(only)
    if not fp.converged:
        raise RuntimeError(f"Wi-Fi-only fixed point did not converge (residual {fp.residual_inf_norm:.3e})")
    return rep.S_W


def evaluate_z(config: CoexConfig, Z: int, baseline: float) -> ZTrace:
    fp, rep = analyze(config.replace(Z=Z))
    met = fp.converged and min(rep.S_W, rep.S_C) > baseline
    return ZTrace(Z=Z, S_co_W=rep.S_W, S_co_C=rep.S_C, S_only_W=baseline,
                  constraint_met=bool(met), S_total=rep.S_total, converged=fp.converged,
                  tau_W=fp.tau_W, tau_C=fp.tau_C, residual=fp.residual_inf_norm)


def optimal_cw(config: CoexConfig, z_min: int = Z_MIN, z_max: int = Z_MAX, *,
               workers: int | None = 1) -> OptimalCwResult:
    """Smallest Z in [z_min, z_max] maximizing S_total with every node above the baseline.

    The baseline is the per-AP throughput when all n_W + n_C nodes are Wi-Fi
    APs at traffic q_W. ``feasible`` is False when no Z meets it.
    """
    validate(config)
    if not 2 <= z_min <= z_max:
        raise ValueError(f"need 2 <= z_min <= z_max, got [{z_min}, {z_max}]")
    baseline = wifi_only_baseline(config.q_W, config.n_W + config.n_C, config)
    trace = tuple(ordered_map(partial(evaluate_z, config, baseline=baseline),
                              range(z_min, z_max + 1), workers=workers))
    best: ZTrace | None = None
    for t in trace:
        if t.constraint_met and (best is None or t.S_total > best.S_total):
            best = t
    return OptimalCwResult(q_W=config.q_W, q_C=config.q_C,
                           z_star=best.Z if best else None, feasible=best is not None,
                           per_z_trace=trace, baseline=baseline)


def optimize_cell(config: CoexConfig, z_min: int = Z_MIN, z_max: int = Z_MAX,
                  z_default: int = Z_DEFAULT) -> SweepCell:
    """``optimal_cw`` plus the improvement over ``z_default``."""
    res = optimal_cw(config, z_min, z_max, workers=1)
    ref = next((t for t in res.per_z_trace if t.Z == z_default), None)
    S_ref = ref.S_total if ref is not None else analyze(config.replace(Z=z_default))[1].S_total
    improvement = res.best.S_total / S_ref - 1.0 if res.feasible else None
    return SweepCell(q_W=config.q_W, q_C=config.q_C, result=res,
                     S_total_default=S_ref, improvement=improvement)


def _cell_job(args) -> SweepCell:
    return optimize_cell(*args)


def sweep(q_W_values, q_C_values, config: CoexConfig, z_min: int = Z_MIN,
          z_max: int = Z_MAX, *, z_default: int = Z_DEFAULT,
          workers: int | None = None) -> SweepGrid:
    """Optimal CW for every (q_W, q_C) cell, in row-major (q_W, q_C) order.

    ``improvement`` is S_total at Z* relative to S_total at ``z_default``.
    """
    q_W_values = tuple(float(v) for v in q_W_values)
    q_C_values = tuple(float(v) for v in q_C_values)
    if not q_W_values or not q_C_values:
        raise ValueError("sweep grids must be nonempty")
    jobs = [(config.replace(q_W=a, q_C=b), z_min, z_max, z_default)
            for a in q_W_values for b in q_C_values]
    cells = tuple(ordered_map(_cell_job, jobs, workers=workers))
    return SweepGrid(q_W_values=q_W_values, q_C_values=q_C_values, cells=cells,
                     z_default=z_default)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _write(rows, columns, kind: str, path: str | Path | None) -> str:
    buf = io.StringIO()
    buf.write(f"# lbt_coex {kind} csv schema v{SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def trace_rows(result: OptimalCwResult):
    for t in result.per_z_trace:
        yield (result.q_W, result.q_C, t.Z, t.S_co_W, t.S_co_C, t.S_only_W,
               t.constraint_met, t.S_total)


def summary_row(cell_or_result, improvement=None):
    res = cell_or_result.result if isinstance(cell_or_result, SweepCell) else cell_or_result
    if isinstance(cell_or_result, SweepCell):
        improvement = cell_or_result.improvement
    best = res.best
    return (res.q_W, res.q_C, res.z_star, res.feasible,
            best.S_total if best else None, improvement)


def write_trace_csv(result: OptimalCwResult, path=None) -> str:
    return _write(trace_rows(result), TRACE_COLUMNS, "trace", path)


def write_grid_csv(cells, path=None) -> str:
    return _write((summary_row(c) for c in cells), GRID_COLUMNS, "grid", path)
