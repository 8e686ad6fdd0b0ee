"""Command-line front end.

Every command writes its CSV outputs plus one ``<command>.manifest.json`` into
``--out`` (default: current directory). Configuration comes from an optional
``--config`` file with ``--key value`` overrides on top; keys are config field
names, matched case-insensitively with ``-`` read as ``_`` (``--q_C`` and
``--q-c`` are the same override).

Exit codes: 0 success, 1 usage, 2 numerical failure, 3 IO.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .airtime import analyze
from .cellular_chain import CellChainInput, cell_transition_matrix
from .config import FIELD_NAMES, CoexConfig, ConfigError, coerce_value, load_config, validate
from .markov import StationarySolveError, stationary_distribution
from .optimizer import (Z_DEFAULT, Z_MAX, Z_MIN, optimize_cell, sweep, write_grid_csv,
                        write_trace_csv)
from .simulator import (PRNG_ALGORITHM, SimBudgetError, SimConfig, compare, simulate,
                        write_divergence_csv)
from .simulator import write_trace_csv as write_epoch_trace_csv
from .wifi_chain import WifiChainInput, wifi_transition_matrix

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("lbt_coex")


class UsageError(Exception):
    pass


class NumericalError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # config overrides are passed through; never let them prefix-match an option
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


_KEYS = {name.lower(): name for name in FIELD_NAMES}


def parse_overrides(tokens: list[str]) -> dict:
    """``["--q-c", "0", "--Z=12"]`` -> ``{"q_C": 0.0, "Z": 12}``."""
    out = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        key, eq, value = tok[2:].partition("=")
        name = _KEYS.get(key.replace("-", "_").lower())
        if name is None:
            raise UsageError(f"unknown option or config key {tok!r}")
        if not eq:
            value = next(it, None)
            if value is None:
                raise UsageError(f"override {tok} needs a value")
        out[name] = coerce_value(name, value)
    return out


def resolve_config(config_path: str | None, overrides: dict) -> CoexConfig:
    base = load_config(config_path) if config_path else CoexConfig()
    return validate(base.replace(**overrides))


def parse_range(spec: str, name: str) -> list[float]:
    """``start:stop:step`` (inclusive of stop) or a single value."""
    parts = spec.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"malformed range for {name}: {spec!r}") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise UsageError(f"range for {name} must be start:stop:step, got {spec!r}")
    start, stop, step = nums
    if step <= 0:
        raise UsageError(f"range for {name} needs a positive step, got {step!r}")
    if stop < start:
        raise UsageError(f"empty range for {name}: {spec!r}")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def parse_grid(spec: str) -> tuple[list[float], list[float]]:
    """``q_w=0.1:0.9:0.1,q_c=0.1:0.9:0.1`` -> (q_W values, q_C values)."""
    axes = {}
    for part in spec.split(","):
        key, eq, value = part.partition("=")
        key = key.strip().lower()
        if not eq or key not in ("q_w", "q_c"):
            raise UsageError(f"malformed grid spec {spec!r}; expected q_w=a:b:s,q_c=a:b:s")
        axes[key] = parse_range(value.strip(), key)
    if set(axes) != {"q_w", "q_c"}:
        raise UsageError(f"grid spec {spec!r} must give both q_w and q_c")
    for key, vals in axes.items():
        if not all(0.0 <= v <= 1.0 for v in vals):
            raise UsageError(f"grid values for {key} must lie in [0, 1]")
    return axes["q_w"], axes["q_c"]


def parse_z_range(spec: str) -> tuple[int, int]:
    lo, sep, hi = spec.partition(":")
    try:
        z_min, z_max = int(lo), int(hi if sep else lo)
    except ValueError:
        raise UsageError(f"malformed Z range {spec!r}; expected min:max") from None
    if z_min > z_max:
        raise UsageError(f"empty Z range {spec!r}")
    if z_min < 2:
        raise UsageError(f"Z range must start at 2 or above, got {z_min}")
    return z_min, z_max


def _rate_tag(rate: float) -> str:
    return f"{rate / 1e6:g}mbps"


class Run:
    """Collects output files and writes the run manifest."""

    def __init__(self, command: str, args: argparse.Namespace, config: CoexConfig,
                 params: dict):
        self.command = command
        self.out = Path(args.out)
        self.config = config
        self.params = params
        self.outputs: list[str] = []
        self.extra: dict = {}
        self.out.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text)
        self.outputs.append(str(path))
        return path

    def add_file(self, path: Path) -> None:
        self.outputs.append(str(path))

    def finish(self) -> Path:
        manifest = {
            "command": self.command,
            "tool": "lbt-coex",
            "version": __version__,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "config": self.config.as_dict(),
            "params": self.params,
            "outputs": self.outputs,
            **self.extra,
        }
        path = self.out / f"{self.command}.manifest.json"
        path.write_text(json.dumps(manifest, indent=2) + "\n")
        return path


def _kv_csv(rows: list[tuple[str, object]], kind: str) -> str:
    buf = io.StringIO()
    buf.write(f"# lbt_coex {kind} csv schema v1\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("quantity", "value"))
    for k, v in rows:
        w.writerow((k, repr(v) if isinstance(v, float) else v))
    return buf.getvalue()


def cmd_analyze(args, config: CoexConfig) -> int:
    run = Run("analyze", args, config, {})
    fp, rep = analyze(config, check_multiple_roots=args.check_roots)
    rows = [("tau_W", fp.tau_W), ("tau_C", fp.tau_C), ("p_W", fp.p_W), ("p_C", fp.p_C),
            ("residual_inf_norm", fp.residual_inf_norm), ("iterations", fp.iterations),
            ("converged", str(fp.converged).lower()),
            ("S_W_bps", rep.S_W), ("S_C_bps", rep.S_C), ("S_total_bps", rep.S_total),
            ("T_state_us", rep.T_state)]
    rows += [(f"share_{name}", v) for name, v in zip(rep.shares.CLASSES, rep.shares.as_tuple())]
    for k, v in rows:
        print(f"{k}={v}")
    for w in fp.warnings:
        print(f"warning: {w}", file=sys.stderr)
    run.write("analyze.csv", _kv_csv(rows, "analyze"))
    run.finish()
    if not fp.converged:
        raise NumericalError(f"fixed point did not converge (residual {fp.residual_inf_norm:.3e})")
    return EXIT_OK


def cmd_optimize(args, config: CoexConfig) -> int:
    z_min, z_max = parse_z_range(args.z_range)
    run = Run("optimize", args, config,
              {"z_range": [z_min, z_max], "z_default": args.z_default})
    cell = optimize_cell(config, z_min, z_max, args.z_default)
    res = cell.result
    print(f"z_star={res.z_star}" if res.feasible else "INFEASIBLE")
    run.write("optimize_trace.csv", write_trace_csv(res))
    run.write("optimize_summary.csv", write_grid_csv([cell]))
    run.finish()
    return EXIT_OK


def _heatmap(path: Path, grid, values, title: str) -> bool:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return False
    arr = np.array([[np.nan if v is None else v for v in row] for row in values], dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(arr, origin="lower", aspect="auto",
                   extent=(grid.q_C_values[0], grid.q_C_values[-1],
                           grid.q_W_values[0], grid.q_W_values[-1]))
    ax.set_xlabel("q_C")
    ax.set_ylabel("q_W")
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return True


def cmd_sweep(args, config: CoexConfig) -> int:
    q_W_values, q_C_values = parse_grid(args.grid)
    z_min, z_max = parse_z_range(args.z_range)
    if args.rates:
        try:
            rates = [float(r) for r in args.rates.split(",")]
        except ValueError:
            raise UsageError(f"malformed --rates {args.rates!r}") from None
        if not all(r > 0 for r in rates):
            raise UsageError("--rates must be positive")
    else:
        rates = [config.R_C]
    run = Run("sweep", args, config,
              {"grid": args.grid, "rates_R_C": rates, "z_range": [z_min, z_max],
               "z_default": args.z_default, "plots": not args.no_plots})
    summary = []
    for rate in rates:
        grid = sweep(q_W_values, q_C_values, config.replace(R_C=rate), z_min, z_max,
                     z_default=args.z_default, workers=args.workers)
        tag = _rate_tag(rate)
        run.write(f"sweep_grid_{tag}.csv", write_grid_csv(grid.cells))
        feasible = sum(c.result.feasible for c in grid.cells)
        mean = grid.mean_improvement()
        summary.append((rate, len(grid.cells), feasible, mean))
        print(f"R_C={rate:g} feasible={feasible}/{len(grid.cells)} "
              f"mean_improvement={'NA' if mean is None else f'{mean:.6f}'}")
        if not args.no_plots:
            imp = [[c.improvement for c in grid.cells[i * len(q_C_values):(i + 1) * len(q_C_values)]]
                   for i in range(len(q_W_values))]
            for name, values in (("z_star", grid.z_star_table()), ("improvement", imp)):
                path = run.out / f"sweep_{name}_{tag}.png"
                if _heatmap(path, grid, values, f"{name}, R_C = {rate / 1e6:g} Mb/s"):
                    run.add_file(path)
    buf = io.StringIO()
    buf.write("# lbt_coex improvement csv schema v1\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("r_c_bps", "cells", "feasible_cells", "mean_improvement"))
    for rate, n, feas, mean in summary:
        w.writerow((repr(rate), n, feas, "" if mean is None else repr(mean)))
    run.write("sweep_improvement.csv", buf.getvalue())
    run.finish()
    return EXIT_OK


def cmd_validate(args, config: CoexConfig) -> int:
    sim = SimConfig(config, slots=args.slots, warmup_slots=args.warmup,
                    replications=args.replications, seed=args.seed, batches=args.batches,
                    trace_epochs=args.trace, wifi_freeze=args.wifi_freeze)
    run = Run("validate", args, config,
              {"slots": sim.slots, "warmup_slots": sim.warmup_slots,
               "replications": sim.replications, "batches": sim.batches,
               "trace_epochs": sim.trace_epochs, "wifi_freeze": sim.wifi_freeze})
    run.extra = {"prng": PRNG_ALGORITHM, "seed": sim.seed}
    analytic = analyze(config)
    trace = {} if sim.trace_epochs else None
    est = simulate(sim, workers=args.workers, trace=trace)
    rows = compare(est, analytic, config)
    for d in rows:
        flag = "ok" if d.within_ci else "OUTSIDE_CI"
        print(f"{d.quantity}: analytic={d.analytic:.6g} sim={d.simulated:.6g} "
              f"+-{d.half_width:.3g} z={d.z_score:.2f} rel={d.rel_error:.4f} {flag}")
    run.write("validate_divergence.csv", write_divergence_csv(rows))
    if trace is not None:
        run.write("validate_trace.csv", write_epoch_trace_csv(trace, config))
    run.finish()
    if not analytic[0].converged:
        raise NumericalError("analytic fixed point did not converge")
    return EXIT_OK


def cmd_dump_chain(args, config: CoexConfig) -> int:
    fp, _ = analyze(config)
    p = fp.p_W if args.tech == "wifi" else fp.p_C
    if args.p is not None:
        if not 0.0 <= args.p < 1.0:
            raise UsageError("--p must lie in [0, 1)")
        p = args.p
    if args.tech == "wifi":
        M, labels = wifi_transition_matrix(WifiChainInput(config.q_W, p, 1.0 - p,
                                                          config.W0, config.m))
        names = [f"({k})_e" if s == "e" else f"({s},{k})" for s, k in labels]
    else:
        M = cell_transition_matrix(CellChainInput(config.q_C, p, 1.0 - p, config.Z))
        names = [f"({k})_e" for k in range(config.Z)] + [f"({k})" for k in range(config.Z)]
    pi = stationary_distribution(M)
    run = Run("dump-chain", args, config, {"tech": args.tech, "p": p})
    buf = io.StringIO()
    buf.write(f"# lbt_coex chain-{args.tech} csv schema v1 (rows: from-state)\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["state", "stationary", *names])
    for i, name in enumerate(names):
        w.writerow([name, repr(float(pi[i])), *(repr(float(v)) for v in M[i])])
    run.write(f"chain_{args.tech}.csv", buf.getvalue())
    run.finish()
    print(f"states={len(names)} p={p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lbt-coex", description="Wi-Fi / LBT cellular coexistence model.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="key = value scenario file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--workers", type=int, default=None,
                       help="worker count (default: CPU count, capped by LBT_COEX_THREADS)")
        return p

    a = common(sub.add_parser("analyze", help="solve one operating point"))
    a.add_argument("--check-roots", action="store_true", help="probe extra starting points")
    a.set_defaults(func=cmd_analyze)

    o = common(sub.add_parser("optimize", help="optimal cellular CW for one scenario"))
    o.add_argument("--z-range", default=f"{Z_MIN}:{Z_MAX}")
    o.add_argument("--z-default", type=int, default=Z_DEFAULT)
    o.set_defaults(func=cmd_optimize)

    s = common(sub.add_parser("sweep", help="optimal CW over a (q_W, q_C) grid"))
    s.add_argument("--grid", default="q_w=0.1:0.9:0.1,q_c=0.1:0.9:0.1")
    s.add_argument("--rates", default=None, help="comma-separated R_C values in bits/s")
    s.add_argument("--z-range", default=f"{Z_MIN}:{Z_MAX}")
    s.add_argument("--z-default", type=int, default=Z_DEFAULT)
    s.add_argument("--no-plots", action="store_true")
    s.set_defaults(func=cmd_sweep)

    v = common(sub.add_parser("validate", help="Monte Carlo check of the analytic model"))
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--slots", type=int, default=1_000_000)
    v.add_argument("--warmup", type=int, default=10_000)
    v.add_argument("--replications", type=int, default=20)
    v.add_argument("--batches", type=int, default=10)
    v.add_argument("--trace", type=int, default=0, help="dump the first N epochs of replication 0")
    v.add_argument("--wifi-freeze", action="store_true",
                   help="hold Wi-Fi counters over busy epochs")
    v.set_defaults(func=cmd_validate)

    d = common(sub.add_parser("dump-chain", help="write a chain's transition matrix"))
    d.add_argument("--tech", choices=("wifi", "cell"), default="cell")
    d.add_argument("--p", type=float, default=None,
                   help="collision probability (default: solved operating point)")
    d.set_defaults(func=cmd_dump_chain)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
        config = resolve_config(args.config, parse_overrides(rest))
        return args.func(args, config)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except SimBudgetError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, StationarySolveError, FloatingPointError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
