"""Analytical and simulation model of Wi-Fi APs sharing a channel with LBT cellular stations."""

from .airtime import (AirtimeShares, FrameDurations, ThroughputReport, analyze, frame_durations,
                      throughputs)
from .cellular_chain import CellChainInput, cell_oracle, cell_solution, cell_tau
from .config import CoexConfig, ConfigError, load_config, validate
from .optimizer import OptimalCwResult, SweepGrid, optimal_cw, sweep, wifi_only_baseline
from .simulator import SimConfig, SimEstimates, compare, simulate
from .solver import FixedPoint, residual, solve_fixed_point
from .wifi_chain import WifiChainInput, wifi_oracle, wifi_solution, wifi_tau

__version__ = "0.1.0"

__all__ = [
    "AirtimeShares", "CellChainInput", "CoexConfig", "ConfigError", "FixedPoint",
    "FrameDurations", "OptimalCwResult", "SimConfig", "SimEstimates", "SweepGrid",
    "ThroughputReport", "WifiChainInput", "analyze", "cell_oracle", "cell_solution",
    "cell_tau", "compare", "frame_durations", "load_config", "optimal_cw", "residual",
    "simulate", "solve_fixed_point", "sweep", "throughputs", "validate", "wifi_only_baseline",
    "wifi_oracle", "wifi_solution", "wifi_tau",
]
