"""Coupled fixed point of the Wi-Fi and cellular attempt probabilities.

The per-node chains only see the rest of the network through the collision
probability, p = 1 - prod over the other nodes of (1 - tau), with the idle
probability tied to it as P_idle = 1 - p. Substituting turns the two chain
solutions into a map tau -> F(tau) whose fixed point is the operating point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .cellular_chain import CellChainInput, cell_tau
from .config import CoexConfig, validate
from .wifi_chain import WifiChainInput, wifi_tau

log = logging.getLogger(__name__)

TOL = 1e-10
MAX_ITER = 100_000
OMEGA = 0.5
RESTART_OMEGA = 0.1
START = (0.01, 0.01)
MULTI_ROOT_STARTS = ((0.01, 0.01), (0.3, 0.3), (0.9, 0.05), (0.05, 0.9), (0.6, 0.6))
MULTI_ROOT_TOL = 1e-6


@dataclass(frozen=True)
class FixedPoint:
    tau_W: float
    tau_C: float
    p_W: float
    p_C: float
    residual_inf_norm: float
    iterations: int
    converged: bool
    warnings: tuple[str, ...] = ()

    @property
    def P_idle_W(self) -> float:
        return 1.0 - self.p_W

    @property
    def P_idle_C(self) -> float:
        return 1.0 - self.p_C


def collision_probabilities(tau_W: float, tau_C: float, n_W: int, n_C: int) -> tuple[float, float]:
    """Conditional collision probabilities seen by a Wi-Fi AP and by an SCBS.

    For a technology with no nodes the value is what a hypothetical extra node
    of that kind would see.
    """
    sW = 1.0 - tau_W
    sC = 1.0 - tau_C
    p_W = 1.0 - sW ** max(n_W - 1, 0) * sC**n_C
    p_C = 1.0 - sW**n_W * sC ** max(n_C - 1, 0)
    return p_W, p_C


def attempt_map(tau_W: float, tau_C: float, config: CoexConfig) -> tuple[float, float]:
    p_W, p_C = collision_probabilities(tau_W, tau_C, config.n_W, config.n_C)
    F_W = 0.0
    F_C = 0.0
    if config.n_W > 0:
        F_W = wifi_tau(WifiChainInput(config.q_W, p_W, 1.0 - p_W, config.W0, config.m))
    if config.n_C > 0:
        F_C = cell_tau(CellChainInput(config.q_C, p_C, 1.0 - p_C, config.Z))
    return F_W, F_C


def residual(candidate, config: CoexConfig) -> np.ndarray:
    """tau - F(tau) for a candidate (tau_W, tau_C)."""
    tau_W, tau_C = (float(v) for v in candidate)
    if not (0.0 <= tau_W <= 1.0 and 0.0 <= tau_C <= 1.0):
        raise ValueError(f"candidate {candidate} outside [0, 1]^2")
    F_W, F_C = attempt_map(tau_W, tau_C, config)
    return np.array([tau_W - F_W, tau_C - F_C])


def _iterate(config: CoexConfig, start, omega: float, tol: float, budget: int):
    tau = np.array(start, dtype=float)
    best = (np.inf, tau.copy(), 0)
    last_gain = 0
    for it in range(1, budget + 1):
        F = np.array(attempt_map(tau[0], tau[1], config))
        r = float(np.max(np.abs(tau - F)))
        if r < best[0]:
            if r < 0.5 * best[0]:
                last_gain = it
            best = (r, tau.copy(), it)
        if r < tol:
            return tau, r, it, True
        if it - last_gain > 5000:
            # stagnated: oscillation that damping at this omega cannot absorb
            break
        tau = (1.0 - omega) * tau + omega * F
    return best[1], best[0], best[2], False


def _active_start(config: CoexConfig, start) -> tuple[float, float]:
    tw, tc = start
    if config.n_W == 0 or config.q_W == 0.0:
        tw = 0.0
    if config.n_C == 0 or config.q_C == 0.0:
        tc = 0.0
    return tw, tc


def solve_fixed_point(config: CoexConfig, *, tol: float = TOL, max_iter: int = MAX_ITER,
                      start=START, check_multiple_roots: bool = False) -> FixedPoint:
    """Damped fixed-point iteration tau <- (1-w) tau + w F(tau).

    Runs with w = 0.5 and restarts with w = 0.1 if that fails to converge.
    Non-convergence is reported through ``converged=False`` with the best
    iterate attached, not raised.
    """
    validate(config)
    x0 = _active_start(config, start)
    total = 0
    tau, r, used, ok = _iterate(config, x0, OMEGA, tol, max_iter)
    total += used
    if not ok:
        log.info("fixed point stalled at residual %.3e with omega=%s; restarting", r, OMEGA)
        tau2, r2, used2, ok = _iterate(config, x0, RESTART_OMEGA, tol, max_iter)
        total += used2
        if ok or r2 < r:
            tau, r = tau2, r2

    warnings: list[str] = []
    if check_multiple_roots and ok:
        roots = [tau]
        for s in MULTI_ROOT_STARTS:
            t, _, _, conv = _iterate(config, _active_start(config, s), OMEGA, tol, max_iter)
            if conv and all(np.max(np.abs(t - other)) > MULTI_ROOT_TOL for other in roots):
                roots.append(t)
        if len(roots) > 1:
            msg = f"{len(roots)} distinct fixed points reached: " + ", ".join(
                f"({a:.6g}, {b:.6g})" for a, b in roots)
            log.warning(msg)
            warnings.append(msg)

    tau_W, tau_C = float(tau[0]), float(tau[1])
    p_W, p_C = collision_probabilities(tau_W, tau_C, config.n_W, config.n_C)
    return FixedPoint(tau_W=tau_W, tau_C=tau_C, p_W=p_W, p_C=p_C,
                      residual_inf_norm=float(r), iterations=total, converged=bool(ok),
                      warnings=tuple(warnings))
