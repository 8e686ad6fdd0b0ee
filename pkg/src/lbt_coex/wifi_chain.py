"""Non-saturated 802.11 AP backoff chain (post-backoff + binary exponential backoff)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ConfigError, check_probability, clamp_q
from .series import geo, one_minus_pow


@dataclass(frozen=True)
class WifiChainInput:
    q_W: float
    p_W: float
    P_idle_W: float
    W0: int = 16
    m: int = 3

    def __post_init__(self):
        check_probability("q_W", self.q_W)
        check_probability("p_W", self.p_W)
        check_probability("P_idle_W", self.P_idle_W)
        if self.W0 < 2:
            raise ConfigError("W0", f"must be >= 2, got {self.W0}")
        if self.m < 0:
            raise ConfigError("m", f"must be >= 0, got {self.m}")


@dataclass(frozen=True)
class WifiChainSolution:
    b00e: float
    tau_W: float


def _backoff_factor(p: float, W0: int, m: int) -> float:
    # 2 W0 (1 - p - p (2p)^(m-1)) / (1 - 2p) + 1 rewritten as a finite sum;
    # identical algebraically, but with no pole at p = 1/2 and no 0 * inf at m = 0.
    return W0 * (1.0 + geo(2.0 * p, m)) + 1.0


def saturated_wifi_tau(p_W: float, W0: int, m: int) -> float:
    """Attempt probability of an always-backlogged AP (q_W = 1)."""
    return 2.0 / (W0 + 1.0 + p_W * W0 * geo(2.0 * p_W, m))


def wifi_b00e(inp: WifiChainInput) -> float:
    """Stationary mass of the empty-buffer post-backoff head state (0,0)_e."""
    q, p, P, W0, m = inp.q_W, inp.p_W, inp.P_idle_W, inp.W0, inp.m
    if p >= 1.0:
        raise ValueError("p_W = 1 is outside the chain's domain (division by 1 - p_W)")
    if q == 0.0:
        return 1.0
    if q == 1.0:
        # no arrivals are ever missed, so post-backoff is never entered
        return 0.0
    q = clamp_q(q)
    A = one_minus_pow(1.0 - q, W0)
    inv = (1.0 - q) + q * q * W0 * (W0 + 1.0) / (2.0 * A)
    inv += q * (W0 + 1.0) / (2.0 * (1.0 - q)) * (
        q * q * W0 / A + (1.0 - P) * (1.0 - q) - q * P * (1.0 - p))
    inv += p * q * q / (2.0 * (1.0 - q) * (1.0 - p)) * (
        W0 / A - (1.0 - p) * P) * _backoff_factor(p, W0, m)
    if not np.isfinite(inv) or inv <= 0.0:
        raise FloatingPointError(f"non-finite normalization term for {inp}")
    return 1.0 / inv


def wifi_tau(inp: WifiChainInput) -> float:
    """Probability that the AP transmits in a randomly chosen channel state."""
    q, p, P, W0 = inp.q_W, inp.p_W, inp.P_idle_W, inp.W0
    if q == 0.0:
        return 0.0
    if q == 1.0:
        return saturated_wifi_tau(p, W0, inp.m)
    b = wifi_b00e(inp)
    q = clamp_q(q)
    A = one_minus_pow(1.0 - q, W0)
    tau = b * (q * q * W0 / ((1.0 - p) * (1.0 - q) * A) - q * q * P / (1.0 - q))
    return min(max(tau, 0.0), 1.0)


def wifi_solution(inp: WifiChainInput) -> WifiChainSolution:
    return WifiChainSolution(b00e=wifi_b00e(inp), tau_W=wifi_tau(inp))


def wifi_state_labels(W0: int, m: int) -> list[tuple]:
    labels: list[tuple] = [("e", k) for k in range(W0)]
    for i in range(m + 1):
        labels.extend((i, k) for k in range(W0 * 2**i))
    return labels


def wifi_transition_matrix(inp: WifiChainInput) -> tuple[np.ndarray, list[tuple]]:
    """Explicit row-stochastic matrix of the AP chain, built state by state.

    States: post-backoff ``("e", k)`` for k < W0, then backoff ``(i, k)`` for
    stage i <= m and k < 2**i W0. One transition per channel state:

    * post-backoff counters decrement every state; an arrival (prob. q) moves
      the AP into backoff stage 0 with the decremented counter;
    * at (0,0)_e an arrival is sent at once if the channel was idle (success
      -> fresh post-backoff counter, collision -> stage 1), or deferred to
      stage 0 if it was busy; with no arrival the state is kept;
    * backoff counters decrement every state; at k = 0 the AP transmits,
      resetting to stage 0 / post-backoff on success (depending on whether
      another packet is queued) or doubling the window up to stage m.
    """
    q, p, P, W0, m = inp.q_W, inp.p_W, inp.P_idle_W, inp.W0, inp.m
    labels = wifi_state_labels(W0, m)
    idx = {s: n for n, s in enumerate(labels)}
    M = np.zeros((len(labels), len(labels)))
    W = [W0 * 2**i for i in range(m + 1)]

    for k in range(1, W0):
        M[idx["e", k], idx["e", k - 1]] += 1.0 - q
        M[idx["e", k], idx[0, k - 1]] += q
    head = idx["e", 0]
    M[head, head] += 1.0 - q
    nxt = min(1, m)
    for k in range(W0):
        M[head, idx["e", k]] += q * P * (1.0 - p) / W0
        M[head, idx[0, k]] += q * (1.0 - P) / W0
    for k in range(W[nxt]):
        M[head, idx[nxt, k]] += q * P * p / W[nxt]

    for i in range(m + 1):
        for k in range(1, W[i]):
            M[idx[i, k], idx[i, k - 1]] += 1.0
        row = idx[i, 0]
        for k in range(W0):
            M[row, idx["e", k]] += (1.0 - p) * (1.0 - q) / W0
            M[row, idx[0, k]] += (1.0 - p) * q / W0
        j = min(i + 1, m)
        for k in range(W[j]):
            M[row, idx[j, k]] += p / W[j]
    return M, labels


def wifi_oracle(inp: WifiChainInput) -> WifiChainSolution:
    """b00e and tau_W from a direct stationary solve of the explicit chain."""
    from .markov import stationary_distribution

    M, labels = wifi_transition_matrix(inp)
    pi = stationary_distribution(M)
    idx = {s: n for n, s in enumerate(labels)}
    b00e = pi[idx["e", 0]]
    tau = inp.q_W * inp.P_idle_W * b00e + sum(pi[idx[i, 0]] for i in range(inp.m + 1))
    return WifiChainSolution(b00e=float(b00e), tau_W=float(tau))
