"""Test-side oracles, built independently of the library.

Chains are assembled from per-state successor rules (one function per
technology) and solved with the first balance equation replaced by the
normalization row, so neither the matrix construction nor the linear solve
is shared with the code under test.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np


def _uniform(target, width, weight, out):
    for u in range(width):
        out[target(u)] += weight / width


def wifi_successors(state, q, p, P, W0, m):
    out = defaultdict(float)
    W = lambda i: W0 * 2**i
    stage, k = state
    if stage == "e":
        if k > 0:
            out["e", k - 1] += 1 - q
            out[0, k - 1] += q
        else:
            out["e", 0] += 1 - q
            # immediate transmission on an idle channel
            _uniform(lambda u: ("e", u), W0, q * P * (1 - p), out)
            j = min(1, m)
            _uniform(lambda u: (j, u), W(j), q * P * p, out)
            _uniform(lambda u: (0, u), W0, q * (1 - P), out)
        return out
    if k > 0:
        out[stage, k - 1] += 1.0
        return out
    _uniform(lambda u: (0, u), W0, (1 - p) * q, out)
    _uniform(lambda u: ("e", u), W0, (1 - p) * (1 - q), out)
    j = min(stage + 1, m)
    _uniform(lambda u: (j, u), W(j), p, out)
    return out


def cell_successors(state, q, p, P, Z):
    out = defaultdict(float)
    kind, k = state
    if kind == "e":
        if k > 0:
            out["e", k - 1] += P * (1 - q)
            out["b", k - 1] += P * q
            _uniform(lambda u: ("e", u), Z, (1 - P) * (1 - q), out)
            _uniform(lambda u: ("b", u), Z, (1 - P) * q, out)
        else:
            out["e", 0] += 1 - q
            _uniform(lambda u: ("e", u), Z, q * P * (1 - p), out)
            _uniform(lambda u: ("b", u), Z, q * P * p, out)
            _uniform(lambda u: ("b", u), Z, q * (1 - P), out)
        return out
    if k > 0:
        out["b", k - 1] += 1 - p
        _uniform(lambda u: ("b", u), Z, p, out)
        return out
    _uniform(lambda u: ("b", u), Z, p, out)
    _uniform(lambda u: ("b", u), Z, (1 - p) * q, out)
    _uniform(lambda u: ("e", u), Z, (1 - p) * (1 - q), out)
    return out


def wifi_states(W0, m):
    states = [("e", k) for k in range(W0)]
    for i in range(m + 1):
        states += [(i, k) for k in range(W0 * 2**i)]
    return states


def cell_states(Z):
    return [("e", k) for k in range(Z)] + [("b", k) for k in range(Z)]


def build_matrix(states, successors):
    index = {s: n for n, s in enumerate(states)}
    M = np.zeros((len(states), len(states)))
    for s in states:
        for t, w in successors(s).items():
            M[index[s], index[t]] += w
    return M


def stationary(M):
    n = M.shape[0]
    A = M.T - np.eye(n)
    A[0, :] = 1.0
    rhs = np.zeros(n)
    rhs[0] = 1.0
    return np.linalg.solve(A, rhs)


def wifi_oracle(q, p, P, W0, m):
    """(b00e, tau_W, pi, states)."""
    states = wifi_states(W0, m)
    pi = stationary(build_matrix(states, lambda s: wifi_successors(s, q, p, P, W0, m)))
    idx = {s: n for n, s in enumerate(states)}
    b00e = pi[idx["e", 0]]
    tau = q * P * b00e + sum(pi[idx[i, 0]] for i in range(m + 1))
    return b00e, tau, pi, states


def cell_oracle(q, p, P, Z):
    """(b0e, b0, tau_C, pi) with pi ordered [(k)_e ..., (k) ...]."""
    states = cell_states(Z)
    pi = stationary(build_matrix(states, lambda s: cell_successors(s, q, p, P, Z)))
    b0e, b0 = pi[0], pi[Z]
    return b0e, b0, b0 + q * P * b0e, pi


def saturated_cell_oracle(p, Z):
    """tau of the Z-state backoff-only chain (always backlogged)."""
    M = np.zeros((Z, Z))
    M[0, :] = 1.0 / Z
    for k in range(1, Z):
        M[k, :] += p / Z
        M[k, k - 1] += 1 - p
    return stationary(M)[0]


def saturated_wifi_oracle(p, W0, m):
    """tau of the backoff-only 802.11 chain (always backlogged)."""
    states = [(i, k) for i in range(m + 1) for k in range(W0 * 2**i)]
    idx = {s: n for n, s in enumerate(states)}
    M = np.zeros((len(states), len(states)))
    for i in range(m + 1):
        for k in range(1, W0 * 2**i):
            M[idx[i, k], idx[i, k - 1]] = 1.0
        for u in range(W0):
            M[idx[i, 0], idx[0, u]] += (1 - p) / W0
        j = min(i + 1, m)
        for u in range(W0 * 2**j):
            M[idx[i, 0], idx[j, u]] += p / (W0 * 2**j)
    pi = stationary(M)
    return sum(pi[idx[i, 0]] for i in range(m + 1))


def single_technology_fixed_point(config):
    """Fixed point of a one-technology network by bracketing tau - F(tau).

    Only valid when n_W = 0 or n_C = 0, where the system is one equation.
    """
    from scipy.optimize import brentq

    from lbt_coex.cellular_chain import CellChainInput, cell_tau
    from lbt_coex.wifi_chain import WifiChainInput, wifi_tau

    if config.n_C == 0:
        n = config.n_W

        def g(t):
            p = 1 - (1 - t) ** (n - 1)
            return t - wifi_tau(WifiChainInput(config.q_W, p, 1 - p, config.W0, config.m))
    else:
        n = config.n_C

        def g(t):
            p = 1 - (1 - t) ** (n - 1)
            return t - cell_tau(CellChainInput(config.q_C, p, 1 - p, config.Z))
    return brentq(g, 1e-12, 0.99, xtol=1e-15, rtol=1e-15)
