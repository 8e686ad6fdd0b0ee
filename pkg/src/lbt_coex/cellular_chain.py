"""Non-saturated LBT chain of a cellular small-cell base station.

States are ``(k)_e`` (post-backoff, empty buffer) and ``(k)`` (backoff) for
counter k in [0, Z-1]. Unlike 802.11, the counter is re-drawn from
[0, Z-1] whenever the channel is sensed busy and the window never grows.

Closed forms
------------
With ``x = (1-q) P_idle`` (stay in post-backoff and decrement) and
``y = 1 - p`` (decrement in backoff), and masses normalized to b_(0)_e = 1:

* post-backoff:  b_(k)_e = q (1 - x^(Z-k)) / (1 - x^Z),  1 <= k <= Z-1
* ratio:         gamma = b_(0) / b_(0)_e
                       = q (1 - y P_idle + S_e) / ((1-q) y),
                 S_e = q sum_{j=1}^{Z-1} (1 - x^j) / (1 - x^Z)
* backoff:       b_(l) = B geo(y, Z-l) + kappa T(Z-1-l),
                 kappa = q^2 P_idle (1-x) / (1 - x^Z),
                 T(n) = sum_{j<n} y^j geo(x, n-j)

and b_(0)_e follows from normalization in the form

    b_(0)_e = [eta lam + P_idle (1-p) + (eta mu + (1-q)(1-p)/q) gamma]^-1

where eta = p / (P_idle alpha(Z)), sum_k b_(k) = eta lam b_(0)_e + eta mu b_(0),
alpha(x) = 1 - (1-p)^x and beta(x) = 1 - ((1-q) P_idle)^x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import ConfigError, check_probability, clamp_q
from .markov import stationary_distribution
from .series import SINGULAR_TOL, geo, geo_mixed, geo_weighted, one_minus_pow


@dataclass(frozen=True)
class CellChainInput:
    q_C: float
    p_C: float
    P_idle_C: float
    Z: int = 16

    def __post_init__(self):
        check_probability("q_C", self.q_C)
        check_probability("p_C", self.p_C)
        check_probability("P_idle_C", self.P_idle_C)
        if isinstance(self.Z, bool) or int(self.Z) != self.Z or self.Z < 2:
            raise ConfigError("Z", f"cellular CW must be an integer >= 2, got {self.Z!r}")


@dataclass(frozen=True)
class CellClosedFormTerms:
    alpha_of: Callable[[float], float]
    beta_of: Callable[[float], float]
    eta: float
    lam: float
    mu: float
    gamma: float
    # products used on the hot path; finite even where eta alone is not
    eta_lam: float
    eta_mu: float


@dataclass(frozen=True)
class CellChainSolution:
    b0e: float
    b0: float
    tau_C: float


def cell_transition_matrix(inp: CellChainInput) -> np.ndarray:
    """Row-stochastic 2Z x 2Z matrix, rows = source states.

    Ordering: [(0)_e ... (Z-1)_e, (0) ... (Z-1)].
    """
    q, p, P, Z = inp.q_C, inp.p_C, inp.P_idle_C, inp.Z
    M = np.zeros((2 * Z, 2 * Z))
    E = np.arange(Z)
    B = Z + np.arange(Z)

    for k in range(1, Z):
        M[k, E] += (1 - q) * (1 - P) / Z
        M[k, B] += q * (1 - P) / Z
        M[k, k - 1] += (1 - q) * P
        M[k, Z + k - 1] += q * P

    M[0, E] += q * P * (1 - p) / Z
    M[0, 0] += 1 - q
    M[0, B] += (p * q * P + q * (1 - P)) / Z

    for k in range(1, Z):
        M[Z + k, B] += p / Z
        M[Z + k, Z + k - 1] += 1 - p

    M[Z, B] += (p + q * (1 - p)) / Z
    M[Z, E] += (1 - q) * (1 - p) / Z
    return M


def _alpha(p: float) -> Callable[[float], float]:
    return lambda x: one_minus_pow(1.0 - p, x)


def _beta(q: float, P: float) -> Callable[[float], float]:
    return lambda x: one_minus_pow((1.0 - q) * P, x)


def _tail_sums(x: float, y: float, Z: int) -> tuple[float, float]:
    """T(Z-1) and sum_{n=0}^{Z-1} T(n) with T(n) = sum_{j<n} y^j geo(x, n-j)."""
    if abs(1.0 - x) < SINGULAR_TOL or abs(x - y) < SINGULAR_TOL * max(x, y, 1e-300):
        T, total = 0.0, 0.0
        for n in range(1, Z):
            T = geo(x, n) + y * T
            total += T
        return T, total
    # T(n) = [geo(y, n) - sum_{j<n} y^j x^(n-j)] / (1 - x)
    T_last = (geo(y, Z - 1) - geo_mixed(x, y, Z - 1)) / (1.0 - x)
    total = (geo_weighted(y, Z - 1) - x * (geo(x, Z) - geo(y, Z)) / (x - y)) / (1.0 - x)
    return T_last, total


def cell_closed_form(inp: CellChainInput) -> CellClosedFormTerms:
    """Closed-form terms of the stationary solution.

    Requires 0 < q_C < 1 and p_C < 1; the endpoints are limit branches of
    ``cell_solution``. ``eta``/``lam``/``mu`` individually need P_idle_C > 0
    (they are reported as inf/nan otherwise), their products do not.
    """
    q, p, P, Z = inp.q_C, inp.p_C, inp.P_idle_C, inp.Z
    if not 0.0 < q < 1.0:
        raise ValueError(f"closed form needs 0 < q_C < 1 (got {q}); use the limit branches")
    if p >= 1.0:
        raise ValueError("p_C = 1 is outside the chain's domain (division by 1 - p_C)")
    q = clamp_q(q)
    x = (1.0 - q) * P
    y = 1.0 - p

    gx_Z = geo(x, Z)
    gy_Z = geo(y, Z)
    S_e = q * geo_weighted(x, Z - 1) / gx_Z
    gamma = q * (1.0 - y * P + S_e) / ((1.0 - q) * y)

    kappa = q * q * P / gx_Z
    T_last, T_sum = _tail_sums(x, y, Z)
    eta_mu = geo_weighted(y, Z) / gy_Z
    eta_lam = kappa * (T_sum - T_last * eta_mu)

    if P > 0.0:
        eta = 1.0 / (P * gy_Z)
        lam = eta_lam / eta
        mu = eta_mu / eta
    else:
        eta, lam, mu = float("inf"), float("nan"), float("nan")
    return CellClosedFormTerms(
        alpha_of=_alpha(p), beta_of=_beta(q, P), eta=eta, lam=lam, mu=mu,
        gamma=gamma, eta_lam=eta_lam, eta_mu=eta_mu)


def saturated_cell_tau(p_C: float, Z: int) -> float:
    """Attempt probability of an always-backlogged SCBS (q_C = 1)."""
    y = 1.0 - p_C
    return geo(y, Z) / geo_weighted(y, Z)


def cell_solution(inp: CellChainInput) -> CellChainSolution:
    q, p, P, Z = inp.q_C, inp.p_C, inp.P_idle_C, inp.Z
    if q == 0.0:
        return CellChainSolution(b0e=1.0, b0=0.0, tau_C=0.0)
    if q == 1.0 or p >= 1.0:
        # post-backoff is transient: only the backoff stage carries mass
        if p >= 1.0:
            return CellChainSolution(b0e=0.0, b0=1.0 / Z, tau_C=1.0 / Z)
        tau = saturated_cell_tau(p, Z)
        return CellChainSolution(b0e=0.0, b0=tau, tau_C=tau)
    t = cell_closed_form(inp)
    q = clamp_q(q)
    inv = t.eta_lam + P * (1.0 - p) + (t.eta_mu + (1.0 - q) * (1.0 - p) / q) * t.gamma
    if not np.isfinite(inv) or inv <= 0.0:
        raise FloatingPointError(f"non-finite normalization term for {inp}")
    b0e = 1.0 / inv
    b0 = t.gamma * b0e
    tau = b0 + q * P * b0e
    return CellChainSolution(b0e=b0e, b0=b0, tau_C=min(max(tau, 0.0), 1.0))


def cell_b0e(inp: CellChainInput) -> float:
    return cell_solution(inp).b0e


def cell_tau(inp: CellChainInput) -> float:
    return cell_solution(inp).tau_C


def cell_post_backoff_masses(inp: CellChainInput, b0e: float) -> np.ndarray:
    """b_(k)_e for k = 0..Z-1 given b_(0)_e (0 < q_C < 1)."""
    q, P, Z = clamp_q(inp.q_C), inp.P_idle_C, inp.Z
    x = (1.0 - q) * P
    bZ = one_minus_pow(x, Z)
    e = np.array([b0e] + [q * b0e * one_minus_pow(x, Z - k) / bZ for k in range(1, Z)])
    return e


def cell_oracle(inp: CellChainInput) -> CellChainSolution:
    """b_(0)_e, b_(0), tau_C from a direct stationary solve of the matrix."""
    pi = stationary_distribution(cell_transition_matrix(inp))
    b0e, b0 = float(pi[0]), float(pi[inp.Z])
    return CellChainSolution(b0e=b0e, b0=b0, tau_C=b0 + inp.q_C * inp.P_idle_C * b0e)


def saturated_cell_matrix(p_C: float, Z: int) -> np.ndarray:
    """Z-state backoff-only chain of an always-backlogged SCBS."""
    M = np.full((Z, Z), p_C / Z)
    M[0, :] = 1.0 / Z
    for k in range(1, Z):
        M[k, k - 1] += 1.0 - p_C
    return M
