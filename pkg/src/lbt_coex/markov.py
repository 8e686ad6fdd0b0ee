"""Stationary distributions of finite discrete-time Markov chains."""

from __future__ import annotations

import numpy as np


class StationarySolveError(RuntimeError):
    pass


def stationary_distribution(matrix, *, row_tol: float = 1e-10) -> np.ndarray:
    """Solve pi M = pi, sum(pi) = 1 for a row-stochastic matrix ``M``.

    A rank deficiency beyond the single expected null direction (more than
    one closed class) is reported as StationarySolveError.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if np.any(M < -row_tol) or np.max(np.abs(M.sum(axis=1) - 1.0)) > row_tol:
        raise ValueError("matrix is not row-stochastic")
    # normalization replaces one (redundant) balance equation; the square
    # system is nonsingular exactly when the stationary vector is unique
    A = M.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        pi = None
    if pi is None or not np.all(np.isfinite(pi)):
        rank = np.linalg.matrix_rank(np.vstack([M.T - np.eye(n), np.ones((1, n))]))
        raise StationarySolveError(
            f"stationary system has rank {rank} < {n}; chain has more than one closed class")
    # one refinement step tightens the residual to machine precision
    pi = pi + np.linalg.solve(A, b - A @ pi)
    if pi.min() < -1e-10:
        raise StationarySolveError(f"negative stationary mass {pi.min():.3e}")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def stationary_residual(matrix, pi) -> float:
    M = np.asarray(matrix, dtype=float)
    pi = np.asarray(pi, dtype=float)
    return float(np.max(np.abs(pi @ M - pi)))
