import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from lbt_coex.markov import StationarySolveError, stationary_distribution, stationary_residual


def test_two_state_swap():
    pi = stationary_distribution([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(pi, [0.5, 0.5], atol=1e-15)


def test_saturated_two_state_cellular_chain():
    # counter 0 transmits and redraws from {0, 1}; counter 1 decrements
    pi = stationary_distribution([[0.5, 0.5], [1.0, 0.0]])
    np.testing.assert_allclose(pi, [2 / 3, 1 / 3], atol=1e-15)


@given(arrays(float, (6, 6), elements=st.floats(0.01, 1.0)))
def test_random_positive_chain(raw):
    M = raw / raw.sum(axis=1, keepdims=True)
    pi = stationary_distribution(M)
    assert pi.min() >= 0 and abs(pi.sum() - 1) < 1e-14
    assert stationary_residual(M, pi) < 1e-12


def test_reducible_chain_rejected():
    with pytest.raises(StationarySolveError, match="rank"):
        stationary_distribution(np.eye(3))


def test_non_stochastic_rejected():
    with pytest.raises(ValueError, match="row-stochastic"):
        stationary_distribution([[0.5, 0.4], [0.5, 0.5]])
