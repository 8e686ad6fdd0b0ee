import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from lbt_coex.config import CoexConfig
from lbt_coex.solver import (attempt_map, collision_probabilities, residual,
                             solve_fixed_point)


def test_no_traffic_residual_is_zero():
    c = CoexConfig(q_W=0.0, q_C=0.0)
    np.testing.assert_array_equal(residual((0.0, 0.0), c), [0.0, 0.0])


def test_single_ap_never_collides():
    c = CoexConfig(n_W=1, n_C=0, q_W=0.7)
    F_W, _ = attempt_map(0.3, 0.9, c)
    assert residual((F_W, 0.9), c)[0] == 0.0


def test_saturated_single_ap():
    fp = solve_fixed_point(CoexConfig(n_W=1, n_C=0, q_W=1.0))
    assert fp.converged and fp.p_W == 0.0
    assert fp.tau_W == pytest.approx(2 / 17, abs=1e-9)


def test_saturated_single_scbs():
    fp = solve_fixed_point(CoexConfig(n_W=0, n_C=1, q_C=1.0, Z=2))
    assert fp.converged and fp.p_C == 0.0
    assert fp.tau_C == pytest.approx(2 / 3, abs=1e-9)


def test_reference_scenario_converges():
    c = CoexConfig(Z=10)
    fp = solve_fixed_point(c)
    assert fp.converged and fp.residual_inf_norm < 1e-10
    assert np.max(np.abs(residual((fp.tau_W, fp.tau_C), c))) < 1e-8
    assert fp.P_idle_W == 1 - fp.p_W and fp.P_idle_C == 1 - fp.p_C


@pytest.mark.parametrize("n_W,q_W", [(1, 0.3), (3, 0.5), (5, 1.0)])
def test_wifi_only_matches_bracketing_root(n_W, q_W):
    c = CoexConfig(n_W=n_W, n_C=0, q_W=q_W)
    assert solve_fixed_point(c).tau_W == pytest.approx(
        oracles.single_technology_fixed_point(c), abs=1e-9)


@pytest.mark.parametrize("n_C,q_C,Z", [(2, 0.4, 8), (4, 1.0, 16)])
def test_cell_only_matches_bracketing_root(n_C, q_C, Z):
    c = CoexConfig(n_W=0, n_C=n_C, q_C=q_C, Z=Z)
    assert solve_fixed_point(c).tau_C == pytest.approx(
        oracles.single_technology_fixed_point(c), abs=1e-9)


def test_inactive_technology_stays_silent():
    fp = solve_fixed_point(CoexConfig(q_C=0.0))
    assert fp.tau_C == 0.0
    fp = solve_fixed_point(CoexConfig(n_W=0, n_C=2))
    assert fp.tau_W == 0.0


def test_multi_root_probe_reports_single_root_here():
    fp = solve_fixed_point(CoexConfig(Z=10), check_multiple_roots=True)
    assert fp.warnings == ()


def test_tiny_budget_reports_nonconvergence():
    fp = solve_fixed_point(CoexConfig(Z=10), max_iter=3)
    assert not fp.converged and fp.residual_inf_norm > 1e-10


def test_candidate_outside_unit_square_rejected():
    with pytest.raises(ValueError):
        residual((1.2, 0.1), CoexConfig())


scenarios = st.builds(CoexConfig, n_W=st.integers(0, 4), n_C=st.integers(1, 4),
                      q_W=st.floats(0.0, 1.0), q_C=st.floats(0.0, 1.0),
                      Z=st.integers(2, 64), W0=st.sampled_from([8, 16, 32]),
                      m=st.integers(0, 5))


@settings(max_examples=40)
@given(scenarios)
def test_fixed_point_properties(c):
    fp = solve_fixed_point(c)
    assert fp.converged
    # re-substituting tau reproduces tau
    F = attempt_map(fp.tau_W, fp.tau_C, c)
    assert abs(F[0] - fp.tau_W) < 1e-10 and abs(F[1] - fp.tau_C) < 1e-10
    p_W, p_C = collision_probabilities(fp.tau_W, fp.tau_C, c.n_W, c.n_C)
    assert (p_W, p_C) == (fp.p_W, fp.p_C)
    for v in (fp.tau_W, fp.tau_C, fp.p_W, fp.p_C):
        assert 0.0 <= v < 1.0
    if c.n_W == 0 or c.q_W == 0:
        assert fp.tau_W == 0.0
    if c.n_C == 0 or c.q_C == 0:
        assert fp.tau_C == 0.0
