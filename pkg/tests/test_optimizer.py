import pytest

from lbt_coex.config import CoexConfig
from lbt_coex.optimizer import (GRID_COLUMNS, TRACE_COLUMNS, optimal_cw, optimize_cell, sweep,
                                write_grid_csv, write_trace_csv)


@pytest.fixture(scope="module")
def fast_rate():
    return optimal_cw(CoexConfig(q_W=0.5, q_C=0.5, R_C=2e8))


def test_zstar_dominates_trace(fast_rate):
    r = fast_rate
    assert r.feasible and r.z_star is not None
    feasible = [t for t in r.per_z_trace if t.constraint_met]
    best = r.best
    assert best.constraint_met
    assert all(best.S_total >= t.S_total for t in feasible)
    assert best.Z == min(t.Z for t in feasible if t.S_total == best.S_total)
    assert [t.Z for t in r.per_z_trace] == list(range(2, 65))


def test_constraint_is_strict_minimum_over_technologies(fast_rate):
    for t in fast_rate.per_z_trace:
        assert t.constraint_met == (min(t.S_co_W, t.S_co_C) > t.S_only_W)


def test_no_cellular_traffic_is_infeasible():
    r = optimal_cw(CoexConfig(q_C=0.0), 2, 20)
    assert not r.feasible and r.z_star is None and r.best is None


def test_light_cellular_load_infeasible():
    assert not optimal_cw(CoexConfig(q_C=0.1)).feasible


def test_deterministic():
    c = CoexConfig(q_W=0.3, q_C=0.6, R_C=2e8)
    assert optimal_cw(c, 2, 30) == optimal_cw(c, 2, 30)


def test_range_validation():
    with pytest.raises(ValueError):
        optimal_cw(CoexConfig(), 10, 5)
    with pytest.raises(ValueError):
        optimal_cw(CoexConfig(), 1, 5)


def test_single_cell_sweep_equals_optimize_cell():
    c = CoexConfig(q_W=0.5, q_C=0.5, R_C=2e8)
    grid = sweep([0.5], [0.5], c, workers=1)
    cell = optimize_cell(c)
    assert grid.cells == (cell,)
    assert write_grid_csv(grid.cells) == write_grid_csv([cell])


def test_improvement_only_on_feasible_cells():
    grid = sweep([0.5], [0.1, 0.9], CoexConfig(R_C=2e8), 2, 40, workers=1)
    for cell in grid.cells:
        assert (cell.improvement is None) == (not cell.result.feasible)
    assert len(grid.z_star_table()) == 1 and len(grid.z_star_table()[0]) == 2


def test_csv_schemas(fast_rate):
    trace = write_trace_csv(fast_rate).splitlines()
    assert trace[0] == "# lbt_coex trace csv schema v1"
    assert trace[1] == ",".join(TRACE_COLUMNS)
    assert len(trace) == 2 + 63
    grid = write_grid_csv(sweep([0.5], [0.1], CoexConfig(), 2, 8, workers=1).cells).splitlines()
    assert grid[1] == ",".join(GRID_COLUMNS)
    assert grid[2] == "0.5,0.1,,false,,"
