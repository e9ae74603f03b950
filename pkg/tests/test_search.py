import numpy as np
import pytest

from matrixball import (
    SearchConfig,
    bound_check,
    boundary_sweep,
    equality_diagnostics,
    maximize_area,
)
from matrixball.search import BoundViolationError, random_triangle


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(p=1, q=1, margins=(1e-2, 1e-1))  # increasing
    with pytest.raises(ValueError):
        SearchConfig(p=1, q=1, margins=(0.1, -0.2))
    with pytest.raises(ValueError):
        SearchConfig(p=0, q=1)
    with pytest.raises(ValueError):
        SearchConfig(p=1, q=1, restarts=0)
    cfg = SearchConfig(p=2, q=3)
    assert cfg.rank == 2
    assert cfg.target == pytest.approx(2 * np.pi)


def test_zero_budget_returns_initial_sample():
    cfg = SearchConfig(p=1, q=1, margins=(0.1,), iterations=0, restarts=1, seed=5)
    trace = maximize_area(cfg)
    assert len(trace.stages) == 1
    assert trace.stages[0].evaluations == 0
    assert 0.0 <= trace.best_abs < np.pi
    assert trace.best_vertices is not None


def test_trace_invariants_small_run():
    cfg = SearchConfig(p=1, q=1, margins=(1e-1, 1e-2), iterations=400, restarts=1, seed=3)
    trace = maximize_area(cfg)
    curve = trace.best_curve
    assert all(b2 >= b1 for b1, b2 in zip(curve, curve[1:]))
    assert all(st.best_abs <= np.pi + 1e-9 for st in trace.stages)
    assert trace.best_abs > 1.5  # far beyond a random start


def test_margin_floor_keeps_gap():
    cfg = SearchConfig(p=1, q=1, margins=(0.5, 0.4, 0.3), iterations=800, restarts=2, seed=0)
    trace = maximize_area(cfg)
    report = equality_diagnostics(trace)
    assert report.final_gap > 0.1
    # interior constraint caps the reachable area strictly below the bound
    ideal_cap = abs(boundary_sweep(1, 1, [0.3])[0][1])
    assert trace.best_abs <= ideal_cap + 1e-6


def test_seed_reproducibility():
    cfg = SearchConfig(p=1, q=1, margins=(1e-1, 1e-2), iterations=300, restarts=1, seed=11)
    t1 = maximize_area(cfg)
    t2 = maximize_area(cfg)
    assert t1.best_curve == t2.best_curve


def test_boundary_sweep_monotone_disc():
    rows = boundary_sweep(1, 1, [1e-1, 1e-2, 1e-3, 1e-4])
    eps = [r[0] for r in rows]
    areas = [r[1] for r in rows]
    assert eps == sorted(eps, reverse=True)
    assert all(a2 > a1 for a1, a2 in zip(areas, areas[1:]))
    assert areas[-1] >= np.pi - 0.01
    assert all(a < np.pi for a in areas)


def test_boundary_sweep_single_row_and_validation():
    rows = boundary_sweep(1, 1, [0.25])
    assert len(rows) == 1
    assert 0.0 < rows[0][1] < np.pi
    with pytest.raises(ValueError):
        boundary_sweep(1, 1, [0.7])
    with pytest.raises(ValueError):
        boundary_sweep(1, 1, [])


def test_boundary_sweep_rank_two():
    rows = boundary_sweep(2, 2, [1e-2, 1e-4])
    assert rows[-1][1] >= 2 * np.pi - 0.05


def test_bound_check_disc(rng):
    tris = [random_triangle(rng, 1, 1, 0.95) for _ in range(200)]
    worst = bound_check(tris)
    assert worst > 0.0


def test_bound_check_matrix(rng):
    tris = [random_triangle(rng, 2, 2, 0.9) for _ in range(50)]
    assert bound_check(tris) > 0.0


def test_bound_check_degenerate_margin():
    z = [[0.0]]
    tris = [(z, [[0.3]], [[0.6]])]
    assert bound_check(tris) == pytest.approx(np.pi, abs=1e-12)


def test_bound_check_empty():
    with pytest.raises(ValueError):
        bound_check([])


def test_bound_violation_carries_triangle():
    err = BoundViolationError("x", triangle=([[0.0]],))
    assert err.triangle is not None


def test_equality_diagnostics_trends():
    cfg = SearchConfig(p=1, q=1, margins=(1e-1, 1e-2, 1e-3), iterations=800, restarts=1, seed=2)
    trace = maximize_area(cfg)
    report = equality_diagnostics(trace)
    assert len(report.rows) == 3
    assert report.areas_grow
    assert report.defects_shrink
    assert report.final_gap >= 0.0
    d = report.to_dict()
    assert {"rows", "final_gap", "defects_shrink", "areas_grow"} <= set(d)


def test_equality_diagnostics_trivial_trace():
    cfg = SearchConfig(p=1, q=1, margins=(0.2,), iterations=0, restarts=1, seed=9)
    trace = maximize_area(cfg)
    report = equality_diagnostics(trace)
    assert len(report.rows) == 1
    assert report.rows[0][2] >= 0.2 - 1e-12  # defect of the random start
