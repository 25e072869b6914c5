import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odplan.coverage import CoverageModel, InfeasibleError, build_coverage, is_feasible
from odplan.geometry import Obstacle, build_grid
from odplan.ghod import _gain, _initial_gains, best_candidate, ghod_plan, layer_target
from odplan.propagation import RadioParams

from instances import DESK, desk_instance, desk_model, radio_for_range
from oracles import min_double_cover


def test_three_by_three_needs_two():
    env = build_grid(0, 0, 3, 3, 1)
    p = RadioParams(threshold=-50, d_ap_min=1)
    m = CoverageModel(env, (), p)
    sol = ghod_plan(m)
    assert len(sol) == 2 and is_feasible(sol, m).ok
    assert min_double_cover(env, (), p) == 2


def test_best_candidate_tie_break_and_max():
    env = build_grid(0, 0, 12, 1, 1)
    m = CoverageModel(env, (), radio_for_range(2.0, 0.5))
    count = m.zeros()
    assert best_candidate([7], m, count, 1) == 7
    # interior points cover 5 cells, edge points 3: all interior tie
    assert best_candidate([0, 9, 4, 6], m, count, 1) == 4
    count[0:3] = 1  # 1 (and 2) now only gain on their right
    assert best_candidate([1, 5, 7], m, count, 1) == 5


def test_best_candidate_empty():
    m = CoverageModel(build_grid(0, 0, 5, 5, 1), (), DESK)
    with pytest.raises(ValueError):
        best_candidate([], m, m.zeros(), 1)


@pytest.mark.parametrize("i", range(6))
def test_fft_gains_equal_windowed_gains(i):
    m = desk_model(0)
    rng = np.random.default_rng(i)
    count = rng.integers(0, 3, m.shape).astype(np.int32)
    target = layer_target(m, count, 1 + i % 2)
    idx, gains = _initial_gains(m, target, m.candidates)
    assert gains.tolist() == [_gain(m, target, g) for g in idx]


def test_desk_plans_are_feasible_and_deterministic():
    for i in range(6):
        m = desk_instance(i)
        a, b = ghod_plan(m), ghod_plan(m)
        assert a == b
        assert is_feasible(a, m).ok


def test_candidate_stride():
    m = desk_model(0)
    sol = ghod_plan(m, candidate_stride=3)
    assert is_feasible(sol, m).ok
    with pytest.raises(ValueError):
        ghod_plan(m, candidate_stride=0)


def test_desk_sub_instance_within_oracle_plus_two():
    # 12 x 8 m corner of the empty desk hall at the desk radio
    env = build_grid(0, 0, 12, 8, 1)
    p = RadioParams(threshold=-50, d_ap_min=5)
    m = CoverageModel(env, (), p)
    opt = min_double_cover(env, (), p)
    assert opt <= len(ghod_plan(m)) <= opt + 2


def test_boundary_only_places_on_walls():
    env = build_grid(0, 0, 10, 10, 0.5, boundary_only=True)
    p = radio_for_range(10.6, 5.0)
    m = CoverageModel(env, (), p)
    sol = ghod_plan(m)
    assert is_feasible(sol, m).ok
    assert all(m.env.perimeter_mask().flat[g] for g in sol)


def test_stuck_layer_raises_with_point():
    # a wall of heavy racks isolates a one-column strip that nobody can reach
    env = build_grid(0, 0, 12, 3, 1)
    walls = [Obstacle(9.5, -1, 10.5, 4, loss=100.0)]
    m = CoverageModel(env, walls, RadioParams(threshold=-50, d_ap_min=5))
    with pytest.raises(InfeasibleError) as err:
        ghod_plan(m)
    assert err.value.gp is not None


@settings(max_examples=100, deadline=None)
@given(nx=st.integers(3, 25), ny=st.integers(3, 25), d_max=st.floats(2.0, 10.0),
       ratio=st.floats(0.05, 0.49))
def test_second_layer_never_stalls_on_empty_rooms(nx, ny, d_max, ratio):
    env = build_grid(0, 0, nx, ny, 1)
    m = CoverageModel(env, (), radio_for_range(d_max, d_max * ratio))
    sol = ghod_plan(m)
    assert is_feasible(sol, m).ok
    assert build_coverage(sol, m).count.min() >= 2
