import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odplan.geometry import Obstacle, build_grid
from odplan.propagation import (
    RadioParams,
    covers,
    max_range,
    obstacle_loss,
    path_loss,
    received_power,
)

P = RadioParams()


def test_path_loss_examples():
    assert path_loss(1, 0, P) == pytest.approx(39.87, abs=1e-12)
    assert path_loss(10, 0, P) == pytest.approx(57.67, abs=1e-9)
    assert path_loss(10, 7.37, P) == pytest.approx(65.04, abs=1e-9)


def test_path_loss_clamps_below_one_meter():
    assert path_loss(0.0, 0, P) == path_loss(1.0, 0, P)
    assert path_loss(np.array([0.2, 1, 10]), 0, P).tolist() == pytest.approx([39.87, 39.87, 57.67])


def test_max_range_table2():
    # exact value of 10 ** (14.41 / 17.8)
    assert max_range(P) == pytest.approx(160.96875055, abs=1e-6)


def test_max_range_desk_radio():
    assert max_range(RadioParams(threshold=-50)) == pytest.approx(15.6858, abs=1e-4)


def test_max_range_unit_when_threshold_is_peak():
    q = RadioParams(threshold=P.peak_power, d_ap_min=0.4)
    assert max_range(q) == pytest.approx(1.0, abs=1e-12)


def test_eq11_enforced():
    with pytest.raises(ValueError, match=r"90.*80\.48"):
        RadioParams(d_ap_min=90)
    RadioParams(d_ap_min=90, check=False)


@pytest.mark.parametrize("kw", [{"n": 0}, {"tp_max": math.inf}, {"d_ap_min": 0}])
def test_radio_validation(kw):
    with pytest.raises(ValueError):
        RadioParams(**kw)


def test_obstacle_loss_sums():
    assert obstacle_loss((0, 0), (10, 0), []) == 0
    rack = Obstacle(4, -1, 6, 1)
    assert obstacle_loss((0, 0), (10, 0), [rack]) == pytest.approx(7.37)
    assert obstacle_loss((0, 0), (10, 0), [rack, Obstacle(5, -1, 7, 1)]) == pytest.approx(14.74)


def test_received_power_examples():
    env = build_grid(0, 0, 20, 5, 1)
    g = 0  # (0, 0)
    assert received_power(g, (10, 0), env, [], P) == pytest.approx(-46.52, abs=1e-9)
    assert received_power(g, (1, 0), env, [], P) == pytest.approx(-28.72, abs=1e-9)
    rack = Obstacle(4, -1, 6, 1)
    assert received_power(g, (10, 0), env, [rack], P) == pytest.approx(-53.89, abs=1e-9)


def test_covers_threshold_inclusive():
    env = build_grid(0, 0, 20, 5, 1)
    assert covers(0, (10, 0), env, [], P)
    edge = RadioParams(threshold=P.peak_power - 17.8, d_ap_min=4)  # exactly 10 m
    assert covers(0, (10, 0), env, [], edge)
    assert not covers(0, (10.001, 0), env, [], edge)


@settings(max_examples=200, deadline=None)
@given(d=st.floats(1, 1e4), dd=st.floats(1e-3, 100), ol=st.floats(0, 50), dol=st.floats(1e-3, 20))
def test_path_loss_monotone(d, dd, ol, dol):
    assert path_loss(d + dd, ol, P) > path_loss(d, ol, P)
    assert path_loss(d, ol + dol, P) > path_loss(d, ol, P)


@settings(max_examples=200, deadline=None)
@given(thld=st.floats(-90, -45), x=st.floats(0, 200), y=st.floats(0, 200))
def test_covers_iff_within_range(thld, x, y):
    q = RadioParams(threshold=thld, check=False)
    env = build_grid(0, 0, 1, 1, 1)
    d = math.hypot(x, y)
    if abs(d - q.max_range) < 1e-6:
        return
    assert covers(0, (x, y), env, [], q) == (max(d, 1.0) <= q.max_range)


@settings(max_examples=200, deadline=None)
@given(thld=st.floats(-95, -30))
def test_range_round_trip(thld):
    q = RadioParams(threshold=thld, check=False)
    assert path_loss(q.max_range, 0, q) == pytest.approx(q.tp_max + q.gain - q.margin - thld, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.permutations([Obstacle(4, -1, 6, 1, loss=7.37), Obstacle(5, -2, 7, 2, loss=3.1),
                        Obstacle(0, 5, 1, 6, loss=20.0), Obstacle(8, -1, 9, 0.5, loss=1.25)]))
def test_obstacle_loss_order_independent(obs):
    assert obstacle_loss((0, 0), (10, 0), obs) == pytest.approx(7.37 + 3.1 + 1.25, abs=1e-12)
