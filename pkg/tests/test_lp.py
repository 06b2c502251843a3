import numpy as np
import pytest

from pwlboundary.lp import max_margin_point, maximize


def test_maximize_statuses():
    r = maximize([1, 1], [[1, 0], [0, 1]], [2, 3])
    assert r.optimal and r.value == pytest.approx(5)
    assert maximize([1, 0], [[-1, 0]], [0]).status == "unbounded"
    assert maximize([0, 0], [[1, 0], [-1, 0]], [-1, -1]).status == "infeasible"


def test_maximize_equality_and_bounds():
    r = maximize([1, 1], A_eq=[[1, -1]], b_eq=[0], bounds=[(-1, 1), (-1, 1)])
    assert r.optimal and r.value == pytest.approx(2)
    assert np.allclose(r.x, [1, 1])


def test_max_margin_point_square():
    # |x| <= 1, |y| <= 1 written as w.x + b >= t with unit rows
    A = np.array([[-1, 0], [1, 0], [0, -1], [0, 1]], float)
    b = np.ones(4)
    r = max_margin_point(A, b)
    assert r.value == pytest.approx(1.0)
    assert np.allclose(r.x, 0, atol=1e-9)


def test_max_margin_caps_unbounded_cells():
    r = max_margin_point(np.array([[1.0, 0.0]]), np.array([0.0]), cap=1.0)
    assert r.value == pytest.approx(1.0)
    assert r.x[0] >= 1 - 1e-9


def test_max_margin_empty_region():
    A = np.array([[1.0], [-1.0]])
    r = max_margin_point(A, np.array([-2.0, 1.0]))
    assert not r.optimal or r.value < 0
