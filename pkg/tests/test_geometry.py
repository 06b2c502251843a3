import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pwlboundary.errors import EmptyPolytopeWarning, NearDuplicateWarning
from pwlboundary.geometry import (
    AffineUnit,
    MaxoutClassifier,
    boundary_sign_probe,
    eval_maxout,
    irreducible,
    load_units_csv,
    redundant_units,
    save_units_csv,
)

SQUARE = [([1, 0], -1), ([-1, 0], -1), ([0, 1], -1), ([0, -1], -1)]
DIAMOND = MaxoutClassifier([AffineUnit(w, -1) for w in ([1, 1], [1, -1], [-1, 1], [-1, -1])])


def clf(rows):
    return MaxoutClassifier([AffineUnit(w, b) for w, b in rows])


def test_eval_examples():
    c = clf([([1, 0], 0), ([-1, 0], 0)])
    assert eval_maxout(c, [3, 4], return_index=True) == (3.0, 0)
    assert eval_maxout(clf([([0, 0], -1)]), [7.5, -2]) == -1.0
    c = clf([([1, 0], 0), ([-1, 0], 0), ([0, 1], 0), ([0, -1], 0)])
    assert eval_maxout(c, [0.5, -0.8]) == pytest.approx(0.8)


def test_eval_ties_pick_lowest_index():
    c = clf([([1, 0], 0), ([1, 0], 0), ([0, 1], 0)])
    assert eval_maxout(c, [1, 1], return_index=True)[1] == 0


def test_eval_batch_matches_points():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(50, 2))
    v = eval_maxout(DIAMOND, X)
    assert np.array_equal(v, [eval_maxout(DIAMOND, x) for x in X])


def test_eval_errors():
    with pytest.raises(ValueError):
        eval_maxout(DIAMOND, [1, 2, 3])
    with pytest.raises(ValueError):
        eval_maxout(DIAMOND, [np.nan, 0])
    with pytest.raises(ValueError):
        MaxoutClassifier([AffineUnit([1, 0], 0), AffineUnit([1], 0)])
    with pytest.raises(ValueError):
        AffineUnit([np.inf, 0], 0)


def test_degenerate_flag():
    assert AffineUnit([0, 0], 1).degenerate
    assert not AffineUnit([0, 1e-300], 1).degenerate


def test_sign_probe():
    assert boundary_sign_probe(DIAMOND, [1, 0], 1e-9) == "boundary"
    assert boundary_sign_probe(DIAMOND, [0, 0], 1e-9) == "negative"
    assert boundary_sign_probe(DIAMOND, [2, 0], 1e-9) == "positive"
    with pytest.raises(ValueError):
        boundary_sign_probe(DIAMOND, [0, 0], 0.0)


def test_redundant_square_is_irreducible():
    assert redundant_units(clf(SQUARE)) == set()


def test_redundant_slack_halfspace():
    assert redundant_units(clf(SQUARE + [([1, 0], -2)])) == {4}


def _grid_signs(c, lim=3.0, n=241):
    ax = np.linspace(-lim, lim, n)
    X = np.stack(np.meshgrid(ax, ax), -1).reshape(-1, 2)
    return eval_maxout(c, X) <= 0


def test_redundant_duplicates_keep_lowest_index():
    c = clf([([1, 0], -1), ([1, 0], -1), ([-1, 0], -1)])
    red = redundant_units(c)
    assert red == {1}
    # same negative set on a grid after removal
    assert np.array_equal(_grid_signs(c), _grid_signs(c.without(red)))


def test_near_duplicate_warns():
    c = clf([([1, 0], -1), ([1, 1e-12], -1), ([-1, 0], -1)])
    with pytest.warns(NearDuplicateWarning):
        red = redundant_units(c)
    assert red == {1}


def test_zero_weight_units():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert redundant_units(clf(SQUARE + [([0, 0], -3)])) == {4}
    with pytest.warns(EmptyPolytopeWarning):
        red = redundant_units(clf(SQUARE + [([0, 0], 0.5)]))
    assert red == {0, 1, 2, 3}


def test_redundant_needs_two_units():
    with pytest.raises(ValueError):
        redundant_units(clf([([1, 0], 0)]))


def test_unbounded_leave_one_out_is_not_redundant():
    # halfplane x <= 0 together with y <= 0: neither implies the other
    assert redundant_units(clf([([1, 0], 0), ([0, 1], 0)])) == set()


def _random_classifier(seed, m=9, d=2):
    rng = np.random.default_rng(seed)
    W = rng.normal(size=(m, d))
    b = -rng.uniform(0.2, 1.5, m)
    return MaxoutClassifier([AffineUnit(w, bi) for w, bi in zip(W, b)])


@pytest.mark.parametrize("seed", range(8))
def test_removal_preserves_sign_and_is_idempotent(seed):
    c = _random_classifier(seed)
    red = redundant_units(c)
    reduced = c.without(red)
    X = np.random.default_rng(100 + seed).uniform(-5, 5, size=(10_000, 2))
    before = eval_maxout(c, X)
    after = eval_maxout(reduced, X)
    sure = np.abs(before) > 1e-9
    assert np.array_equal(before[sure] <= 0, after[sure] <= 0)
    if reduced.m >= 2:
        assert redundant_units(reduced) == set()


def test_irreducible_helper():
    assert irreducible(clf(SQUARE + [([1, 0], -2)])).m == 4


finite = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(
    W=arrays(float, (5, 3), elements=finite),
    b=arrays(float, 5, elements=finite),
    x=arrays(float, 3, elements=finite),
)
def test_max_dominates_every_unit(W, b, x):
    c = MaxoutClassifier([AffineUnit(w, bi) for w, bi in zip(W, b)])
    v, k = eval_maxout(c, x, return_index=True)
    z = W @ x + b
    assert np.all(v >= z)
    assert v == z[k]


@settings(max_examples=200, deadline=None)
@given(
    W=arrays(float, (4, 2), elements=finite),
    b=arrays(float, 4, elements=finite),
    x=arrays(float, 2, elements=finite),
    y=arrays(float, 2, elements=finite),
    lam=st.floats(0, 1),
)
def test_convexity(W, b, x, y, lam):
    c = MaxoutClassifier([AffineUnit(w, bi) for w, bi in zip(W, b)])
    lhs = eval_maxout(c, lam * x + (1 - lam) * y)
    rhs = lam * eval_maxout(c, x) + (1 - lam) * eval_maxout(c, y)
    assert lhs <= rhs + 1e-12 * max(1.0, abs(rhs)) * 100


def test_csv_round_trip(tmp_path):
    units = [AffineUnit([0.1, -1 / 3], 2 / 7), AffineUnit([1e-17, 5.0], -1.0)]
    p = tmp_path / "units.csv"
    save_units_csv(units, p)
    back = load_units_csv(p)
    assert all(np.array_equal(u.w, v.w) and u.b == v.b for u, v in zip(units, back))


def test_csv_comments_and_errors(tmp_path):
    p = tmp_path / "u.csv"
    p.write_text("# header\n1,0,-1\n\n# note\n0,1,-1\n")
    assert len(load_units_csv(p)) == 2
    p.write_text("1,0,-1\n1,x,2\n")
    with pytest.raises(ValueError, match="row 2"):
        load_units_csv(p)
    p.write_text("1,0,-1\n1,2\n")
    with pytest.raises(ValueError, match="row 2"):
        load_units_csv(p)
    p.write_text("# nothing\n")
    with pytest.raises(ValueError):
        load_units_csv(p)
