import io
import math

import numpy as np
import pytest

from oracles import brute_force_pieces, census_count
from pwlboundary.arrangement import (
    ShlNetwork,
    boundary_facets,
    classify_cells,
    count_boundary_facets,
    enumerate_cells,
    is_general_position,
    random_hyperplanes,
    read_cells_csv,
    sample_generic_hyperplanes,
    theorem5_experiment,
    theorem5_witness,
    write_cells_csv,
)
from pwlboundary.bounds import cone_like_count, regions_max
from pwlboundary.errors import DegenerateBoundaryError
from pwlboundary.geometry import AffineUnit, stack_units

THREE_LINES = [AffineUnit([1, 0], 0), AffineUnit([0, 1], 0), AffineUnit([1, 1], -1)]


def lines(*rows):
    return [AffineUnit(r[:-1], r[-1]) for r in rows]


def test_enumerate_examples():
    assert len(enumerate_cells(lines((1, 0, 0)))) == 2
    assert len(enumerate_cells(THREE_LINES)) == 7
    assert len(enumerate_cells(lines((1, 0, 0), (1, 0, -1)))) == 3


def test_classify_examples():
    cells = enumerate_cells(THREE_LINES)
    assert classify_cells(cells, THREE_LINES) == (1, 6)
    one = lines((1, 2, 3, 0.5))
    assert classify_cells(enumerate_cells(one), one) == (0, 2)
    four = lines((1, 0, 0), (0, 1, 0), (1, 1, -1), (1, -1, -0.3))
    assert is_general_position(four)
    assert classify_cells(enumerate_cells(four), four) == (3, 8)


def test_classify_without_stored_flags():
    cells = enumerate_cells(THREE_LINES, classify=False)
    assert all(c.bounded is None for c in cells)
    assert classify_cells(cells, THREE_LINES) == (1, 6)


def test_general_position_examples():
    assert is_general_position(lines((1, 0, 0), (0, 1, 0)))
    assert not is_general_position(lines((1, 0, 0), (1, 0, -1)))
    assert not is_general_position(lines((1, 0, 0), (0, 1, 0), (1, 1, 0)))
    assert is_general_position(THREE_LINES)


def test_enumerate_errors():
    with pytest.raises(ValueError):
        enumerate_cells(lines((0, 0, 1)))
    with pytest.raises(ValueError):
        enumerate_cells([AffineUnit(np.ones(7), 0)])
    with pytest.raises(ValueError):
        enumerate_cells(random_hyperplanes(2, 21, np.random.default_rng(0)))
    with pytest.raises(ValueError):
        enumerate_cells([])


def _cases(seeds, ms=range(1, 8)):
    for d in (2, 3):
        for m in ms:
            for seed in seeds:
                yield d, m, seed


@pytest.mark.parametrize("d", [2, 3])
def test_census_matches_over_twenty_seeds(d):
    bad = []
    for m in range(1, 7):
        for seed in range(100, 120):
            H = random_hyperplanes(d, m, np.random.default_rng(seed))
            if len(enumerate_cells(H, classify=False)) != census_count(H):
                bad.append((m, seed))
    assert not bad


def test_census_matches_degenerate_arrangements():
    # parallel families and concurrent triples
    cases = [
        lines((1, 0, 0), (1, 0, -1), (1, 0, 1), (0, 1, 0)),
        lines((1, 0, 0), (0, 1, 0), (1, 1, 0), (1, -1, 0)),
        lines((1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0), (0, 0, 1, -1)),
    ]
    for H in cases:
        assert not is_general_position(H)
        n = len(enumerate_cells(H))
        assert n == census_count(H) < regions_max(H[0].dim, len(H))


@pytest.mark.parametrize("d", [2, 3])
def test_generic_counts_up_to_eight(d):
    for m in range(1, 9):
        H = sample_generic_hyperplanes(d, m, np.random.default_rng(m))
        cells = enumerate_cells(H)
        assert len(cells) == regions_max(d, m)
        assert classify_cells(cells, H) == (math.comb(m - 1, d), cone_like_count(d, m))


def test_witnesses_reproduce_signs_with_margin():
    for d, m, seed in _cases(range(3)):
        H = random_hyperplanes(d, m, np.random.default_rng(seed))
        W, b = stack_units(H)
        Wn = W / np.linalg.norm(W, axis=1, keepdims=True)
        bn = b / np.linalg.norm(W, axis=1)
        cells = enumerate_cells(H)
        assert len({c.signs for c in cells}) == len(cells)
        for c in cells:
            z = np.array(c.signs) * (Wn @ c.witness + bn)
            assert z.min() >= 1e-7


def test_diamond_facets():
    units = lines((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))
    net = ShlNetwork(units, np.ones(4), -1.0)
    assert count_boundary_facets(net) == 4


def test_flat_zero_region_is_an_error():
    net = ShlNetwork(lines((1, 0, -1)), [1.0], 0.0)
    with pytest.raises(DegenerateBoundaryError, match="degenerate boundary"):
        count_boundary_facets(net)


def test_witness_with_very_negative_offset():
    net = ShlNetwork(THREE_LINES, np.ones(3), -1e6)
    assert count_boundary_facets(net) >= cone_like_count(2, 3) - 1


def test_collinear_pieces_merge():
    # f = |x| - 1; the plane y = -5 cuts each line x = +-1 into two pieces that merge
    net = ShlNetwork(lines((1, 0, 0), (-1, 0, 0), (0, 1, 5)), [1.0, 1.0, 0.0], -1.0)
    assert count_boundary_facets(net) == 2
    assert sorted(f.pieces for f in boundary_facets(net)) == [2, 2]


@pytest.mark.parametrize("d,m", [(2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (3, 6)])
def test_facets_against_brute_force_pieces(d, m):
    for seed in range(3):
        H = sample_generic_hyperplanes(d, m, np.random.default_rng(seed))
        net = theorem5_witness(H)
        fs = boundary_facets(net)
        # generic witness nets have no coplanar pieces to merge
        assert sum(f.pieces for f in fs) == brute_force_pieces(H, net.a, net.c)
        assert len(fs) <= regions_max(d, m)


def test_random_nets_stay_below_region_bound():
    rng = np.random.default_rng(5)
    for _ in range(15):
        d = int(rng.integers(2, 4))
        m = int(rng.integers(2, 7))
        H = random_hyperplanes(d, m, rng)
        net = ShlNetwork(H, rng.normal(size=m), float(rng.normal()))
        try:
            n = count_boundary_facets(net)
        except DegenerateBoundaryError:
            continue
        assert n <= regions_max(d, m)


def test_witness_facet_experiment_examples():
    for d, m, seed, lo, hi in [(2, 3, 7, 5, 7), (2, 4, 7, 7, 11), (3, 4, 1, 13, 15)]:
        r = theorem5_experiment(d, m, seed)
        assert (r.lower, r.upper) == (lo, hi)
        assert r.passed


def test_cells_csv_round_trip():
    cells = enumerate_cells(THREE_LINES)
    buf = io.StringIO()
    write_cells_csv(cells, buf)
    lines_out = buf.getvalue().splitlines()
    assert lines_out[0] == "s1,s2,s3,x1,x2,bounded"
    assert len(lines_out) == 8


def test_cells_csv_file(tmp_path):
    cells = enumerate_cells(THREE_LINES)
    p = tmp_path / "cells.csv"
    write_cells_csv(cells, p)
    back = read_cells_csv(p)
    assert [c.signs for c in back] == [c.signs for c in cells]
    assert all(np.array_equal(a.witness, b.witness) for a, b in zip(cells, back))
    assert [c.bounded for c in back] == [c.bounded for c in cells]
