from fractions import Fraction

import pytest

from cubepack.census import ResourceGuardError, finite_N_census
from cubepack.discrete import (
    blocking_class_key,
    blocking_counts,
    finite_census,
    grid_overlaps,
    grid_positions,
    min_maximal_packing,
    symmetry_group,
)
from cubepack.model import CUBE, TORUS


def test_grid_overlaps_torus():
    assert grid_overlaps((0, 0), (1, 3), 2, TORUS)
    assert not grid_overlaps((0, 0), (2, 1), 2, TORUS)
    assert not grid_overlaps((0, 0), (0, 2), 2, TORUS)


def test_grid_overlaps_cube():
    assert grid_overlaps((0,), (1,), 2, CUBE)
    assert not grid_overlaps((0,), (2,), 2, CUBE)
    assert grid_overlaps((1,), (2,), 2, CUBE)


def test_symmetry_group_sizes():
    assert symmetry_group(1, 2, TORUS).shape == (8, 4)
    assert symmetry_group(2, 2, TORUS).shape == (128, 16)
    assert symmetry_group(2, 2, CUBE).shape == (8, 9)


def test_blocking_counts():
    counts = blocking_counts([(0, 0), (2, 2), (0, 2)], 2, TORUS)
    assert counts[0][1] == 2 and counts[0][2] == 1 and counts[1][2] == 1


def test_blocking_class_key_invariance():
    a = blocking_class_key([(0, 0), (2, 2)], 2, 2, TORUS)
    b = blocking_class_key([(1, 3), (3, 1)], 2, 2, TORUS)
    assert a == b


def test_finite_census_torus_table_counts():
    for n, tilings, packings in ((1, 1, 0), (2, 2, 0), (3, 8, 1)):
        recs = finite_N_census(n, 2)
        til = [r for r in recs if r.m == 2 ** n]
        non = [r for r in recs if r.m < 2 ** n]
        assert len(til) == tilings
        assert len(non) == packings
        assert sum(r.prob for r in recs) == 1
        assert min(r.m for r in recs) == (2, 4, 4)[n - 1]


def test_finite_census_torus_n3_packing_class():
    recs = finite_N_census(3, 2)
    non = [r for r in recs if r.m < 8]
    assert len(non) == 1 and non[0].m == 4 and non[0].nparams == 6


def test_finite_census_cube_line():
    recs = finite_census(1, 2, CUBE)
    assert [(r.m, r.prob) for r in recs] == [
        (2, Fraction(2, 3)),
        (1, Fraction(1, 3)),
    ]
    recs = finite_census(1, 10, CUBE)
    mean = sum(r.prob * r.m for r in recs)
    assert mean == Fraction(13, 11)


def test_finite_census_torus_line_always_tiles():
    for N in (2, 3, 5):
        recs = finite_census(1, N, TORUS)
        assert len(recs) == 1 and recs[0].m == 2 and recs[0].prob == 1


def test_finite_census_guard():
    with pytest.raises(ResourceGuardError):
        finite_census(3, 3, TORUS)


def test_min_maximal_packing_small():
    size, witness = min_maximal_packing(1, 2)
    assert size == 2
    size, witness = min_maximal_packing(2, 2)
    assert size == 4
    size, witness = min_maximal_packing(3, 2)
    assert size == 4
    assert len(witness) == 4
    for i, a in enumerate(witness):
        for b in witness[i + 1:]:
            assert not grid_overlaps(a, b, 2, TORUS)


def test_min_maximal_packing_requires_half_grid():
    with pytest.raises(ValueError):
        min_maximal_packing(2, 3)


def test_min_maximal_packing_guard():
    with pytest.raises(ResourceGuardError):
        min_maximal_packing(5, 2)
