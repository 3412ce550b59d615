"""Core representation: coordinates, overlap, validation, phi, JSON."""

import random
from fractions import Fraction

import pytest

from cubepack.model import (
    CUBE,
    ONE,
    TORUS,
    ZERO,
    DimensionError,
    GridError,
    InvalidDiscretePackingError,
    dumps,
    empty_packing,
    format_cube,
    is_tiling,
    literal,
    load_file,
    loads,
    make_packing,
    normalize_params,
    opposite,
    overlaps,
    param_of,
    phi,
    phi_grid,
    save_file,
    shift_of,
    validate,
)

T = literal  # shorthand: T(i) is t_{i+1}, T(i, 1) is t_{i+1}+1


def test_literal_codes_round_trip():
    for q in range(5):
        for s in (0, 1):
            code = literal(q, s)
            assert param_of(code) == q
            assert shift_of(code) == s
            assert opposite(code) == literal(q, 1 - s)
    assert opposite(ZERO) == ONE
    assert opposite(ONE) == ZERO


def test_opposite_literals_block_overlap():
    # (t1, t2, t3) and (t1+1, t4, t5) are blocked in the first coordinate
    a = (T(0), T(1), T(2))
    b = (T(0, 1), T(3), T(4))
    assert not overlaps(a, b, TORUS)
    assert not overlaps((T(0), T(1)), (T(0), T(1, 1)), TORUS)
    assert overlaps((T(0), T(1)), (T(2), T(3)), TORUS)
    assert overlaps(a, a, TORUS)


def test_boundary_pair_blocks_overlap_in_cube_space():
    assert not overlaps((ZERO, T(0)), (ONE, T(1)), CUBE)
    assert overlaps((ZERO, T(0)), (ZERO, T(1)), CUBE)
    assert overlaps((T(0), T(1)), (T(2), T(3)), CUBE)


def test_overlap_requires_equal_dimension():
    with pytest.raises(DimensionError):
        overlaps((T(0),), (T(1), T(2)), TORUS)


def test_validate_accepts_torus_packing():
    p = make_packing(TORUS, 3, [(T(0), T(1), T(2)), (T(0, 1), T(3), T(4))])
    assert validate(p) is None
    assert p.m == 2
    assert p.nparams == 5


def test_validate_rejects_overlapping_cubes():
    p = make_packing(TORUS, 2, [(T(0), T(1)), (T(2), T(3))])
    v = validate(p)
    assert v is not None
    assert v.kind == "overlap"
    assert v.cubes == (0, 1)


def test_validate_rejects_param_in_two_coordinates():
    p = make_packing(TORUS, 2, [(T(0), T(1)), (T(1), T(0, 1))])
    v = validate(p)
    assert v is not None
    assert v.kind == "param-coordinate"


def test_validate_rejects_shifted_literal_in_cube_space():
    p = make_packing(CUBE, 1, [(T(0, 1),)])
    v = validate(p)
    assert v is not None
    assert v.kind == "coordinate-space"


def test_validate_rejects_boundary_code_on_torus():
    p = make_packing(TORUS, 1, [(ZERO,)])
    v = validate(p)
    assert v is not None
    assert v.kind == "coordinate-space"


def test_tiling_is_full_count():
    p = make_packing(TORUS, 1, [(T(0),), (T(0, 1),)])
    assert validate(p) is None
    assert is_tiling(p)
    assert not is_tiling(make_packing(TORUS, 1, [(T(0),)]))


def test_phi_identifies_residue_classes_on_torus():
    p = phi([(Fraction(1, 2),), (Fraction(3, 2),)], 4, TORUS)
    assert p.cubes == ((T(0),), (T(0, 1),))


def test_phi_two_dim_example():
    rows = [(Fraction(1, 4), Fraction(1, 2)), (Fraction(5, 4), Fraction(3, 4))]
    p = phi(rows, 4, TORUS)
    assert p.cubes == ((T(0), T(1)), (T(0, 1), T(2)))
    assert validate(p) is None


def test_phi_cube_space_boundaries_and_interior():
    p = phi([(0,), (1,)], 4, CUBE)
    assert p.cubes == ((ZERO,), (ONE,))
    q = phi([(Fraction(1, 4),)], 4, CUBE)
    assert q.cubes == ((T(0),),)


def test_phi_rejects_off_grid_coordinates():
    with pytest.raises(GridError):
        phi([(Fraction(1, 3),)], 4, TORUS)


def test_phi_rejects_overlapping_discrete_cubes():
    with pytest.raises(InvalidDiscretePackingError):
        phi([(0, 0), (Fraction(1, 4), Fraction(1, 2))], 4, CUBE)
    with pytest.raises(InvalidDiscretePackingError):
        phi([(0,), (Fraction(1, 2),)], 2, TORUS)


def test_phi_rejects_cube_anchor_outside_unit_box():
    with pytest.raises(InvalidDiscretePackingError):
        phi_grid([(5,)], 4, CUBE)


def test_phi_grid_wraps_torus_indices():
    p = phi_grid([(9,)], 4, TORUS)
    q = phi_grid([(1,)], 4, TORUS)
    assert p.cubes == q.cubes


def test_phi_output_always_validates():
    rng = random.Random(7)
    for _ in range(50):
        N = rng.randint(1, 5)
        dim = rng.randint(1, 3)
        rows = []
        for _ in range(rng.randint(1, 4)):
            cand = tuple(rng.randrange(2 * N) for _ in range(dim))
            ok = all(
                any((cand[j] - r[j]) % (2 * N) == N for j in range(dim))
                for r in rows
            )
            if ok:
                rows.append(cand)
        p = phi_grid(rows, N, TORUS)
        assert validate(p) is None


def test_normalize_params_renumbers_densely():
    p = make_packing(TORUS, 2, [(T(5), T(7)), (T(5, 1), T(9))])
    q = normalize_params(p)
    assert q.cubes == ((T(0), T(1)), (T(0, 1), T(2)))


def test_json_round_trip():
    p = make_packing(CUBE, 3, [(ZERO, T(0), ONE), (ONE, T(1), T(2))])
    assert loads(dumps(p)) == p
    q = make_packing(TORUS, 2, [(T(0), T(1)), (T(0, 1), T(2))])
    assert loads(dumps(q, indent=2)) == q


def test_json_file_round_trip(tmp_path):
    p = make_packing(TORUS, 2, [(T(0), T(1)), (T(0, 1), T(2))])
    path = tmp_path / "packing.json"
    save_file(p, path)
    assert load_file(path) == p


def test_format_cube_shows_shifts_and_boundaries():
    assert format_cube((T(0), T(1, 1), ZERO)) == "(t1, t2+1, 0)"
    assert format_cube((ONE,)) == "(1)"
