"""Combinatorial cube packings on the torus R^n/2Z^n and the cube [0,2]^n.

A packing is a family of unit cubes whose corner coordinates are symbolic:
on the torus every coordinate is a parameter literal (t or t+1), in the cube
case a coordinate is 0, 1, or an interior parameter.  Two cubes may coexist
exactly when some coordinate separates them by 1.
"""

import json
from dataclasses import dataclass
from fractions import Fraction

TORUS = "torus"
CUBE = "cube"

# Coordinate codes: the literal with parameter p and shift s is 2*p + s
# (shift 0 reads "t", shift 1 reads "t+1"); the boundary coordinates of the
# cube space are negative sentinels.  The sentinel values are chosen so that
# ZERO ^ ONE == 1, the same xor signature as an opposite-literal pair.
ZERO = -1
ONE = -2


class DimensionError(ValueError):
    """Cubes or coordinate vectors of mismatched length."""


class GridError(ValueError):
    """A discrete coordinate that is not a multiple of 1/N on the grid."""


class InvalidDiscretePackingError(ValueError):
    """A discrete input whose cubes overlap or leave the allowed region."""


def literal(param, shift=0):
    """Coordinate code for the literal t_param + shift."""
    return 2 * param + shift


def is_literal(code):
    return code >= 0


def param_of(code):
    return code >> 1


def shift_of(code):
    return code & 1


def opposite(code):
    """The blocking partner of a literal or boundary code (t <-> t+1, 0 <-> 1)."""
    return code ^ 1


@dataclass(frozen=True)
class Violation:
    """Structured report of the first packing invariant that fails."""

    kind: str
    detail: str
    cubes: tuple = ()
    coordinate: int | None = None


@dataclass(frozen=True)
class Packing:
    """An ordered family of combinatorial cubes.

    `cubes` is a tuple of coordinate-code tuples, in insertion order (the
    order matters for path statistics; set-level equality is the canonical
    module's job).  `param_coord` lists (param, coordinate) ownership pairs,
    sorted by param; for an invalid packing that reuses a parameter across
    coordinates it records the first coordinate seen.
    """

    space: str
    dim: int
    cubes: tuple
    param_coord: tuple

    @property
    def m(self):
        return len(self.cubes)

    @property
    def nparams(self):
        return len(self.param_coord)


def make_packing(space, dim, cubes):
    """Build a Packing from raw coordinate-code tuples, deriving ownership."""
    owner = {}
    frozen = []
    for cube in cubes:
        frozen.append(tuple(cube))
        for j, code in enumerate(frozen[-1]):
            if is_literal(code):
                owner.setdefault(param_of(code), j)
    return Packing(space, dim, tuple(frozen), tuple(sorted(owner.items())))


def add_cube(p, coords):
    return make_packing(p.space, p.dim, p.cubes + (tuple(coords),))


def empty_packing(space, dim):
    return make_packing(space, dim, ())


def overlaps(a, b, space):
    """Whether two cubes overlap.

    Non-overlap holds iff some coordinate carries a blocking pair: opposite
    literals of one parameter (torus) or the 0/1 boundary pair (cube).  Both
    pairs have xor signature 1 under the coordinate encoding, so the test is
    space-uniform on valid coordinates.
    """
    if len(a) != len(b):
        raise DimensionError(f"cube lengths {len(a)} and {len(b)} differ")
    for x, y in zip(a, b):
        if (x ^ y) == 1:
            return False
    return True


def _coordinate_ok(code, space):
    if space == TORUS:
        return is_literal(code)
    return code in (ZERO, ONE) or (is_literal(code) and shift_of(code) == 0)


def validate(p):
    """Check all Packing invariants; return None if ok, else the first Violation."""
    if p.space not in (TORUS, CUBE):
        return Violation("space", f"unknown space {p.space!r}")
    if p.dim < 1:
        return Violation("dimension", f"dim must be >= 1, got {p.dim}")
    for i, cube in enumerate(p.cubes):
        if len(cube) != p.dim:
            return Violation("dimension", f"cube {i} has length {len(cube)}, expected {p.dim}", cubes=(i,))
        for j, code in enumerate(cube):
            if not _coordinate_ok(code, p.space):
                return Violation("coordinate-space", f"cube {i}, coordinate {j}: code {code} is invalid for {p.space}", cubes=(i,), coordinate=j)
    owner = {}
    for i, cube in enumerate(p.cubes):
        for j, code in enumerate(cube):
            if is_literal(code):
                q = param_of(code)
                if q not in owner:
                    owner[q] = j
                elif owner[q] != j:
                    return Violation("param-coordinate", f"parameter {q} occurs in coordinates {owner[q]} and {j}", coordinate=j)
    for i in range(len(p.cubes)):
        for k in range(i + 1, len(p.cubes)):
            if overlaps(p.cubes[i], p.cubes[k], p.space):
                return Violation("overlap", f"cubes {i} and {k} overlap", cubes=(i, k))
    if len(p.cubes) > 2 ** p.dim:
        return Violation("cube-count", f"{len(p.cubes)} cubes exceed 2^{p.dim}")
    return None


def is_tiling(p):
    return len(p.cubes) == 2 ** p.dim


def coordinate_param_counts(p):
    """Per-coordinate counts of distinct parameters (torus packings only)."""
    if p.space != TORUS:
        raise ValueError("coordinate_param_counts is defined for torus packings")
    counts = [set() for _ in range(p.dim)]
    for cube in p.cubes:
        for j, code in enumerate(cube):
            counts[j].add(param_of(code))
    return tuple(len(s) for s in counts)


def nparams_per_coordinate(p, j):
    seen = set()
    for cube in p.cubes:
        code = cube[j]
        if is_literal(code):
            seen.add(param_of(code))
    return len(seen)


def normalize_params(p):
    """Renumber parameters densely, 0..N-1, in first-occurrence order."""
    remap = {}
    new_cubes = []
    for cube in p.cubes:
        row = []
        for code in cube:
            if is_literal(code):
                q = param_of(code)
                if q not in remap:
                    remap[q] = len(remap)
                row.append(literal(remap[q], shift_of(code)))
            else:
                row.append(code)
        new_cubes.append(tuple(row))
    return make_packing(p.space, p.dim, new_cubes)


def phi_grid(kvecs, N, space):
    """phi on integer grid indices (coordinate value k means k/N).

    Torus indices are taken mod 2N; cube indices must lie in 0..N.
    """
    n = None
    rows = []
    for vec in kvecs:
        vec = tuple(vec)
        if n is None:
            n = len(vec)
        elif len(vec) != n:
            raise DimensionError("discrete cubes of mixed dimension")
        if space == CUBE:
            for k in vec:
                if not 0 <= k <= N:
                    raise InvalidDiscretePackingError(f"corner {k}/{N} leaves [0,1], cube sticks out of [0,2]")
            rows.append(vec)
        else:
            rows.append(tuple(k % (2 * N) for k in vec))
    if n is None:
        raise DimensionError("empty discrete packing has no dimension")
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if not _grid_nonoverlap(rows[i], rows[j], N, space):
                raise InvalidDiscretePackingError(f"discrete cubes {i} and {j} overlap")
    params = {}
    cubes = []
    for vec in rows:
        row = []
        for j, k in enumerate(vec):
            if space == CUBE:
                if k == 0:
                    row.append(ZERO)
                elif k == N:
                    row.append(ONE)
                else:
                    key = (j, k)
                    if key not in params:
                        params[key] = len(params)
                    row.append(literal(params[key], 0))
            else:
                residue, shift = k % N, k // N
                key = (j, residue)
                if key not in params:
                    params[key] = len(params)
                row.append(literal(params[key], shift))
        cubes.append(tuple(row))
    return make_packing(space, n, cubes)


def _grid_nonoverlap(a, b, N, space):
    if space == CUBE:
        return any({x, y} == {0, N} for x, y in zip(a, b))
    return any((x - y) % (2 * N) == N for x, y in zip(a, b))


def phi(discrete, N, space):
    """Project a discrete packing with corners on the (1/N)-grid to its type.

    Args:
        discrete: sequence of coordinate vectors; entries are Fractions,
            ints, or strings acceptable to Fraction.  Torus values are read
            mod 2, cube values must lie in [0, 1].
        N: grid resolution.
        space: TORUS or CUBE.

    Returns:
        The combinatorial Packing, parameters numbered in first-occurrence
        order: one parameter per (residue class mod 1, coordinate) on the
        torus, one per (interior value, coordinate) in the cube case.
    """
    kvecs = []
    for vec in discrete:
        row = []
        for v in vec:
            k = Fraction(v) * N
            if k.denominator != 1:
                raise GridError(f"coordinate {v} is not a multiple of 1/{N}")
            row.append(int(k))
        kvecs.append(row)
    return phi_grid(kvecs, N, space)


def to_json_obj(p):
    cubes = []
    for cube in p.cubes:
        row = []
        for code in cube:
            if code == ZERO:
                row.append(0)
            elif code == ONE:
                row.append(1)
            else:
                row.append({"p": param_of(code), "s": shift_of(code)})
        cubes.append(row)
    return {"space": p.space, "dim": p.dim, "cubes": cubes}


def from_json_obj(obj):
    space = obj["space"]
    dim = obj["dim"]
    cubes = []
    for row in obj["cubes"]:
        cube = []
        for c in row:
            if c == 0:
                cube.append(ZERO)
            elif c == 1:
                cube.append(ONE)
            elif isinstance(c, dict):
                cube.append(literal(int(c["p"]), int(c["s"])))
            else:
                raise ValueError(f"bad coordinate {c!r} in packing JSON")
        cubes.append(tuple(cube))
    return make_packing(space, dim, cubes)


def dumps(p, indent=None):
    return json.dumps(to_json_obj(p), indent=indent)


def loads(text):
    return from_json_obj(json.loads(text))


def load_file(path):
    with open(path) as fh:
        return from_json_obj(json.load(fh))


def save_file(p, path, indent=2):
    with open(path, "w") as fh:
        json.dump(to_json_obj(p), fh, indent=indent)
        fh.write("\n")


def format_cube(cube):
    """Human-readable cube, e.g. (t1, t2+1, 0)."""
    parts = []
    for code in cube:
        if code == ZERO:
            parts.append("0")
        elif code == ONE:
            parts.append("1")
        else:
            s = "+1" if shift_of(code) else ""
            parts.append(f"t{param_of(code) + 1}{s}")
    return "(" + ", ".join(parts) + ")"


def format_packing(p):
    return "\n".join(format_cube(c) for c in p.cubes)
