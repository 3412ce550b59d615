"""Brute-force oracles shared by the test modules.

Everything here recomputes model quantities from first principles (explicit
grid counting, explicit relabeling search) so the package code is checked
against independent definitions, not against itself.
"""

from itertools import permutations

from cubepack.extend import class_representative, enumerate_extension_classes
from cubepack.model import (
    CUBE,
    ONE,
    TORUS,
    ZERO,
    add_cube,
    empty_packing,
    is_literal,
    param_of,
)


def realize(p, N):
    """Concrete grid anchors for a generic realization at resolution N.

    Parameters get distinct residues (torus) or distinct interior values
    (cube space) per coordinate, in first-occurrence order.
    """
    assign = {}
    counters = [0] * p.dim
    rows = []
    for cube in p.cubes:
        row = []
        for j, code in enumerate(cube):
            if code == ZERO:
                row.append(0)
            elif code == ONE:
                row.append(N)
            else:
                q = param_of(code)
                if q not in assign:
                    if p.space == TORUS:
                        if counters[j] >= N:
                            raise ValueError("grid too coarse to realize")
                        assign[q] = counters[j]
                    else:
                        if counters[j] >= N - 1:
                            raise ValueError("grid too coarse to realize")
                        assign[q] = counters[j] + 1
                    counters[j] += 1
                if p.space == TORUS:
                    row.append(assign[q] + (code & 1) * N)
                else:
                    row.append(assign[q])
        rows.append(tuple(row))
    return rows


def grid_blocked(x, y, N, space):
    if space == CUBE:
        return {x, y} == {0, N}
    return (x - y) % (2 * N) == N


def count_addable_positions(anchors, dim, N, space):
    """|Poss| by explicit enumeration of every grid position."""
    axis = range(N + 1) if space == CUBE else range(2 * N)
    positions = [()]
    for _ in range(dim):
        positions = [pos + (v,) for pos in positions for v in axis]
    total = 0
    for pos in positions:
        if all(
            any(grid_blocked(pos[j], a[j], N, space) for j in range(dim))
            for a in anchors
        ):
            total += 1
    return total


def _induced_map_ok(p, q, sigma, rho):
    """Whether cube map rho and coordinate map sigma induce a legal relabeling."""
    lmap = {}
    bmap = {}
    for i, cube in enumerate(p.cubes):
        target = q.cubes[rho[i]]
        for j, code in enumerate(cube):
            tcode = target[sigma[j]]
            if is_literal(code):
                if not is_literal(tcode):
                    return False
                if lmap.setdefault(code, tcode) != tcode:
                    return False
            else:
                if is_literal(tcode):
                    return False
                if bmap.setdefault((j, code), tcode) != tcode:
                    return False
    if len(set(lmap.values())) != len(lmap):
        return False
    pmap = {}
    for code, tcode in lmap.items():
        if pmap.setdefault(param_of(code), param_of(tcode)) != param_of(tcode):
            return False
    if len(set(pmap.values())) != len(pmap):
        return False
    for j in range(p.dim):
        a, b = bmap.get((j, ZERO)), bmap.get((j, ONE))
        if a is not None and b is not None and a == b:
            return False
    return True


def brute_equivalent(p, q):
    """Equivalence by exhaustive search over cube and coordinate relabelings."""
    if p.space != q.space or p.dim != q.dim or p.m != q.m:
        return False
    for sigma in permutations(range(p.dim)):
        for rho in permutations(range(p.m)):
            if _induced_map_ok(p, q, sigma, rho):
                return True
    return False


def brute_automorphism_order(p):
    """Order of the induced symmetry group, by exhaustive relabeling search."""
    count = 0
    for sigma in permutations(range(p.dim)):
        for rho in permutations(range(p.m)):
            if _induced_map_ok(p, p, sigma, rho):
                count += 1
    return count


def random_packing(rng, space, dim, steps):
    """Grow a packing by uniformly random extension classes."""
    p = empty_packing(space, dim)
    for _ in range(steps):
        classes = enumerate_extension_classes(p)
        if not classes:
            break
        c = classes[rng.randrange(len(classes))]
        p = add_cube(p, class_representative(p, c))
    return p
