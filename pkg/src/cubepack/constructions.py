"""Explicit constructions: products, rod tilings, circulant matrices,
1-factorization packings, and the bundled fixture corpus."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .extend import max_nb_classes
from .model import (
    TORUS,
    literal,
    load_file,
    make_packing,
    opposite,
    param_of,
    shift_of,
    validate,
    is_tiling,
)


class ConstructionError(ValueError):
    """A construction precondition failed or a completion check did not hold."""


def one_dim_tiling():
    """The 1-dimensional tiling {t, t+1}."""
    return make_packing(TORUS, 1, [(literal(0, 0),), (literal(0, 1),)])


def product(p, q):
    """Semidirect product: glue an independent copy of q onto each cube of p.

    The result has cubes (z_i, w_{i,j}) where w_{i,j} runs over the cubes of
    the i-th parameter-renamed copy of q, so m(pq) = m(p) m(q) and
    N(pq) = N(p) + m(p) N(q).

    Raises:
        ConstructionError: if either packing is not torus-space.
    """
    if p.space != TORUS or q.space != TORUS:
        raise ConstructionError("product is defined for torus packings")
    base = p.nparams
    nq = q.nparams
    cubes = []
    for i, zi in enumerate(p.cubes):
        off = base + i * nq
        for zj in q.cubes:
            tail = tuple(literal(off + param_of(c), shift_of(c)) for c in zj)
            cubes.append(zi + tail)
    return make_packing(TORUS, p.dim + q.dim, cubes)


def laminated_tiling(k):
    """The fully laminated k-dimensional tiling (iterated product of {t, t+1})."""
    if k < 1:
        raise ConstructionError("dimension must be >= 1")
    out = one_dim_tiling()
    for _ in range(k - 1):
        out = product(one_dim_tiling(), out)
    return out


def h_matrix(n):
    """Circulant matrix packing for odd n: n rows pairwise blocked once each.

    Column j holds a fresh parameter on the diagonal and, for each offset
    k = 1..(n-1)/2, a fresh parameter at row j+k with its shifted partner at
    row j-k (indices mod n), so column values are pairwise distinct and any
    two rows block each other in exactly one coordinate.  Parameters are
    numbered diagonal first, then offset by offset.
    """
    if n < 3 or n % 2 == 0:
        raise ConstructionError("n must be odd and >= 3")
    rows = [[None] * n for _ in range(n)]
    for j in range(n):
        rows[j][j] = literal(j, 0)
        for k in range(1, (n - 1) // 2 + 1):
            t = k * n + j
            rows[(j + k) % n][j] = literal(t, 0)
            rows[(j - k) % n][j] = literal(t, 1)
    return make_packing(TORUS, n, [tuple(r) for r in rows])


def parse_cycles(text, n):
    """Parse cycle notation like "(1,2)(3,5,4)" into a 0-based mapping tuple."""
    perm = list(range(n))
    seen = set()
    body = text.replace(" ", "")
    if not body.startswith("(") or not body.endswith(")"):
        raise ConstructionError(f"bad cycle notation {text!r}")
    for cyc in body[1:-1].split(")("):
        elems = [int(v) - 1 for v in cyc.split(",")]
        if any(v < 0 or v >= n or v in seen for v in elems):
            raise ConstructionError(f"bad cycle notation {text!r}")
        seen.update(elems)
        for a, b in zip(elems, elems[1:] + elems[:1]):
            perm[a] = b
    return tuple(perm)


def dihedral_perms(n):
    """The 2n rotation/reflection index maps i -> i+k and i -> k-i (mod n)."""
    out = []
    for k in range(n):
        out.append(tuple((i + k) % n for i in range(n)))
        out.append(tuple((k - i) % n for i in range(n)))
    return out


def _conjugate(g, sigma):
    n = len(g)
    ginv = [0] * n
    for i, v in enumerate(g):
        ginv[v] = i
    return tuple(g[sigma[ginv[i]]] for i in range(n))


def hn_tiling(n, perms=None):
    """Complete h_matrix(n) into a tiling with n(n+1)/2 parameters.

    Starts from the n rows of h_matrix(n) plus the same rows with the
    diagonal entry shifted, then adds one cube per permutation in the
    dihedral-conjugation orbits of perms: the cube for sigma takes, in each
    coordinate j, the shifted partner of row sigma^-1(j)'s entry.

    Args:
        n: 3, 5, 7 or 9.
        perms: iterable of cycle-notation strings or 0-based mapping tuples;
            defaults to the bundled table for n.

    Raises:
        ConstructionError: if the orbit cubes do not complete a valid tiling
            with exactly n(n+1)/2 parameters.
    """
    if n not in (3, 5, 7, 9):
        raise ConstructionError("completion data exists for n in {3, 5, 7, 9}")
    if perms is None:
        perms = completion_perms()[str(n)]
    base = h_matrix(n)
    cubes = list(base.cubes)
    for i, z in enumerate(base.cubes):
        row = list(z)
        row[i] = opposite(row[i])
        cubes.append(tuple(row))
    orbit = set()
    for s in perms:
        sigma = parse_cycles(s, n) if isinstance(s, str) else tuple(s)
        for g in dihedral_perms(n):
            orbit.add(_conjugate(g, sigma))
    for sigma in sorted(orbit):
        inv = [0] * n
        for i, v in enumerate(sigma):
            inv[v] = i
        cubes.append(tuple(opposite(base.cubes[inv[j]][j]) for j in range(n)))
    if len(cubes) != 2 ** n:
        raise ConstructionError(
            f"permutation orbits give {len(cubes)} cubes, need {2 ** n}"
        )
    p = make_packing(TORUS, n, cubes)
    bad = validate(p)
    if bad is not None:
        raise ConstructionError(f"completion is not a packing: {bad.kind}")
    if not is_tiling(p) or p.nparams != n * (n + 1) // 2:
        raise ConstructionError("completion is not a minimal-parameter tiling")
    return p


@dataclass(frozen=True)
class OneFactorization:
    """Perfect matchings partitioning the edges of a complete graph."""

    vertices: int
    matchings: tuple


def one_factorization(v):
    """Round-robin 1-factorization of the complete graph on v vertices.

    Vertex v-1 stays fixed; round r pairs it with r and pairs (r+i, r-i)
    mod v-1 for i = 1..v/2-1.
    """
    if v < 2 or v % 2:
        raise ConstructionError("vertex count must be even and >= 2")
    rounds = []
    for r in range(v - 1):
        edges = [tuple(sorted((r, v - 1)))]
        for i in range(1, v // 2):
            a = (r + i) % (v - 1)
            b = (r - i) % (v - 1)
            edges.append(tuple(sorted((a, b))))
        rounds.append(tuple(sorted(edges)))
    return OneFactorization(v, tuple(rounds))


def factorization_packing(f):
    """Packing with one cube per vertex and one coordinate per matching.

    The edge {u, w} of matching j becomes a parameter occurring as t in cube
    u and t+1 in cube w, so any two cubes block each other exactly in the
    coordinate of the matching containing their edge.
    """
    v = f.vertices
    n = v - 1
    grid = [[None] * n for _ in range(v)]
    t = 0
    for j, matching in enumerate(f.matchings):
        for u, w in matching:
            grid[u][j] = literal(t, 0)
            grid[w][j] = literal(t, 1)
            t += 1
    return make_packing(TORUS, n, [tuple(r) for r in grid])


# The 8 rod axes in the first 3 coordinates: pairwise blocked, 6 parameters.
ROD_VECTORS = (
    (literal(0, 0), literal(1, 0), literal(2, 0)),
    (literal(0, 1), literal(3, 0), literal(4, 0)),
    (literal(5, 0), literal(1, 1), literal(4, 1)),
    (literal(0, 1), literal(3, 1), literal(4, 0)),
    (literal(5, 1), literal(1, 1), literal(4, 1)),
    (literal(0, 0), literal(1, 0), literal(2, 1)),
    (literal(0, 1), literal(1, 0), literal(4, 1)),
    (literal(0, 0), literal(1, 1), literal(4, 0)),
)


def rod_tiling(n, fillers=None):
    """Tiling of 8 rods: each rod axis extended by an (n-3)-dim tiling.

    Args:
        n: total dimension, >= 3.
        fillers: 8 torus tilings of dimension n-3, one per rod, each copied
            with independent parameters; defaults to laminated tilings.
            Must be omitted or empty for n = 3.
    """
    if n < 3:
        raise ConstructionError("rod tilings need dimension >= 3")
    k = n - 3
    if k == 0:
        if fillers:
            raise ConstructionError("dimension 3 leaves no room for fillers")
        return make_packing(TORUS, 3, ROD_VECTORS)
    if fillers is None:
        fillers = [laminated_tiling(k)] * 8
    if len(fillers) != 8:
        raise ConstructionError("need one filler tiling per rod")
    cubes = []
    base = 6
    for h, filler in zip(ROD_VECTORS, fillers):
        if filler.space != TORUS or filler.dim != k or not is_tiling(filler):
            raise ConstructionError(f"fillers must be torus tilings of dimension {k}")
        for w in filler.cubes:
            tail = tuple(literal(base + param_of(c), shift_of(c)) for c in w)
            cubes.append(h + tail)
        base += filler.nparams
    return make_packing(TORUS, n, cubes)


def rod_stage_state(n, rows):
    """Partial rod structure: the chosen axis vectors plus fresh tails.

    Args:
        n: ambient dimension, >= 3.
        rows: indices into ROD_VECTORS; each selected axis is extended with
            its own fresh parameter in every coordinate past the third.
    """
    cubes = []
    nxt = 6
    for r in rows:
        row = list(ROD_VECTORS[r])
        for _ in range(n - 3):
            row.append(literal(nxt, 0))
            nxt += 1
        cubes.append(tuple(row))
    return make_packing(TORUS, n, cubes)


def _stage_total(n, rows):
    return len(max_nb_classes(rod_stage_state(n, rows)))


@dataclass(frozen=True)
class RodRecurrenceState:
    """Stage probabilities of the rod process: probs[(h, r)] for cube count h."""

    n: int
    probs: dict
    delta4_2: int

    def stage_totals(self):
        out = {}
        for (h, _), v in self.probs.items():
            out[h] = out.get(h, Fraction(0)) + v
        return out


def rod_recurrence(n):
    """Stage-by-stage probabilities of building the 8-rod skeleton plus one
    extra cube per rod, as exact rationals in the integer dimension n.

    Each stage h lists the orbits of reachable configurations with h cubes
    and the transition weights between them; the weights are kept in their
    original unsimplified form so each line can be checked in isolation.

    Raises:
        ConstructionError: for n <= 3, where the configurations degenerate.
    """
    if n <= 3:
        raise ConstructionError("rod recurrence needs dimension >= 4")
    F = Fraction
    p3_1 = F(n - 2, n)
    p4_1 = p3_1 * F(3, n * (n - 1) * (n - 2))
    p4_2 = p3_1 * F(2, n * (n - 1) * (n - 2))
    d4_2 = 3 * (n - 3) * (n - 4) + 3 * (n - 3) + 4
    d6_2 = n - 1
    if n == 4:
        # Two closed-form totals undercount in dimension 4, where blocking
        # patterns through the single tail coordinate tie with the generic
        # ones; replaying the explicit states gives 13 and 4, the only
        # totals consistent with the census mass of the rod class.
        d4_2 = _stage_total(4, (0, 1, 2, 6))
        d6_2 = _stage_total(4, (0, 1, 2, 3, 4, 6))
    p5_1 = p4_1 * F(2, 2 * (n - 1) * (n - 2))
    p5_2 = p4_1 * F(2, 2 * (n - 1) * (n - 2)) + p4_2 * F(3, d4_2)
    p5_3 = p4_2 * F(1, d4_2)
    p6_1 = p5_1 * F(1, 3 * (n - 2))
    p6_2 = p5_1 * F(2, 3 * (n - 2)) + p5_2 * F(2, n * (n - 2))
    p6_3 = p5_2 * F(1, n * (n - 2)) + p5_3 * F(3, 3 * (n - 2))
    p7_1 = p6_1 + p6_2 * F(1, d6_2)
    p7_2 = p6_2 * F(1, d6_2) + p6_3 * F(2, 2 * (n - 2))
    p8_1 = p7_1 + p7_2 * F(1, n - 2)
    a = n - 3
    b = (n - 3) * (n - 4)
    p9_1 = p8_1 * F(2 * a, 8 * a + 3 * b)
    p9_2 = p8_1 * F(6 * a, 8 * a + 3 * b)
    p10_1 = p9_1 * F(a, 7 * a + 3 * b)
    p10_2 = p9_1 * F(6 * a, 7 * a + 3 * b) + p9_2 * F(3 * a, 7 * a + 2 * b)
    p10_3 = p9_2 * F(4 * a, 7 * a + 2 * b)
    p11_1 = p10_1 * F(6 * a, 6 * a + 3 * b) + p10_2 * F(2 * a, 6 * a + 2 * b)
    p11_2 = p10_2 * F(4 * a, 6 * a + 2 * b) + p10_3 * F(4 * a, 6 * a + b)
    p11_3 = p10_3 * F(2 * a, 6 * a + 2 * b)
    p12_1 = p11_1 * F(a, 5 * a + 2 * b)
    p12_2 = p11_1 * F(4 * a, 5 * a + 2 * b) + p11_2 * F(3 * a, 5 * a + 2 * b)
    p12_3 = p11_2 * F(2 * a, 5 * a + 2 * b) + p11_3 * F(5 * a, 5 * a + 2 * b)
    p13_1 = p12_1 * F(4 * a, 4 * a + 2 * b) + p12_2 * F(2 * a, 4 * a + b)
    p13_2 = p12_2 * F(2 * a, 4 * a + b) + p12_3 * F(4 * a, 4 * a)
    p14_1 = p13_1 * F(a, 3 * a + b)
    p14_2 = p13_1 * F(2 * a, 3 * a + b) + p13_2 * F(3 * a, 3 * a)
    p15_1 = p14_1 * F(2 * a, 2 * a + b) + p14_2
    probs = {
        (3, 1): p3_1,
        (4, 1): p4_1, (4, 2): p4_2,
        (5, 1): p5_1, (5, 2): p5_2, (5, 3): p5_3,
        (6, 1): p6_1, (6, 2): p6_2, (6, 3): p6_3,
        (7, 1): p7_1, (7, 2): p7_2,
        (8, 1): p8_1,
        (9, 1): p9_1, (9, 2): p9_2,
        (10, 1): p10_1, (10, 2): p10_2, (10, 3): p10_3,
        (11, 1): p11_1, (11, 2): p11_2, (11, 3): p11_3,
        (12, 1): p12_1, (12, 2): p12_2, (12, 3): p12_3,
        (13, 1): p13_1, (13, 2): p13_2,
        (14, 1): p14_1, (14, 2): p14_2,
        (15, 1): p15_1,
    }
    return RodRecurrenceState(n, probs, d4_2)


def rod_probability(n):
    """The rod-skeleton factor of the rod-tiling probability.

    Multiplied by the 8-fold power of the (n-3)-dimensional tiling
    probability it gives the probability of ending in a rod tiling.
    """
    return rod_recurrence(n).probs[(15, 1)]


def fixtures_dir():
    """Locate the bundled fixture corpus.

    CUBEPACK_FIXTURES overrides; otherwise walk up from this file looking
    for a fixtures/ directory, falling back to the working directory.
    """
    env = os.environ.get("CUBEPACK_FIXTURES")
    if env:
        return Path(env)
    here = Path(__file__).resolve()
    for parent in here.parents:
        cand = parent / "fixtures"
        if cand.is_dir():
            return cand
    return Path.cwd() / "fixtures"


_FIXTURE_SUBDIRS = ("dim4", "figure2", "figure3", "h-matrices")


def fixtures():
    """Load the named packing corpus as {name: Packing}."""
    root = fixtures_dir()
    out = {}
    for sub in _FIXTURE_SUBDIRS:
        d = root / sub
        if not d.is_dir():
            continue
        for path in sorted(d.glob("*.json")):
            out[path.stem] = load_file(path)
    return out


def load_fixture(name):
    root = fixtures_dir()
    for sub in _FIXTURE_SUBDIRS:
        path = root / sub / f"{name}.json"
        if path.is_file():
            return load_file(path)
    raise ConstructionError(f"no fixture named {name!r}")


def completion_perms():
    """The bundled permutation lists keyed by dimension string."""
    path = fixtures_dir() / "table4" / "perms.json"
    with open(path) as fh:
        return json.load(fh)
