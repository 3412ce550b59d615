"""Canonical forms, equivalence, and automorphism orders for packings.

Packings are encoded as colored graphs whose automorphisms are exactly the
allowed relabelings (cube reorder, coordinate permutation, parameter
renaming with literal swap on the torus, 0/1 reflection in the cube case).
Canonical labeling is individualization-refinement with orbit pruning, and
group orders come from a Schreier-Sims chain over the discovered generators.
"""

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .model import CUBE, ONE, TORUS, ZERO, is_literal, param_of, shift_of

COLOR_CUBE = 0
COLOR_COORD = 1
COLOR_PARAM = 2
COLOR_LITERAL = 3
COLOR_CELL = 4
COLOR_BOUNDARY = 5


@dataclass(frozen=True)
class ColoredGraph:
    """Simple undirected loop-free graph with small-integer vertex colors."""

    colors: tuple
    adj: tuple

    def edges(self):
        out = []
        for u, nbrs in enumerate(self.adj):
            for v in nbrs:
                if u < v:
                    out.append((u, v))
        return out


@dataclass(frozen=True)
class CanonicalKey:
    """Byte certificate; equal keys mean equivalent packings."""

    bytes: bytes

    def hex(self):
        return self.bytes.hex()


def encode(p):
    """Colored-graph encoding of a packing.

    Vertices: one per cube, per coordinate, per parameter, per literal (both
    shifts of each parameter on the torus, a single vertex per interior
    parameter in the cube case, plus per-coordinate boundary pairs 0_j/1_j
    sharing one color), and one cell per (cube, coordinate) slot.  A cell is
    adjacent to its cube, its coordinate, and the literal it holds; literals
    attach to their parameter, boundary literals attach to their coordinate.
    """
    m, n = p.m, p.dim
    params = [q for q, _ in p.param_coord]
    pindex = {q: i for i, q in enumerate(params)}
    npar = len(params)
    colors = [COLOR_CUBE] * m + [COLOR_COORD] * n + [COLOR_PARAM] * npar
    coord_base = m
    param_base = m + n
    lit_base = param_base + npar
    if p.space == TORUS:
        nlits = 2 * npar
        colors += [COLOR_LITERAL] * nlits

        def lit_vertex(code):
            return lit_base + 2 * pindex[param_of(code)] + shift_of(code)
    else:
        nlits = npar + 2 * n
        colors += [COLOR_LITERAL] * npar + [COLOR_BOUNDARY] * (2 * n)
        bound_base = lit_base + npar

        def lit_vertex(code):
            return lit_base + pindex[param_of(code)]
    cell_base = lit_base + nlits
    colors += [COLOR_CELL] * (m * n)
    adj = [set() for _ in range(cell_base + m * n)]

    def link(u, v):
        adj[u].add(v)
        adj[v].add(u)

    if p.space == TORUS:
        for i in range(npar):
            link(param_base + i, lit_base + 2 * i)
            link(param_base + i, lit_base + 2 * i + 1)
    else:
        for i in range(npar):
            link(param_base + i, lit_base + i)
        for j in range(n):
            link(coord_base + j, bound_base + 2 * j)
            link(coord_base + j, bound_base + 2 * j + 1)
    for i, cube in enumerate(p.cubes):
        for j, code in enumerate(cube):
            cell = cell_base + i * n + j
            link(cell, i)
            link(cell, coord_base + j)
            if is_literal(code):
                link(cell, lit_vertex(code))
            elif code == ZERO:
                link(cell, bound_base + 2 * j)
            else:
                link(cell, bound_base + 2 * j + 1)
    return ColoredGraph(tuple(colors), tuple(tuple(sorted(s)) for s in adj))


def _refine(adj, cells, vcell, work):
    """Equitable refinement; splits order parts by neighbor count ascending."""
    while work:
        splitter = work.popleft()
        cnt = {}
        for w in splitter:
            for u in adj[w]:
                cnt[u] = cnt.get(u, 0) + 1
        touched = set()
        for u in cnt:
            touched.add(vcell[u])
        split_any = False
        for ci in touched:
            cell = cells[ci]
            if len(cell) == 1:
                continue
            groups = {}
            for u in cell:
                groups.setdefault(cnt.get(u, 0), []).append(u)
            if len(groups) > 1:
                split_any = True
                cells[ci] = [groups[c] for c in sorted(groups)]
        if split_any:
            new_cells = []
            for cell in cells:
                if cell and isinstance(cell[0], list):
                    for part in cell:
                        new_cells.append(part)
                        work.append(part)
                else:
                    new_cells.append(cell)
            cells[:] = new_cells
            for ci, cell in enumerate(cells):
                for u in cell:
                    vcell[u] = ci
    return cells


def _initial_partition(colors):
    groups = {}
    for v, c in enumerate(colors):
        groups.setdefault(c, []).append(v)
    return [groups[c] for c in sorted(groups)]


class _Canonicalizer:
    """Individualization-refinement search over one colored graph."""

    def __init__(self, graph):
        self.adj = [set(nbrs) for nbrs in graph.adj]
        self.adj_t = graph.adj
        self.colors = graph.colors
        self.nv = len(graph.colors)
        self.best_cert = None
        self.best_perm = None
        self.gens = []

    def run(self):
        cells = _initial_partition(self.colors)
        vcell = [0] * self.nv
        for ci, cell in enumerate(cells):
            for u in cell:
                vcell[u] = ci
        _refine(self.adj_t, cells, vcell, deque(list(cells)))
        self._search(cells, ())
        return self.best_cert, self.best_perm, self.gens

    def _target_cell(self, cells):
        best = None
        for ci, cell in enumerate(cells):
            if len(cell) > 1 and (best is None or len(cell) > len(cells[best])):
                best = ci
        return best

    def _search(self, cells, prefix):
        ti = self._target_cell(cells)
        if ti is None:
            self._leaf([c[0] for c in cells])
            return
        processed = set()
        for v in list(cells[ti]):
            if v in self._orbit(processed, prefix):
                continue
            child = [list(c) for c in cells]
            rest = [u for u in child[ti] if u != v]
            child[ti:ti + 1] = [[v], rest]
            vcell = [0] * self.nv
            for ci, cell in enumerate(child):
                for u in cell:
                    vcell[u] = ci
            _refine(self.adj_t, child, vcell, deque([[v], rest]))
            self._search(child, prefix + (v,))
            processed.add(v)

    def _orbit(self, seeds, prefix):
        if not seeds:
            return seeds
        gens = [g for g in self.gens if all(g[v] == v for v in prefix)]
        if not gens:
            return seeds
        orb = set(seeds)
        stack = list(seeds)
        while stack:
            x = stack.pop()
            for g in gens:
                y = g[x]
                if y not in orb:
                    orb.add(y)
                    stack.append(y)
        return orb

    def _leaf(self, perm):
        cert = self._certificate(perm)
        if self.best_cert is None or cert < self.best_cert:
            self.best_cert = cert
            self.best_perm = perm
        elif cert == self.best_cert:
            g = [0] * self.nv
            for pos in range(self.nv):
                g[perm[pos]] = self.best_perm[pos]
            g = tuple(g)
            if any(g[i] != i for i in range(self.nv)) and g not in self.gens:
                self.gens.append(g)

    def _certificate(self, perm):
        nv = self.nv
        bits = bytearray((nv * (nv - 1) // 2 + 7) // 8)
        k = 0
        adj = self.adj
        for i in range(nv):
            row = adj[perm[i]]
            for j in range(i + 1, nv):
                if perm[j] in row:
                    bits[k >> 3] |= 128 >> (k & 7)
                k += 1
        return bytes(bits)


def _compose(a, b):
    return tuple(a[x] for x in b)


def _inverse(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


class _PermGroup:
    """Schreier-Sims chain with base 0..n-1, grown by sift-and-close."""

    def __init__(self, n):
        self.n = n
        self.trans = [dict() for _ in range(n)]

    def _sift(self, g):
        for i in range(self.n):
            j = g[i]
            if j == i:
                continue
            entry = self.trans[i].get(j)
            if entry is None:
                return i, g
            g = _compose(_inverse(entry), g)
        return None, None

    def add(self, g):
        stack = [tuple(g)]
        while stack:
            h = stack.pop()
            lvl, res = self._sift(h)
            if lvl is None:
                continue
            self.trans[lvl][res[lvl]] = res
            for l in range(lvl + 1):
                for u in list(self.trans[l].values()):
                    stack.append(_compose(u, res))
                    stack.append(_compose(res, u))

    def order(self):
        o = 1
        for t in self.trans:
            o *= len(t) + 1
        return o


def _graph_aut_order(gens, nv):
    if not gens:
        return 1
    group = _PermGroup(nv)
    for g in gens:
        group.add(g)
    return group.order()


@lru_cache(maxsize=8192)
def _canon_result(p):
    graph = encode(p)
    cert, _, gens = _Canonicalizer(graph).run()
    counts = {}
    for c in graph.colors:
        counts[c] = counts.get(c, 0) + 1
    header = f"{p.space}|{p.dim}|" + ",".join(f"{c}:{counts[c]}" for c in sorted(counts)) + "|"
    return header.encode() + cert, _graph_aut_order(gens, len(graph.colors))


def canonical_key(p):
    """Key invariant under the declared relabeling group, distinct otherwise."""
    return CanonicalKey(_canon_result(p)[0])


def automorphism_order(p):
    """Order of the packing's automorphism group.

    The graph group is quotiented by the boundary-pair swaps of cube-space
    coordinates where neither 0 nor 1 occurs; those act trivially on cubes.
    """
    order = _canon_result(p)[1]
    if p.space == CUBE:
        for j in range(p.dim):
            if not any(cube[j] in (ZERO, ONE) for cube in p.cubes):
                order //= 2
    return order


def are_equivalent(p, q):
    if p.space != q.space or p.dim != q.dim:
        return False
    return canonical_key(p) == canonical_key(q)
