"""Enumeration of the ways a packing can grow by one cube.

An extension class fixes, per coordinate, either an existing literal (torus),
a boundary value (cube space), or a fresh parameter; it stands for all
discrete cubes with that blocking pattern.  Class sizes count the discrete
realizations at grid resolution N, and the step distributions follow:
proportional to size at finite N, uniform over the classes with the most
fresh parameters in the limit.
"""

from dataclasses import dataclass
from fractions import Fraction

from .model import (
    CUBE,
    ONE,
    TORUS,
    ZERO,
    add_cube,
    is_literal,
    literal,
    nparams_per_coordinate,
    opposite,
    param_of,
    validate,
)

# Pattern code for a coordinate left fresh; sorts after every literal code.
FRESH = "*"


class DegenerateGridError(ValueError):
    """Grid too coarse: every extension class has zero discrete members."""


@dataclass(frozen=True)
class ExtensionClass:
    """One combinatorial way of adding a cube; nb counts fresh coordinates."""

    coords: tuple
    nb: int


@dataclass(frozen=True)
class Face:
    """A face of [0,1]^n: fixed 0/1 coordinates plus FREE directions."""

    pattern: tuple
    dim: int


FREE = FRESH


def _candidates_per_coordinate(p):
    """Candidate codes per coordinate, literals first, FRESH last."""
    if p.space == TORUS:
        cands = [[] for _ in range(p.dim)]
        seen = [set() for _ in range(p.dim)]
        for cube in p.cubes:
            for j, code in enumerate(cube):
                q = param_of(code)
                if q not in seen[j]:
                    seen[j].add(q)
                    cands[j].append(literal(q, 0))
                    cands[j].append(literal(q, 1))
        for j in range(p.dim):
            cands[j].sort()
            cands[j].append(FRESH)
        return cands
    return [[ZERO, ONE, FRESH] for _ in range(p.dim)]


def _blocked_masks(p, cands):
    """For each coordinate and candidate, the bitmask of cubes it blocks."""
    masks = []
    for j, col in enumerate(cands):
        row = {}
        for cand in col:
            mask = 0
            if cand != FRESH:
                want = opposite(cand)
                for i, cube in enumerate(p.cubes):
                    if cube[j] == want:
                        mask |= 1 << i
            row[cand] = mask
        masks.append(row)
    return masks


def enumerate_extension_classes(p):
    """All classes of cubes non-overlapping with every cube of the packing.

    Returns:
        Tuple of ExtensionClass in deterministic lexicographic order
        (literal codes ascending, FRESH after literals).  Empty when the
        packing is non-extensible.
    """
    cands = _candidates_per_coordinate(p)
    masks = _blocked_masks(p, cands)
    full = (1 << len(p.cubes)) - 1
    out = []
    chosen = [None] * p.dim

    def walk(j, blocked):
        if j == p.dim:
            if blocked == full:
                nb = sum(1 for c in chosen if c == FRESH)
                out.append(ExtensionClass(tuple(chosen), nb))
            return
        for cand in cands[j]:
            chosen[j] = cand
            walk(j + 1, blocked | masks[j][cand])
        chosen[j] = None

    walk(0, 0)
    return tuple(out)


def class_size(p, c, N):
    """Number of discrete realizations of an extension class at resolution N.

    Torus: product over fresh coordinates j of (2N - 2 N_j); cube space:
    (N-1)^nb.  May be zero when the grid is too coarse.
    """
    if p.space == CUBE:
        return max(0, N - 1) ** c.nb
    size = 1
    for j, cand in enumerate(c.coords):
        if cand == FRESH:
            size *= max(0, 2 * N - 2 * nparams_per_coordinate(p, j))
    return size


def finite_step_distribution(p, N):
    """Exact class probabilities at resolution N, proportional to class size."""
    classes = enumerate_extension_classes(p)
    sizes = [class_size(p, c, N) for c in classes]
    total = sum(sizes)
    if classes and total == 0:
        raise DegenerateGridError(f"no extension class has members at N={N}")
    return [(c, Fraction(s, total)) for c, s in zip(classes, sizes) if s > 0]


def max_nb_classes(p):
    """The extension classes attaining the maximal fresh-parameter count.

    Searches minimal blocking covers directly: every cube must be blocked by
    some (coordinate, literal) choice, and a class has maximal nb exactly
    when its set of non-fresh coordinates is a minimum-size consistent cover.
    Much faster than full enumeration on near-tilings.
    """
    m = len(p.cubes)
    if m == 0:
        return (ExtensionClass((FRESH,) * p.dim, p.dim),)
    cands = _candidates_per_coordinate(p)
    masks = _blocked_masks(p, cands)
    full = (1 << m) - 1
    blockers = []
    for i in range(m):
        opts = []
        for j in range(p.dim):
            for cand, mask in masks[j].items():
                if cand != FRESH and mask >> i & 1:
                    opts.append((j, cand, mask))
        blockers.append(opts)
    best = {"k": p.dim + 1, "found": set()}

    def walk(blocked, assigned):
        if len(assigned) > best["k"]:
            return
        if blocked == full:
            if len(assigned) < best["k"]:
                best["k"] = len(assigned)
                best["found"] = set()
            if len(assigned) == best["k"]:
                vec = tuple(assigned.get(j, FRESH) for j in range(p.dim))
                best["found"].add(vec)
            return
        # fail-first: branch on the unblocked cube with fewest usable options
        pick, pick_opts = None, None
        for i in range(m):
            if blocked >> i & 1:
                continue
            opts = [(j, cand, mask) for j, cand, mask in blockers[i]
                    if assigned.get(j, cand) == cand]
            if pick_opts is None or len(opts) < len(pick_opts):
                pick, pick_opts = i, opts
                if not opts:
                    break
        for j, cand, mask in pick_opts:
            fresh_cost = 0 if j in assigned else 1
            if len(assigned) + fresh_cost > best["k"]:
                continue
            had = j in assigned
            assigned[j] = cand
            walk(blocked | mask, assigned)
            if not had:
                del assigned[j]

    walk(0, {})
    if not best["found"]:
        return ()
    classes = [ExtensionClass(vec, p.dim - best["k"]) for vec in sorted(best["found"], key=_class_sort_key)]
    return tuple(classes)


def _class_sort_key(vec):
    return tuple((1, 0) if c == FRESH else (0, c) for c in vec)


def limit_step_distribution(p):
    """Uniform distribution over the maximal-nb classes; empty if non-extensible."""
    classes = max_nb_classes(p)
    if not classes:
        return []
    q = Fraction(1, len(classes))
    return [(c, q) for c in classes]


def is_extensible(p):
    """Extensibility with a verified witness.

    Returns:
        (True, witness ExtensionClass) or (False, None).  The witness is the
        first maximal-nb class; adding its representative cube validates.
    """
    classes = max_nb_classes(p)
    if not classes:
        return False, None
    witness = classes[0]
    added = add_cube(p, class_representative(p, witness))
    bad = validate(added)
    if bad is not None:
        raise AssertionError(f"extension witness failed validation: {bad}")
    return True, witness


def class_representative(p, c):
    """Concrete coordinate codes for a class, fresh slots get new parameters."""
    next_param = max((q for q, _ in p.param_coord), default=-1) + 1
    row = []
    for cand in c.coords:
        if cand == FRESH:
            row.append(literal(next_param, 0))
            next_param += 1
        else:
            row.append(cand)
    return tuple(row)


def poss_complex(p):
    """The face complex of addable positions in the cube case.

    Every extension class pattern, read with FRESH as a free direction, is a
    face of [0,1]^n all of whose points give addable cubes; the set is closed
    under taking subfaces by construction.
    """
    if p.space != CUBE:
        raise ValueError("poss_complex is defined for cube-space packings")
    faces = []
    for c in enumerate_extension_classes(p):
        faces.append(Face(c.coords, c.nb))
    return frozenset(faces)


def complex_max_dim(faces):
    return max((f.dim for f in faces), default=-1)


def serialize_class(c):
    out = []
    for cand in c.coords:
        if cand == FRESH:
            out.append("*")
        elif cand == ZERO:
            out.append(0)
        elif cand == ONE:
            out.append(1)
        else:
            out.append({"p": param_of(cand), "s": cand & 1})
    return out
