"""Seeded finite-N sequential random packing simulation.

Each trial runs the exact process at resolution N: the next cube is drawn
uniformly over all addable grid positions.  The draw is done
class-then-member with a single integer sample per step (classes weighted
by their exact discrete size, the member index decoded within the class),
so no grid is ever materialized and arbitrarily fine resolutions cost the
same.  Trials use counter-based substreams keyed (seed, trial index), so
reports are reproducible for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import sqrt

import numpy as np

from .canon import canonical_key
from .census import laminated
from .extend import FRESH, class_size, enumerate_extension_classes
from .model import (
    CUBE,
    TORUS,
    ONE,
    ZERO,
    add_cube,
    empty_packing,
    literal,
    phi_grid,
)


@dataclass(frozen=True)
class SimConfig:
    """One simulation request; trials >= 1 and N >= 2."""

    space: str
    dim: int
    N: int
    trials: int
    seed: int
    track_lamination: bool = False

    def __post_init__(self):
        if self.space not in (TORUS, CUBE):
            raise ValueError(f"unknown space {self.space!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.N < 2:
            raise ValueError("N must be >= 2")


@dataclass(frozen=True)
class SimReport:
    """Aggregated trial outcomes, in trial-index order."""

    counts: tuple
    mean: float
    variance: float
    ci95: tuple
    lamination_frequency: object = None
    histogram: tuple = None


@lru_cache(maxsize=65536)
def _classes(p):
    return enumerate_extension_classes(p)


@lru_cache(maxsize=65536)
def _class_sizes(p, N):
    classes = _classes(p)
    sizes = tuple(class_size(p, c, N) for c in classes)
    return classes, sizes, sum(sizes)


def _randbelow(rng, total):
    """Uniform integer in [0, total) from one logical draw.

    Falls back to byte-level rejection when total exceeds the generator's
    integer range.
    """
    if total <= (1 << 63):
        return int(rng.integers(0, total))
    nbytes = (total.bit_length() + 7) // 8
    bound = 1 << (8 * nbytes)
    cutoff = bound - bound % total
    while True:
        value = int.from_bytes(rng.bytes(nbytes), "little")
        if value < cutoff:
            return value % total


@lru_cache(maxsize=65536)
def _child(p, idx):
    """The packing after adding the representative of class idx; fresh
    coordinates get new parameters at shift 0, numbered in coordinate
    order, so the transition is the same for every member of the class."""
    cls = _classes(p)[idx]
    next_param = p.nparams
    row = []
    for code in cls.coords:
        if code == FRESH:
            row.append(literal(next_param, 0))
            next_param += 1
        else:
            row.append(code)
    return add_cube(p, row)


def sample_packing(cfg, rng):
    """One full trial; returns (combinatorial type, anchors, cube count).

    anchors are exact Fractions on the (1/N)-grid and the packing is their
    type under the grid projection, so cube-space trials where two cubes
    draw the same interior value share a parameter.  A coarser tracking
    packing drives the class enumeration; it can only differ from the
    returned one by splitting such coincidences, which never changes the
    step distribution.
    """
    N = cfg.N
    p = empty_packing(cfg.space, cfg.dim)
    grid = []
    assignment = [{} for _ in range(cfg.dim)]
    while True:
        classes, sizes, total = _class_sizes(p, N)
        if total == 0:
            # the count gap below holds for torus packings only; cube-space
            # terminals with a single cube are legitimate
            if not classes and cfg.space == TORUS:
                gap = range(2 ** cfg.dim - 3, 2 ** cfg.dim)
                if p.m in gap:
                    raise AssertionError(
                        f"terminal count {p.m} inside the forbidden gap"
                    )
            anchors = tuple(
                tuple(Fraction(k, N) for k in vec) for vec in grid
            )
            return phi_grid(grid, N, cfg.space), anchors, p.m
        draw = _randbelow(rng, total)
        for idx, size in enumerate(sizes):
            if draw < size:
                break
            draw -= size
        vec = _decode_member(p, classes[idx], draw, N, assignment)
        grid.append(vec)
        p = _child(p, idx)


def _decode_member(p, cls, member, N, assignment):
    """Grid anchors of the drawn member; records fresh parameter bases.

    assignment[j] maps a parameter to its base grid value: in [0, 2N) on
    the torus (the opposite literal sits at +N mod 2N), in [1, N-1] in the
    cube (blocking values are exactly 0 and N).
    """
    next_param = p.nparams
    vec = []
    for j, code in enumerate(cls.coords):
        if code == FRESH:
            if p.space == TORUS:
                free = 2 * (N - len(assignment[j]))
                choice, member = member % free, member // free
                shift, slot = choice % 2, choice // 2
                base = _nth_free_class(assignment[j], N, slot) + shift * N
            else:
                free = N - 1
                choice, member = member % free, member // free
                base = choice + 1
            assignment[j][next_param] = base
            next_param += 1
            vec.append(base)
        elif code == ZERO:
            vec.append(0)
        elif code == ONE:
            vec.append(N)
        else:
            # shift-1 literals occur on the torus only
            base = assignment[j][code >> 1]
            if code & 1:
                base = (base + N) % (2 * N)
            vec.append(base)
    return tuple(vec)


def _nth_free_class(taken, N, slot):
    """slot-th residue class in [0, N) not used by any parameter."""
    value = slot
    for used in sorted(k % N for k in taken.values()):
        if used <= value:
            value += 1
    return value


def _run_trial(cfg, trial, want_key):
    rng = np.random.Generator(np.random.Philox(key=[cfg.seed, trial]))
    packing, _, count = sample_packing(cfg, rng)
    lam = laminated(packing) if cfg.track_lamination else None
    key = canonical_key(packing).hex() if want_key else None
    return count, lam, key


def _thread_count():
    env = os.environ.get("CUBEPACK_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def estimate_expectation(cfg, emit_histogram=False, threads=None):
    """Run all trials and aggregate; deterministic for a given (cfg, seed).

    The 95% interval uses the normal approximation, which is adequate at
    the trial counts used here but approximate for small runs.
    """
    workers = threads if threads is not None else _thread_count()
    trials = range(cfg.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda t: _run_trial(cfg, t, emit_histogram), trials)
            )
    else:
        results = [_run_trial(cfg, t, emit_histogram) for t in trials]
    counts = tuple(r[0] for r in results)
    mean = sum(counts) / cfg.trials
    if cfg.trials > 1:
        variance = sum((c - mean) ** 2 for c in counts) / (cfg.trials - 1)
    else:
        variance = 0.0
    half = 1.96 * sqrt(variance / cfg.trials)
    lam = None
    if cfg.track_lamination:
        lam = sum(1 for r in results if r[1]) / cfg.trials
    histogram = None
    if emit_histogram:
        tally = {}
        for _, _, key in results:
            tally[key] = tally.get(key, 0) + 1
        histogram = tuple(sorted(tally.items(), key=lambda kv: (-kv[1], kv[0])))
    report = SimReport(
        counts=counts,
        mean=mean,
        variance=variance,
        ci95=(mean - half, mean + half),
        lamination_frequency=lam,
        histogram=histogram,
    )
    if not 1 <= report.mean <= 2 ** cfg.dim:
        raise AssertionError("mean outside [1, 2^n]")
    return report


def lamination_frequency(n, N, trials, seed):
    """Fraction of terminal torus packings with a single-parameter
    coordinate; n=1 is degenerate and reported as 1 by convention."""
    if n == 1:
        return 1.0
    cfg = SimConfig(
        space=TORUS, dim=n, N=N, trials=trials, seed=seed,
        track_lamination=True,
    )
    return estimate_expectation(cfg).lamination_frequency
