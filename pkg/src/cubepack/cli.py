"""Command-line front end.

Subcommands map onto the library: enumerate (censuses), expand (cube-space
series), simulate (Monte Carlo), construct (named packings), verify
(fixture corpus), canon (canonical data of a packing file).  Exact values
are printed as rational strings; floats appear in simulation reports only.
Exit codes: 0 success, 1 validation or verification failure, 2 refusal by
a resource guard.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from .canon import automorphism_order, canonical_key
from .census import (
    ResourceGuardError,
    finite_N_census,
    interpolate_Ck,
    positive_path_exists,
    torus_limit_census,
)
from .constructions import (
    ConstructionError,
    factorization_packing,
    fixtures,
    h_matrix,
    hn_tiling,
    load_fixture,
    one_factorization,
    product,
    rod_tiling,
)
from .extend import is_extensible
from .model import CUBE, TORUS, dumps, is_tiling, load_file, validate
from .montecarlo import SimConfig, estimate_expectation
from .ratfun import format_polynomial

SCHEMA_VERSION = 1
CENSUS_COLUMNS = ("key", "m", "nparams", "prob", "extensible", "aut")


class UsageError(Exception):
    pass


class VerificationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _build_parser():
    parser = _Parser(prog="cubepack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("enumerate", parents=[], help="terminal-class census")
    p.add_argument("--space", choices=(TORUS, CUBE), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--regime", choices=("limit", "finite"), default="limit")
    p.add_argument("--N", type=int, help="grid resolution (finite regime)")
    p.add_argument("--include-zero-prob", action="store_true")
    p.add_argument("--long-running", action="store_true",
                   help="lift resource guards")
    p.add_argument("--checkpoint", metavar="PATH",
                   help="resumable sweep state file")
    p.add_argument("--checkpoint-interval", type=int, default=1,
                   metavar="LEVELS")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("expand", help="series coefficient in the dimension")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--dims", required=True, metavar="A..B",
                   help="dimension range to fit across, e.g. 1..4")
    p.add_argument("--long-running", action="store_true")
    p.set_defaults(func=_cmd_expand)

    p = sub.add_parser("simulate", help="seeded Monte Carlo runs")
    p.add_argument("--space", choices=(TORUS, CUBE), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--track-lamination", action="store_true")
    p.add_argument("--emit-histogram", action="store_true")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("construct", help="emit a named packing as JSON")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--product", nargs=2, metavar=("A.json", "B.json"),
                   help="semidirect product of two packing files")
    g.add_argument("--hmatrix", type=int, metavar="N",
                   help="the n-cube congruence-matrix packing, n odd")
    g.add_argument("--hn-tiling", dest="hn_tiling", type=int, metavar="N",
                   help="completed tiling over the congruence matrix")
    g.add_argument("--one-factorization", dest="one_factorization",
                   type=int, metavar="2P",
                   help="packing from the round-robin factorization of K_2p")
    g.add_argument("--rod", type=int, metavar="N",
                   help="rod tiling with default laminated fillers")
    g.add_argument("--fixture", metavar="NAME",
                   help="a packing from the bundled corpus")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("verify", help="re-derive fixture properties")
    p.add_argument("--fixtures", required=True, metavar="NAME",
                   help="fixture name, name prefix, or 'all'")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("canon", help="canonical data of a packing file")
    p.add_argument("--in", dest="path", required=True, metavar="FILE")
    p.set_defaults(func=_cmd_canon)

    p = sub.add_parser("bench",
                       help="time the compiled kernels against the fallback")
    p.add_argument("--dim", type=int, default=3, choices=(2, 3, 4))
    p.add_argument("--repeat", type=int, default=2,
                   help="timed runs per kernel; the best is reported")
    p.set_defaults(func=_cmd_bench)
    return parser


def _emit_census(records, fmt, out):
    rows = [
        {
            "key": r.key.hex(),
            "m": r.m,
            "nparams": r.nparams,
            "prob": str(r.prob),
            "extensible": r.extensible,
            "aut": r.aut,
        }
        for r in records
    ]
    if fmt == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
        return
    out.write(f"# schema_version={SCHEMA_VERSION}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CENSUS_COLUMNS)
    for row in rows:
        writer.writerow([row[c] if c != "extensible"
                         else str(row[c]).lower() for c in CENSUS_COLUMNS])


def _cmd_enumerate(args, out):
    if args.regime == "limit":
        if args.space != TORUS:
            raise UsageError("the limit census is defined on the torus; "
                             "use expand for cube-space asymptotics")
        records = torus_limit_census(
            args.dim,
            include_zero_prob=args.include_zero_prob,
            allow_large=args.long_running,
            checkpoint_path=args.checkpoint,
            checkpoint_interval=args.checkpoint_interval,
        )
    else:
        if args.N is None:
            raise UsageError("the finite regime needs --N")
        records = finite_N_census(
            args.dim, args.N, space=args.space,
            allow_large=args.long_running,
        )
    _emit_census(records, args.format, out)
    return 0


def _parse_dims(text):
    try:
        if ".." in text:
            lo, hi = text.split("..")
            dims = list(range(int(lo), int(hi) + 1))
        else:
            dims = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse dimension range {text!r}")
    if not dims:
        raise UsageError("empty dimension range")
    return dims


def _cmd_expand(args, out):
    dims = _parse_dims(args.dims)
    polys = interpolate_Ck(args.order, dims, allow_long=args.long_running)
    out.write(f"C_{args.order} = {format_polynomial(polys[args.order])}\n")
    return 0


def _cmd_simulate(args, out):
    cfg = SimConfig(
        space=args.space, dim=args.dim, N=args.N, trials=args.trials,
        seed=args.seed, track_lamination=args.track_lamination,
    )
    report = estimate_expectation(
        cfg, emit_histogram=args.emit_histogram, threads=args.threads
    )
    payload = {
        "space": cfg.space,
        "dim": cfg.dim,
        "N": cfg.N,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "mean": report.mean,
        "variance": report.variance,
        "ci95": list(report.ci95),
    }
    if report.lamination_frequency is not None:
        payload["lamination_frequency"] = report.lamination_frequency
    if report.histogram is not None:
        payload["histogram"] = [list(kv) for kv in report.histogram]
    json.dump(payload, out, indent=2)
    out.write("\n")
    return 0


def _cmd_construct(args, out):
    if args.product is not None:
        p = product(load_file(args.product[0]), load_file(args.product[1]))
    elif args.hmatrix is not None:
        p = h_matrix(args.hmatrix)
    elif args.hn_tiling is not None:
        p = hn_tiling(args.hn_tiling)
    elif args.one_factorization is not None:
        p = factorization_packing(one_factorization(args.one_factorization))
    elif args.rod is not None:
        p = rod_tiling(args.rod)
    else:
        p = load_fixture(args.fixture)
    out.write(dumps(p, indent=2))
    out.write("\n")
    return 0


def _best_time(fn, repeat):
    best, result = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        dt = time.perf_counter() - t0
        if best is None or dt < best:
            best = dt
    return best, result


def _cmd_bench(args, out):
    from . import discrete
    from .backend import HAVE_NUMBA

    kernels = ("numpy", "numba") if HAVE_NUMBA else ("numpy",)
    if not HAVE_NUMBA:
        out.write("compiled backend unavailable; timing the fallback only\n")
    workloads = [
        (f"min maximal search dim={args.dim} N=2",
         lambda k: discrete.min_maximal_packing(args.dim, 2, kernel=k)[0]),
    ]
    if args.dim <= 3:
        # The full grid census is only tractable on the small grids.
        workloads.insert(0, (
            f"finite census dim={args.dim} N=2",
            lambda k: [
                (r.key.bytes, str(r.prob), r.m, r.nparams, r.aut)
                for r in discrete.finite_census(args.dim, 2, kernel=k)
            ]))
    out.write(f"{'workload':34}" + "".join(f"{k:>10}" for k in kernels)
              + ("   speedup\n" if len(kernels) > 1 else "\n"))
    for name, fn in workloads:
        times, results = {}, {}
        for k in kernels:
            times[k], results[k] = _best_time(lambda: fn(k), args.repeat)
        if len(set(map(repr, results.values()))) != 1:
            raise VerificationError(f"kernels disagree on {name}")
        row = f"{name:34}" + "".join(f"{times[k]:9.3f}s" for k in kernels)
        if len(kernels) > 1:
            row += f"{times['numpy'] / times['numba']:9.1f}x"
        out.write(row + "\n")
    return 0


# Pinned properties of the bundled corpus; verify re-derives each field
# from scratch and reports any drift.
_FIXTURE_EXPECTATIONS = {
    "dim6-1": dict(m=8, nparams=21, aut=4, extensible=False, positive=False),
    "dim6-2": dict(m=8, nparams=22, aut=64, extensible=False, positive=False),
    "dim6-3": dict(m=8, nparams=22, aut=64, extensible=False, positive=False),
    "dim6-4": dict(m=8, nparams=22, aut=16, extensible=False, positive=False),
    "dim6-5": dict(m=8, nparams=22, aut=16, extensible=False, positive=False),
    "dim6-6": dict(m=8, nparams=22, aut=16, extensible=False, positive=False),
    "dim6-7": dict(m=8, nparams=22, aut=32, extensible=False, positive=False),
    "dim6-8": dict(m=8, nparams=22, aut=8, extensible=False, positive=False),
    "dim6-9": dict(m=8, nparams=22, aut=16, extensible=False, positive=False),
    "dim4-1over480": dict(
        m=6, nparams=10, aut=4, extensible=False, positive=True
    ),
    "h5": dict(m=5, nparams=15, aut=20, extensible=True, positive=True),
    "laminated-product": dict(
        m=8, nparams=7, aut=128, extensible=False, positive=True
    ),
    "laminated-mixed": dict(
        m=8, nparams=7, aut=128, extensible=False, positive=True
    ),
    "rod": dict(m=8, nparams=6, aut=32, extensible=False, positive=True),
    "minimal-packing": dict(
        m=4, nparams=6, aut=24, extensible=False, positive=True
    ),
}


def verify_fixture(name):
    """Re-derive every pinned property of a bundled fixture.

    Returns the derived report dict; raises VerificationError with a
    field-by-field diff when anything drifted.
    """
    p = load_fixture(name)
    validate(p)
    derived = dict(
        m=p.m,
        nparams=p.nparams,
        aut=automorphism_order(p),
        extensible=is_extensible(p)[0],
        positive=positive_path_exists(p),
    )
    expected = _FIXTURE_EXPECTATIONS.get(name)
    if expected is None:
        raise VerificationError(f"no pinned expectations for {name!r}")
    diffs = [
        f"  {field}: expected {expected[field]}, derived {value}"
        for field, value in derived.items()
        if value != expected[field]
    ]
    if diffs:
        raise VerificationError(
            "\n".join([f"{name}: mismatch"] + diffs)
        )
    derived["name"] = name
    derived["tiling"] = is_tiling(p)
    return derived


def _cmd_verify(args, out):
    corpus = sorted(fixtures())
    if args.fixtures == "all":
        names = corpus
    elif args.fixtures in corpus:
        names = [args.fixtures]
    else:
        names = [n for n in corpus if n.startswith(args.fixtures)]
    if not names:
        raise UsageError(f"no fixture matches {args.fixtures!r}")
    failures = 0
    for name in names:
        try:
            report = verify_fixture(name)
        except VerificationError as exc:
            print(exc, file=sys.stderr)
            failures += 1
            continue
        if report["tiling"]:
            status = "tiling"
        elif report["extensible"]:
            status = "extensible"
        else:
            status = "non-extensible"
        out.write(
            f"{name}: {status}, params={report['nparams']}, "
            f"aut={report['aut']}\n"
        )
    return 1 if failures else 0


def _cmd_canon(args, out):
    p = load_file(args.path)
    validate(p)
    payload = {
        "key": canonical_key(p).hex(),
        "m": p.m,
        "nparams": p.nparams,
        "aut": automorphism_order(p),
        "extensible": is_extensible(p)[0],
        "tiling": is_tiling(p),
    }
    json.dump(payload, out, indent=2)
    out.write("\n")
    return 0


def run(argv, out=None):
    """Entry point; returns the exit code instead of raising SystemExit."""
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ResourceGuardError as exc:
        print(f"refused: {exc} (pass --long-running to override)",
              file=sys.stderr)
        return 2
    except (ConstructionError, FileNotFoundError, ValueError) as exc:
        print(exc, file=sys.stderr)
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
