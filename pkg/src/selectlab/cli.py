"""Command-line front end.

Every subcommand is deterministic: the seed defaults to a fixed
constant (overridable by the SELECTLAB_SEED environment variable, which
in turn loses to an explicit --seed flag), so a bare invocation always
reproduces the same bytes. Exact rationals are serialized as "p/q"
strings in JSON; CSV tables carry both a decimal and a fraction column.
"""

import argparse
import json
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import exact, experiments, limit, sampler
from .exact import format_decimal, format_fraction
from .limit import NumericConsistencyError
from .quickselect import run_random
from .rng import DEFAULT_SEED, make_rng

SEED_ENV_VAR = "SELECTLAB_SEED"


def _default_seed():
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env is not None else DEFAULT_SEED


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _add_common(p, seed=True):
    p.add_argument("--format", choices=("csv", "json"), default="json",
                   help="output format (default: json)")
    p.add_argument("--out", default=None, metavar="PATH",
                   help="output path (default: stdout)")
    if seed:
        p.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (default: {DEFAULT_SEED}, or "
                            f"${SEED_ENV_VAR} if set)")
        p.add_argument("--stream", type=int, default=0,
                       help="RNG stream index (default: 0)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker streams for parallel runs (default: 1)")


def _rng_of(args):
    seed = args.seed if args.seed is not None else _default_seed()
    return make_rng(seed, args.stream)


def _pmf_json(pmf):
    return {str(s): format_fraction(m) for s, m in zip(pmf.support, pmf.mass)}


def cmd_partition_dist(args, fh):
    split = exact.split_pmf(args.n)
    cond = {j: exact.swaps_conditional_pmf(args.n, j)
            for j in range(1, args.n)}
    if args.format == "json":
        json.dump({"n": args.n,
                   "split": _pmf_json(split),
                   "swaps_given_split": {str(j): _pmf_json(p)
                                         for j, p in cond.items()}},
                  fh, indent=2)
        fh.write("\n")
    else:
        fh.write("j,k,prob,prob_frac\n")
        for j, p in cond.items():
            pj = split[j]
            for k, m in zip(p.support, p.mass):
                q = pj * m
                fh.write(f"{j},{k},{format_decimal(q)},{format_fraction(q)}\n")


def cmd_run(args, fh):
    rng = _rng_of(args)
    records = [run_random(args.n, rng=rng) for _ in range(args.runs)]
    if args.format == "json":
        json.dump([{"n": r.n, "rank": r.rank, "exchanges": r.exchanges,
                    "normalized": format_fraction(r.normalized)}
                   for r in records], fh, indent=2)
        fh.write("\n")
    else:
        fh.write("n,rank,exchanges,normalized\n")
        for r in records:
            fh.write(f"{r.n},{r.rank},{r.exchanges},{float(r.normalized):.17g}\n")


def cmd_exact_mean(args, fh):
    table = exact.expected_total_swaps(args.nmax, exact=not args.float)
    if args.format == "json":
        json.dump({str(n): format_fraction(ey)
                   for n, _, ey, _ in table.rows()}, fh, indent=2)
        fh.write("\n")
    else:
        table.write_csv(fh)


def cmd_moves(args, fh):
    rows = experiments.moves_vs_exchanges_report(
        args.n_list, runs=args.runs,
        rng=_rng_of(args) if args.runs else None)
    if args.format == "json":
        json.dump([r.__dict__ for r in rows], fh, indent=2)
        fh.write("\n")
    else:
        fh.write("n,e_moves,two_e_y,difference,difference_per_n,var_2y_over_n2\n")
        for r in rows:
            fh.write(f"{r.n},{r.e_moves:.17g},{r.two_e_y:.17g},"
                     f"{r.difference:.17g},{r.difference_per_n:.17g},"
                     f"{r.var_2y_over_n2:.17g}\n")


def cmd_moments(args, fh):
    table = limit.moments(args.kmax)
    if args.format == "json":
        json.dump({str(k): format_fraction(table[k])
                   for k in range(args.kmax + 1)}, fh, indent=2)
        fh.write("\n")
    else:
        fh.write("k,moment,moment_frac\n")
        for k in range(args.kmax + 1):
            fh.write(f"{k},{format_decimal(table[k])},"
                     f"{format_fraction(table[k])}\n")


def cmd_cdf(args, fh):
    grid = limit.cdf_solve(grid_size=args.grid, tol=args.tol,
                           max_iter=args.max_iter)
    if not grid.converged:
        raise NumericConsistencyError(
            f"cdf_solve did not converge: residual {grid.residual:g}")
    if args.fig1:
        table = grid.fig1_table()
        cols = [f"{c:.1f}" for c in np.arange(8) * 0.1]
        fh.write("      " + " ".join(f"{c:>6s}" for c in cols) + "\n")
        for i in range(20):
            label = f"{i * 0.005:.3f}"
            fh.write(label + " " + " ".join(f"{v:6.4f}" for v in table[i])
                     + "\n")
    elif args.format == "json":
        json.dump({"residual": grid.residual, "iterations": grid.iterations,
                   "t": list(map(float, grid.points)),
                   "F": list(map(float, grid.values))}, fh)
        fh.write("\n")
    else:
        grid.write_csv(fh)


def cmd_density(args, fh):
    grid = limit.density_solve(grid_size=args.grid, tol=args.tol,
                               max_iter=args.max_iter)
    if not grid.converged:
        raise NumericConsistencyError(
            f"density_solve did not converge: residual {grid.residual:g}")
    if args.format == "json":
        json.dump({"mass": grid.mass, "mean": grid.mean,
                   "second_moment": grid.second_moment,
                   "max": grid.max_value, "residual": grid.residual,
                   "t": list(map(float, grid.points)),
                   "f": list(map(float, grid.values))}, fh)
        fh.write("\n")
    else:
        grid.write_csv(fh)


def _sample_parallel(count, seed, base_stream, threads, chunk):
    if threads <= 1:
        return sampler.sample(count, seed=seed, stream=base_stream,
                              chunk=chunk, return_tau=True)
    from concurrent.futures import ThreadPoolExecutor
    share = [count // threads + (1 if k < count % threads else 0)
             for k in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(sampler.sample, share[k], seed=seed,
                            stream=base_stream + k, chunk=chunk,
                            return_tau=True)
                for k in range(threads)]
        parts = [f.result() for f in futs]  # merged in stream order
    values = np.concatenate([p[0] for p in parts])
    taus = np.concatenate([p[1] for p in parts])
    return values, taus


def cmd_sample(args, fh):
    seed = args.seed if args.seed is not None else _default_seed()
    values, taus = _sample_parallel(args.count, seed, args.stream,
                                    args.threads, args.chunk)
    if args.raw:
        values.astype(np.float64).tofile(args.raw)
    if args.summary or args.raw:
        json.dump(sampler.summarize(values, taus), fh, indent=2)
        fh.write("\n")
    elif args.format == "json":
        json.dump({"summary": sampler.summarize(values, taus),
                   "values": [float(v) for v in values]}, fh)
        fh.write("\n")
    else:
        fh.write("value,tau\n")
        for v, t in zip(values, taus):
            fh.write(f"{v:.17g},{t}\n")


def cmd_kernel_check(args, fh):
    rng = _rng_of(args)
    results = []
    for x in args.x:
        stat = sampler.kernel_update_check(x, args.runs, rng)
        crit = experiments.ks_critical_two_sample(args.runs, args.runs,
                                                  args.significance)
        results.append({"x": x, "runs": args.runs, "ks": stat,
                        "critical": crit, "ok": stat < crit})
    json.dump(results, fh, indent=2)
    fh.write("\n")
    if not all(r["ok"] for r in results):
        raise NumericConsistencyError(
            "multigamma update failed the distribution-identity check")


def cmd_converge(args, fh):
    grid = limit.cdf_solve(grid_size=args.grid, tol=args.tol)
    seed = args.seed if args.seed is not None else _default_seed()
    report = experiments.convergence_study(args.n_list, args.runs, grid,
                                           seed=seed, stream=args.stream)
    if args.format == "json":
        fh.write(report.to_json())
        fh.write("\n")
    else:
        report.write_csv(fh)


def cmd_constants(args, fh):
    out = {}
    if args.p is not None:
        rc = limit.rate_constants(args.p)
        out["lp"] = {"p": rc.p, "tau_p": rc.tau_p, "kappa_p": rc.kappa_p}
    if args.eps is not None:
        rc = limit.ks_rate_bound(args.eps, args.density_bound)
        out["ks"] = {"eps": rc.eps, "p": rc.p, "tau_p": rc.tau_p,
                     "kappa_p": rc.kappa_p, "omega_eps": rc.omega_eps,
                     "density_bound": rc.density_bound_used}
    if not out:
        raise SystemExit2("constants requires --p and/or --eps")
    json.dump(out, fh, indent=2)
    fh.write("\n")


def cmd_enumerate(args, fh):
    enum = exact.enumerate_small(args.n, with_quickselect=not args.partition_only)
    out = {"n": args.n,
           "split_swaps_counts": {f"{j},{k}": c
                                  for (j, k), c in sorted(enum.it_counts.items())},
           }
    if enum.y_counts:
        out["total_swaps_counts"] = {str(y): c
                                     for y, c in sorted(enum.y_counts.items())}
        out["mean_total_swaps"] = format_fraction(enum.mean_total_swaps())
    json.dump(out, fh, indent=2)
    fh.write("\n")


class SystemExit2(Exception):
    pass


def _int_list(text):
    return [int(v) for v in text.split(",") if v]


def build_parser():
    ap = argparse.ArgumentParser(
        prog="selectlab",
        description="Key-exchange analysis of Hoare's Quickselect: exact "
                    "finite-n laws, the limit perpetuity, and a perfect "
                    "sampler.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition-dist",
                       help="exact split and conditional swap laws")
    p.add_argument("--n", type=int, required=True)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_partition_dist)

    p = sub.add_parser("run", help="instrumented Quickselect on random input")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--runs", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("exact-mean", help="exact E[Y_n] table via recurrence")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--float", action="store_true",
                   help="float fast path instead of exact rationals")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_exact_mean)

    p = sub.add_parser("moves", help="data moves vs twice the exchange mean")
    p.add_argument("--n-list", type=_int_list, required=True,
                   metavar="N1,N2,...")
    p.add_argument("--runs", type=int, default=0,
                   help="Monte Carlo runs for Var(2Y_n)/n^2 (0 = skip)")
    _add_common(p)
    p.set_defaults(func=cmd_moves)

    p = sub.add_parser("moments", help="exact moments of the limit law")
    p.add_argument("--kmax", type=int, default=10)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("cdf", help="distribution function of the limit law")
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--fig1", action="store_true",
                   help="compact 20x8 table layout, 4 decimals")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("density", help="density of the limit law")
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=400)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("sample", help="exact draws from the limit law (CFTP)")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--chunk", type=int, default=1_000_000,
                   help="chains advanced in lockstep per chunk")
    p.add_argument("--raw", metavar="PATH", default=None,
                   help="write raw float64 samples to PATH")
    p.add_argument("--summary", action="store_true",
                   help="print summary JSON only")
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("kernel-check",
                       help="two-sample KS test of the multigamma update")
    p.add_argument("--x", type=float, nargs="+", default=[0.0, 0.3, 1.0])
    p.add_argument("--runs", type=int, default=1_000_000)
    p.add_argument("--significance", type=float, default=0.001)
    _add_common(p)
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("converge",
                       help="KS distance of Y_n/n to the limit law")
    p.add_argument("--n-list", type=_int_list, default=[100, 1000, 10000],
                   metavar="N1,N2,...")
    p.add_argument("--runs", type=int, default=100_000)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--tol", type=float, default=1e-7)
    _add_common(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("constants", help="convergence-rate constants")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--density-bound", type=float, default=109.0)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("enumerate", help="brute force over all permutations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--partition-only", action="store_true",
                   help="skip the full Quickselect sweep")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_enumerate)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        with _open_out(args.out) as fh:
            args.func(args, fh)
    except NumericConsistencyError as err:
        print(f"numeric consistency failure: {err}", file=sys.stderr)
        return 1
    except SystemExit2 as err:
        ap.error(str(err))
    return 0


if __name__ == "__main__":
    sys.exit(main())
