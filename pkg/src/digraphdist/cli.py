"""Command-line interface.

Subcommands: ``gen`` (sample a digraph to an edge-list CSV), ``distances``
(joint distance histogram), ``approx`` (single tail approximant as JSON),
``compare`` (empirical vs approximation table), ``scaling`` (error-scaling
study), ``realnet`` (edge-list summary).  All commands are deterministic in
``--seed`` at any ``--threads``; exit codes: 0 success, 2 parameter or domain
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from . import harness
from .approximation import joint_tail, scale_params, undirected_tail
from .errors import CapacityError, DomainError, IngestionError, NumericalError, ParameterError
from .graph_model import export_edge_list, load_edge_list, sample_digraph
from .rand_kit import derive_stream


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, required=True, help="64-bit master seed")
    sub.add_argument("--threads", type=int, default=1, help="worker cap (default 1)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="digraphdist")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="sample a Bernoulli digraph to an edge-list CSV")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, required=True)
    gen.add_argument("--theta", type=float, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--keep-kinds", action="store_true",
                     help="one row per edge with a kind column (out/bi)")
    _common(gen)

    dist = subs.add_parser("distances", help="joint distance histogram over sampled digraphs")
    dist.add_argument("--n", type=int, required=True)
    dist.add_argument("--m", type=float, required=True)
    dist.add_argument("--theta", type=float, required=True)
    dist.add_argument("--pairs", type=int, required=True)
    dist.add_argument("--out", required=True)
    _common(dist)

    approx = subs.add_parser("approx", help="tail approximant estimate as JSON")
    approx.add_argument("--n", type=int, required=True)
    approx.add_argument("--m", type=float, required=True)
    approx.add_argument("--theta", type=float, default=None)
    approx.add_argument("--u1", type=int, required=True)
    approx.add_argument("--u2", type=int, default=None)
    approx.add_argument("--samples", type=int, default=1_000_000)
    approx.add_argument("--depth", type=int, default=None)
    _common(approx)

    comp = subs.add_parser("compare", help="empirical vs approximation tail table")
    comp.add_argument("--n", type=int, required=True)
    comp.add_argument("--m", type=float, required=True)
    comp.add_argument("--theta", type=float, default=None)
    comp.add_argument("--u-min", type=int, default=-3)
    comp.add_argument("--u-max", type=int, default=3)
    comp.add_argument("--graph-samples", type=int, required=True)
    comp.add_argument("--w-samples", type=int, required=True)
    comp.add_argument("--pairs-per-graph", type=int, default=1)
    comp.add_argument("--out", required=True)
    _common(comp)

    scal = subs.add_parser("scaling", help="error-scaling study over a size list")
    scal.add_argument("--n-list", required=True, help="comma-separated increasing sizes")
    scal.add_argument("--m", type=float, required=True)
    scal.add_argument("--theta", type=float, default=None)
    scal.add_argument("--u-min", type=int, default=-3)
    scal.add_argument("--u-max", type=int, default=3)
    scal.add_argument("--graph-samples", type=int, required=True)
    scal.add_argument("--w-samples", type=int, required=True)
    scal.add_argument("--out", required=True)
    _common(scal)

    real = subs.add_parser("realnet", help="summary of an ingested edge list")
    real.add_argument("--edges", required=True)
    real.add_argument("--directed", action="store_true")
    real.add_argument("--max-exact-n", type=int, default=10_000)
    real.add_argument("--sample-pairs", type=int, default=200_000)
    _common(real)
    return parser


def _cmd_gen(args) -> None:
    stream = derive_stream(args.seed, 0)
    dg = sample_digraph(args.n, args.p, args.theta, stream)
    export_edge_list(dg, args.out, keep_kinds=args.keep_kinds)


def _cmd_distances(args) -> None:
    stream = derive_stream(args.seed, 0)
    cap = args.n
    d_out, d_in = harness.sample_joint_distances(
        args.n, args.m, args.theta, args.pairs, stream, cap, threads=args.threads)
    hist: dict[tuple[float, float], int] = {}
    for a, b in zip(d_out.tolist(), d_in.tolist()):
        key = (math.inf if a > cap else float(a), math.inf if b > cap else float(b))
        hist[key] = hist.get(key, 0) + 1
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["d_out", "d_in", "count"])
        for (a, b), count in sorted(hist.items()):
            writer.writerow(["inf" if math.isinf(a) else int(a),
                             "inf" if math.isinf(b) else int(b), count])


def _cmd_approx(args) -> None:
    params = scale_params(args.n, args.m, args.theta)
    stream = derive_stream(args.seed, 0)
    if args.theta is None:
        est = undirected_tail(params, args.u1, args.samples, depth=args.depth,
                              stream=stream, threads=args.threads)
    else:
        u2 = args.u1 if args.u2 is None else args.u2
        est = joint_tail(params, args.u1, u2, args.samples, depth=args.depth,
                         stream=stream, threads=args.threads)
    out = {
        "estimate": est.value,
        "std_error": est.std_error,
        "clamp_fraction": est.clamp_fraction,
        "params": {
            "n": params.n, "m": params.m, "theta": params.theta,
            "m0": params.m0, "r_n": params.r_n, "chi_n": params.chi_n,
            "eps_n": params.eps_n, "depth": est.depth, "samples": est.samples,
            "u1": args.u1, "u2": args.u2,
        },
    }
    print(json.dumps(out, sort_keys=True))


def _cmd_compare(args) -> None:
    stream = derive_stream(args.seed, 0)
    u_grid = range(args.u_min, args.u_max + 1)
    table = harness.compare(args.n, args.m, args.theta, u_grid, args.w_samples,
                            args.graph_samples, stream,
                            pairs_per_graph=args.pairs_per_graph, threads=args.threads)
    table.write_csv(args.out)
    print(json.dumps(table.meta, sort_keys=True))


def _cmd_scaling(args) -> None:
    stream = derive_stream(args.seed, 0)
    n_list = [int(tok) for tok in args.n_list.split(",") if tok]
    study = harness.scaling_study(n_list, args.m, args.theta,
                                  range(args.u_min, args.u_max + 1),
                                  args.graph_samples, args.w_samples, stream,
                                  threads=args.threads)
    study.write_csv(args.out)
    summary = {}
    if study.slope is not None:
        summary["slope"] = study.slope
        summary["slope_se"] = study.slope_se
    print(json.dumps(summary, sort_keys=True))


def _cmd_realnet(args) -> None:
    stream = derive_stream(args.seed, 0)
    dg = load_edge_list(args.edges, directed=args.directed)
    summary = harness.realnet_summary(dg, stream, max_exact_n=args.max_exact_n,
                                      sample_pairs=args.sample_pairs)
    print(json.dumps(summary, sort_keys=True))


_COMMANDS = {
    "gen": _cmd_gen,
    "distances": _cmd_distances,
    "approx": _cmd_approx,
    "compare": _cmd_compare,
    "scaling": _cmd_scaling,
    "realnet": _cmd_realnet,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (ParameterError, DomainError, CapacityError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IngestionError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
