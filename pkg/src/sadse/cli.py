"""Command-line front end: ``sadse explore | layers | simulate``."""
from __future__ import annotations

import argparse
import logging
import sys
import warnings

import numpy as np

from . import report as rpt
from .designspace import BOTH, GEN_RULES, PAPER_RESULTS, ExplorationParams, TraversalOrder, single_point
from .dse import explore
from .netmodel import ChainWarning, NetworkError, load_network
from .resources import load_budget
from .sim import reference_layer, simulate_layer

_TRAVERSALS = {
    "featuremap": (TraversalOrder.FEATURE_MAP_REUSE,),
    "filter": (TraversalOrder.FILTER_REUSE,),
    "both": BOTH,
}


def _add_exploration_flags(p):
    p.add_argument("--network", required=True, help="network JSON file")
    p.add_argument("--fpga", required=True, help="hardware budget JSON file")
    p.add_argument("--F", type=int, default=4, help="tile-bound divisor (default 4)")
    p.add_argument("--P", type=int, default=6, help="number of tile sizes (default 6)")
    p.add_argument("--Q", type=int, default=4, help="number of array column counts (default 4)")
    p.add_argument("--R", type=int, default=4, help="number of parallel-channel counts (default 4)")
    p.add_argument("--traversal", choices=sorted(_TRAVERSALS), default="both")
    p.add_argument("--gen-rule", choices=GEN_RULES, default=PAPER_RESULTS)
    p.add_argument("--perf-all", action="store_true", help="estimate cycles for infeasible points too")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (0 = all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sadse", description="Systolic-array CNN accelerator design space exploration")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explore", help="enumerate, assess and rank design points")
    _add_exploration_flags(p)
    p.add_argument("--out", default="report", help="output prefix (PREFIX.csv, PREFIX.json, PREFIX.plot.csv)")

    p = sub.add_parser("layers", help="per-layer memory table of one design point")
    _add_exploration_flags(p)
    p.add_argument("--point-id", type=int, help="design point id (default: best ranked)")
    p.add_argument("--out", help="write CSV here instead of stdout")

    p = sub.add_parser("simulate", help="run one layer through the dataflow simulator")
    p.add_argument("--layer", required=True, help="network JSON file holding the layer")
    p.add_argument("--layer-index", type=int, default=1, help="1-based layer in that file")
    p.add_argument("--r-t", type=int, help="tile rows")
    p.add_argument("--c-sa", type=int, help="array columns")
    p.add_argument("--ch-sa", type=int, help="parallel channels")
    p.add_argument("--traversal", choices=sorted(_TRAVERSALS), default="both")
    p.add_argument("--point-id", type=int, help="take the point from a prior report instead of flags")
    p.add_argument("--report", help="PREFIX.json of a prior explore run (with --point-id)")
    p.add_argument("--seed", type=int, default=0, help="seed for random integer tensors")
    p.add_argument("--check", action="store_true", help="compare against the reference convolution")
    p.add_argument("--trace", help="write the per-event transfer trace to this file")
    p.add_argument("--corrupt-weights", action="store_true", help=argparse.SUPPRESS)
    return parser


def _params(args) -> ExplorationParams:
    return ExplorationParams(args.F, args.P, args.Q, args.R, _TRAVERSALS[args.traversal], args.gen_rule)


def _explore(args):
    net = load_network(args.network)
    budget = load_budget(args.fpga)
    return explore(net, budget, _params(args), perf_all=args.perf_all, n_jobs=args.jobs)


def cmd_explore(args) -> int:
    report = _explore(args)
    paths = rpt.write_report(report, args.out)
    n_ok = len(report.feasible)
    print(f"{len(report.points)} points, {n_ok} feasible")
    if n_ok == 0:
        print(f"no feasible point; failures by constraint: {report.binding_constraints()}")
    for trav, ep in report.best_by_traversal().items():
        if ep is not None:
            dp = ep.point
            print(f"best {trav}: id={dp.id} r_t={dp.tile.nominal} c_sa={dp.c_sa} r_sa={dp.r_sa} "
                  f"ch_sa={dp.ch_sa} t_total={ep.t_total}")
    for path in paths:
        print(f"wrote {path}")
    return 0


def cmd_layers(args) -> int:
    report = _explore(args)
    if args.point_id is None:
        ep = report.best
        if ep is None:
            print("error: no feasible point to default to; pass --point-id", file=sys.stderr)
            return 2
    else:
        try:
            ep = report.point(args.point_id)
        except KeyError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return 2
    text = rpt.layers_csv(ep, report.budget.word_bits)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def random_tensors(layer, seed: int):
    rng = np.random.default_rng(seed)
    ifm = rng.integers(-4, 5, size=(layer.ch, layer.r, layer.c), dtype=np.int64)
    filters = rng.integers(-4, 5, size=(layer.n_f, layer.ch, layer.r_f, layer.c_f), dtype=np.int64)
    return ifm, filters


def _sim_points(args, net, layer):
    if args.point_id is not None:
        if not args.report:
            raise ValueError("--point-id needs --report")
        dp = rpt.load_report(args.report).point(args.point_id).point
        if len(dp.tile.r_t) < layer.index:
            raise ValueError(f"point {dp.id} has no tile for layer {layer.index}")
        return [single_point(net, list(dp.tile.r_t)[:len(net)], dp.c_sa, dp.ch_sa, dp.traversal)]
    if None in (args.r_t, args.c_sa, args.ch_sa):
        raise ValueError("give --r-t, --c-sa and --ch-sa, or --point-id with --report")
    return [single_point(net, args.r_t, args.c_sa, args.ch_sa, t) for t in _TRAVERSALS[args.traversal]]


def cmd_simulate(args) -> int:
    net = load_network(args.layer)
    if not 1 <= args.layer_index <= len(net):
        raise ValueError(f"layer index {args.layer_index} out of range 1..{len(net)}")
    layer = net.layers[args.layer_index - 1]
    ifm, filters = random_tensors(layer, args.seed)
    ref = reference_layer(layer, ifm, filters) if args.check else None
    status = 0
    trace_lines = []
    for dp in _sim_points(args, net, layer):
        res = simulate_layer(layer, dp, ifm, filters, trace=bool(args.trace),
                             _corrupt_weights=args.corrupt_weights)
        print(f"[{dp.traversal}] r_t={dp.tile.rows(layer.index)} c_sa={dp.c_sa} ch_sa={dp.ch_sa}")
        for key, value in res.counts.items():
            print(f"  {key}={value}")
        if ref is not None:
            ok = res.ofm.shape == ref.shape and np.array_equal(res.ofm, ref)
            print(f"  check={'pass' if ok else 'FAIL'}")
            status |= 0 if ok else 1
        trace_lines += res.trace_lines()
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("event,layer,tile,filter_group,channel_group,words\n")
            fh.writelines(line + "\n" for line in trace_lines)
    return status


COMMANDS = {"explore": cmd_explore, "layers": cmd_layers, "simulate": cmd_simulate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    logging.captureWarnings(True)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always" if args.verbose else "ignore", ChainWarning)
            return COMMANDS[args.command](args)
    except (OSError, NetworkError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
