"""Command-line entry point.

Subcommands: generate, cluster, cut, experiment, heatmap.  Exit codes:
0 success, 1 usage error, 2 data/model error.  Data/model errors print a
single machine-parsable line ``error[<module>]: <message>`` to stderr.

All randomness flows from one seed: ``--seed`` if given, else the
MXSPEC_SEED environment variable, else the documented default 0xD15EA5E.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import experiments as xp
from .core import DynamicCoupling, load_network, save_network
from .errors import MxspecError, ParseError
from .generators import (
    RngSeed,
    gen_er_multiplex,
    gen_fixed_sbm_multiplex,
    gen_overlap_multiplex,
)
from .operators import build_dynamic, build_supra, load_coupling, reduce_indivisible
from .spectral import Partition, eig_sym, fiedler_bipartition, spectral_kway
from .cuts import cut_cost, decompose_dynamic, decompose_supra, quadratic_form

DEFAULT_SEED = xp.DEFAULT_SEED

_DESK_GRIDS = {
    "er": dict(p=[0.05, 0.15, 0.25, 0.35, 0.45], k=[2, 3, 5]),
    "fixed-sbm": dict(p=[round(0.1 * i, 1) for i in range(11)], w=[0.1, 1.0, 2.0, 5.0], k=[2, 6]),
    "overlap": dict(p=[0.05, 0.1, 0.5, 0.9], q=[0.05, 0.1, 0.5, 0.9]),
    "overlap-supra": dict(w=[0.5, 1.0, 2.0, 3.0, 5.0]),
    "overlap-kway": dict(w=[2.0, 5.0, 30.0], p=[0.3, 0.5, 0.7], q=[0.3, 0.5, 0.7]),
}

_FULL_GRIDS = {
    "er": dict(p=[round(0.05 + 0.01 * i, 2) for i in range(46)], k=list(range(2, 11))),
    "fixed-sbm": dict(
        p=[round(0.1 * i, 1) for i in range(11)],
        w=[round(0.1 * i, 1) for i in range(51)],
        k=list(range(2, 11)),
    ),
    "overlap": dict(
        p=[round(0.05 * i, 2) for i in range(1, 20)],
        q=[round(0.05 * i, 2) for i in range(1, 20)],
    ),
    "overlap-supra": dict(w=[round(0.1 * i, 1) for i in range(1, 51)]),
    "overlap-kway": dict(w=[round(0.5 * i, 1) for i in range(1, 61)],
                         p=[0.3, 0.5, 0.7], q=[0.3, 0.5, 0.7]),
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error[cli]: {message}", file=sys.stderr)
        raise SystemExit(1)


def _float_list(text: str) -> list:
    return [float(tok) for tok in text.split(",") if tok != ""]


def _int_list(text: str) -> list:
    return [int(tok) for tok in text.split(",") if tok != ""]


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("MXSPEC_SEED")
    if env is not None:
        try:
            return int(env, 0)
        except ValueError:
            raise ParseError(f"MXSPEC_SEED is not an integer: {env!r}")
    return DEFAULT_SEED


def _build_parser() -> _Parser:
    parser = _Parser(prog="mxspec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic multiplex network")
    gen.add_argument("--type", required=True, choices=["er", "sbm-fixed", "sbm-overlap"])
    gen.add_argument("--n", type=int, default=100, help="nodes per layer")
    gen.add_argument("--k", type=int, default=2, help="number of layers")
    gen.add_argument("--p", type=float, default=0.1,
                     help="ER wiring probability / SBM inter-block probability")
    gen.add_argument("--intra", type=float, default=0.9,
                     help="overlap SBM intra-block probability")
    gen.add_argument("--inter", type=float, default=0.1,
                     help="overlap SBM inter-block probability")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True, help="output .mpx path")

    clu = sub.add_parser("cluster", help="spectral clustering of a .mpx network")
    _model_flags(clu)
    clu.add_argument("--input", required=True)
    clu.add_argument("--clusters", type=int, default=2)
    clu.add_argument("--seed", type=int, default=None)
    clu.add_argument("--out", required=True, help="output assignment CSV")

    cut = sub.add_parser("cut", help="cut cost of a partition, with optional decomposition")
    _model_flags(cut)
    cut.add_argument("--input", required=True)
    cut.add_argument("--partition", required=True, help="assignment CSV (copy_index, cluster)")
    cut.add_argument("--decompose", action="store_true",
                     help="also print the layer/coupling decomposition terms")

    exp = sub.add_parser("experiment", help="run a seeded parameter sweep")
    exp.add_argument("name", choices=["er", "fixed-sbm", "overlap", "overlap-supra", "overlap-kway"])
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--instances", type=int, default=20)
    exp.add_argument("--n", type=int, default=100)
    exp.add_argument("--model", default="both", choices=["both", "supra", "dynamic"],
                     help="operator model (er, fixed-sbm, overlap-kway)")
    exp.add_argument("--p-grid", type=_float_list, default=None, help="comma-separated values")
    exp.add_argument("--q-grid", type=_float_list, default=None)
    exp.add_argument("--w-grid", type=_float_list, default=None)
    exp.add_argument("--k-grid", type=_int_list, default=None)
    exp.add_argument("--supra-weight", type=float, default=1.0,
                     help="supra coupling weight for the er experiment")
    exp.add_argument("--intra", type=float, default=0.9)
    exp.add_argument("--inter", type=float, default=0.1)
    exp.add_argument("--full", action="store_true",
                     help="paper-scale grids and 100 instances instead of desk-scale defaults")
    exp.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                     help="parallel worker processes (output is order-deterministic; "
                          "default: available parallelism)")
    exp.add_argument("--out", required=True, help="results CSV path")
    exp.add_argument("--aggregate", default=None, help="optional per-point means CSV path")

    heat = sub.add_parser("heatmap", help="dense grid CSV from a results CSV")
    heat.add_argument("results", help="results CSV produced by `mxspec experiment`")
    heat.add_argument("--x", required=True, help="parameter name for columns")
    heat.add_argument("--y", required=True, help="parameter name for rows")
    heat.add_argument("--metric", required=True,
                      help="metric to aggregate (mean for numeric, modal label otherwise)")
    heat.add_argument("--out", default=None, help="output path (default: stdout)")
    return parser


def _model_flags(parser) -> None:
    parser.add_argument("--model", required=True, choices=["supra", "dynamic", "aggregate"])
    parser.add_argument("--supra-weight", type=float, default=None,
                        help="inter-layer weight w (supra model)")
    parser.add_argument("--coupling", default=None,
                        help=".cpl coupling file (dynamic model; default C = I)")


def _build_operator(args, net):
    if args.model == "supra":
        w = args.supra_weight if args.supra_weight is not None else 1.0
        return build_supra(net, w)
    coupling = (
        load_coupling(args.coupling, net.n, net.k)
        if args.coupling
        else DynamicCoupling.identity(net.n, net.k)
    )
    return build_dynamic(net, coupling)


def _cmd_generate(args) -> int:
    seed = RngSeed(_resolve_seed(args), ("generate", args.type))
    planted = []
    if args.type == "er":
        net = gen_er_multiplex(args.n, args.k, args.p, seed)
    elif args.type == "sbm-fixed":
        net, part = gen_fixed_sbm_multiplex(args.n, args.k, args.p, seed)
        planted = [part]
    else:
        net, part1, part2 = gen_overlap_multiplex(args.n, args.intra, args.inter, seed)
        planted = [part1, part2]
    save_network(net, args.out)
    base = args.out[:-4] if args.out.endswith(".mpx") else args.out
    for idx, part in enumerate(planted):
        suffix = ".planted.csv" if idx == 0 else f".planted{idx + 1}.csv"
        with open(base + suffix, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["copy_index", "cluster"])
            for copy_index, cluster in enumerate(part.labels.tolist()):
                writer.writerow([copy_index, cluster])
    return 0


def _cmd_cluster(args) -> int:
    net = load_network(args.input)
    seed = RngSeed(_resolve_seed(args), ("cluster",))
    if args.model == "aggregate":
        reduced = reduce_indivisible(build_supra(net, 0.0))
        lap = reduced.laplacian
        lift = True
    else:
        lap = _build_operator(args, net).laplacian
        lift = False
    if args.clusters == 2:
        part, fiedler_value, degenerate = fiedler_bipartition(lap)
        system = eig_sym(lap)
        multiplicity = int(np.sum(
            np.abs(system.eigenvalues - fiedler_value) <= system.zero_tolerance
        ))
        meta = (f"% fiedler_value={fiedler_value!r} degenerate={int(degenerate)} "
                f"fiedler_multiplicity={multiplicity}")
    else:
        part = spectral_kway(lap, args.clusters, seed)
        meta = f"% clusters={args.clusters} restarts=10"
    labels = part.labels
    if lift:
        labels = np.tile(labels, net.k)  # node clusters lifted to every copy
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(meta + "\n")
        writer = csv.writer(fh)
        writer.writerow(["copy_index", "layer", "node", "cluster"])
        for copy_index, cluster in enumerate(labels.tolist()):
            writer.writerow([copy_index, copy_index // net.n, copy_index % net.n, cluster])
    return 0


def _read_partition_csv(path, expected: int) -> Partition:
    labels = np.full(expected, -1, dtype=int)
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [line for line in fh if not line.startswith("%")]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(rows)
    if reader.fieldnames is None or "copy_index" not in reader.fieldnames \
            or "cluster" not in reader.fieldnames:
        raise ParseError(f"{path}: expected columns copy_index, cluster")
    for record in reader:
        try:
            idx, cluster = int(record["copy_index"]), int(record["cluster"])
        except (ValueError, TypeError):
            raise ParseError(f"{path}: bad assignment row {record!r}")
        if not 0 <= idx < expected:
            raise ParseError(f"{path}: copy_index {idx} out of range [0, {expected})")
        labels[idx] = cluster
    if np.any(labels < 0):
        missing = int(np.nonzero(labels < 0)[0][0])
        raise ParseError(f"{path}: no cluster assigned to copy_index {missing}")
    return Partition(labels=labels, c=int(labels.max()) + 1)


def _cmd_cut(args) -> int:
    net = load_network(args.input)
    if args.model == "aggregate":
        raise ParseError("cut analysis is defined on the full operators; "
                         "use --model supra or dynamic")
    op = _build_operator(args, net)
    part = _read_partition_csv(args.partition, op.num_copies)
    writer = csv.writer(sys.stdout)
    writer.writerow(["term", "value"])
    if part.c == 2 and args.decompose:
        if args.model == "supra":
            w = args.supra_weight if args.supra_weight is not None else 1.0
            report = decompose_supra(net, w, part)
        else:
            report = decompose_dynamic(net, op.coupling, part)
        writer.writerow(["total", repr(report.total)])
        writer.writerow(["quadratic_form", repr(report.quadratic_form)])
        for name, value in report.terms:
            writer.writerow([name, repr(value)])
    else:
        writer.writerow(["total", repr(cut_cost(op, part))])
        if part.c == 2:
            writer.writerow(["quadratic_form", repr(quadratic_form(op, part))])
    return 0


def _cmd_experiment(args) -> int:
    seed = _resolve_seed(args)
    grids = _FULL_GRIDS[args.name] if args.full else _DESK_GRIDS[args.name]
    instances = 100 if args.full and args.instances == 20 else args.instances
    p_grid = args.p_grid if args.p_grid is not None else grids.get("p")
    q_grid = args.q_grid if args.q_grid is not None else grids.get("q")
    w_grid = args.w_grid if args.w_grid is not None else grids.get("w")
    k_grid = args.k_grid if args.k_grid is not None else grids.get("k")

    if args.name == "er":
        result = xp.run_er_experiment(
            p_grid, k_grid, instances, model=args.model, seed=seed,
            n=args.n, w=args.supra_weight, jobs=args.jobs)
    elif args.name == "fixed-sbm":
        result = xp.run_fixed_sbm_experiment(
            p_grid, w_grid, k_grid, instances, model=args.model, seed=seed,
            n=args.n, jobs=args.jobs)
    elif args.name == "overlap":
        result = xp.run_overlap_experiment(
            p_grid, q_grid, instances, seed=seed, n=args.n,
            intra=args.intra, inter=args.inter, jobs=args.jobs)
    elif args.name == "overlap-supra":
        result = xp.run_overlap_supra_experiment(
            w_grid, instances, seed=seed, n=args.n,
            intra=args.intra, inter=args.inter, jobs=args.jobs)
    else:
        model = "supra" if args.model == "both" else args.model
        result = xp.run_overlap_kway(
            model, instances, seed=seed, w_grid=w_grid, p_grid=p_grid,
            q_grid=q_grid, n=args.n, intra=args.intra, inter=args.inter,
            jobs=args.jobs)
    xp.write_results_csv(result, args.out)
    if args.aggregate:
        xp.write_aggregate_csv(result, args.aggregate)
    return 0


def _cmd_heatmap(args) -> int:
    _, rows = xp.read_results_csv(args.results)
    if args.out:
        xp.write_heatmap_csv(rows, args.x, args.y, args.metric, args.out)
    else:
        x_values, y_values, grid = xp.heatmap_grid(rows, args.x, args.y, args.metric)
        writer = csv.writer(sys.stdout)
        writer.writerow([f"{args.y}\\{args.x}"] + list(x_values))
        for yv, line in zip(y_values, grid):
            writer.writerow([yv] + line)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "cluster": _cmd_cluster,
    "cut": _cmd_cut,
    "experiment": _cmd_experiment,
    "heatmap": _cmd_heatmap,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except MxspecError as exc:
        print(f"error[{exc.module}]: {exc.message}", file=sys.stderr)
        return 2
    except Exception as exc:  # malformed input must never escape as a traceback
        print(f"error[cli]: unexpected {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
