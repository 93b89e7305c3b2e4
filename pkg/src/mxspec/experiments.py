"""Seeded parameter sweeps over the three synthetic experiment families.

Each experiment is a grid of parameter points; every (point, instance)
pair gets its own 64-bit seed derived by hashing (master seed, experiment
id, parameter point, instance index), so adding grid points or instances
never perturbs existing rows, and any row is recomputable from its stored
(seed, parameter point) alone via :func:`compute_instance`.

Instances are independent jobs: with jobs > 1 they run in a process pool,
but rows are always emitted in deterministic (parameter point, instance)
order, so the CSV bytes do not depend on the job count.

Experiments:

* ``er`` - k random layers with no structure; measures how often node
  copies stay grouped under bipartition, for both operator models.
* ``fixed-sbm`` - every layer carries the same planted two-block
  structure; measures exact recovery of the planted partition.
* ``overlap`` / ``overlap-supra`` / ``overlap-kway`` - two layers with
  different overlapping planted structures; classifies which partition
  the clustering finds (regime map), for the dynamic coupling knobs
  (p, q) or the supra weight w, with 2-way or 4-way clustering.
"""

from __future__ import annotations

import csv
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import DynamicCoupling
from .errors import ExperimentError
from .generators import (
    RngSeed,
    derive_key,
    gen_er_multiplex,
    gen_fixed_sbm_multiplex,
    gen_overlap_multiplex,
    overlap_block_labels,
)
from .operators import build_dynamic, build_supra
from .spectral import Partition, fiedler_bipartition, match_partitions, spectral_kway

DEFAULT_SEED = 0xD15EA5E

REGIME_LABELS = ("layers_split", "layer1", "layer2", "other")


def fraction_copies_together(part: Partition, n: int, k: int, mode: str = "all") -> float:
    """Fraction of nodes whose copies share a cluster.

    mode "all" (default): a node counts only if all k copies carry one
    label.  mode "pairwise": per node, the fraction of copy pairs sharing
    a label, averaged over nodes.  Both are 1.0 when copies always bind
    and 0.0 when two layers split apart.
    """
    if len(part) != n * k:
        raise ExperimentError(f"partition covers {len(part)} copies, expected {n * k}")
    labels = part.labels.reshape(k, n)
    if k == 1:
        return 1.0
    if mode == "all":
        return float(np.all(labels == labels[0], axis=0).mean())
    if mode == "pairwise":
        pairs = k * (k - 1) // 2
        same = np.zeros(n)
        for a in range(k):
            for b in range(a + 1, k):
                same += labels[a] == labels[b]
        return float((same / pairs).mean())
    raise ExperimentError(f"unknown mode {mode!r}")


def layer_split_partition(n: int, k: int = 2) -> Partition:
    """The bipartition separating layer 1's copies from layer 2's."""
    if k != 2:
        raise ExperimentError("layer-split reference partition is defined for k = 2")
    return Partition(labels=np.repeat([0, 1], n), c=2)


def classify_regime(
    part: Partition, planted1: Partition, planted2: Partition, k: int = 2
) -> str:
    """Name the outcome of a two-layer bipartition: layers_split when it
    equals the layer-vs-layer split, layer1/layer2 when it equals a planted
    partition lifted to all copies, other otherwise (all up to relabeling)."""
    if k != 2:
        raise ExperimentError("regime classification is defined for k = 2 layers")
    n = len(part) // 2
    for label, target in (
        ("layers_split", layer_split_partition(n)),
        ("layer1", planted1),
        ("layer2", planted2),
    ):
        equal, _ = match_partitions(part, target)
        if equal:
            return label
    return "other"


def overlap_coupling(p: float, q: float, n: int) -> DynamicCoupling:
    """Dynamic coupling for the overlap experiment.

    p is the weight with which layer 1's structure is mirrored into layer
    2's block row, q the reverse; each block row stays a convex mix of the
    two layer adjacencies (row 1 = (1-q) A1 + q A2, row 2 = p A1 + (1-p) A2).
    Raising p above q tilts the operator toward layer 1's planted structure.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ExperimentError(f"coupling knobs must lie in [0, 1], got p={p}, q={q}")
    return DynamicCoupling.uniform([[1.0 - q, q], [p, 1.0 - p]], n)


def kway_target_partition(n: int) -> Partition:
    """The layers-times-communities 4-way partition of the overlap nets:
    layer 1 copies split by layer 1's planted blocks (labels 0/1), layer 2
    copies by layer 2's blocks (labels 2/3)."""
    blocks1, blocks2 = overlap_block_labels(n)
    return Partition(labels=np.concatenate([blocks1, blocks2 + 2]), c=4)


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InstanceRow:
    experiment: str
    params: tuple  # of (name, value-as-string), fixed order per experiment
    instance: int
    seed: int
    metric: str
    value: str


@dataclass(frozen=True)
class AggregateRow:
    experiment: str
    params: tuple
    metric: str
    value: float


@dataclass
class SweepResult:
    """Instance rows in deterministic order plus their per-point means."""

    experiment: str
    param_names: tuple
    rows: list

    def aggregates(self) -> list:
        """Mean per (parameter point, metric).  Label-valued metrics expand
        into one fraction row per label (metric ``frac:<label>``)."""
        order: list = []
        groups: dict = {}
        for row in self.rows:
            key = (row.params, row.metric)
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(row.value)
        out = []
        for params, metric in order:
            values = groups[(params, metric)]
            try:
                numeric = [float(v) for v in values]
            except ValueError:
                for label in REGIME_LABELS:
                    frac = sum(1 for v in values if v == label) / len(values)
                    out.append(AggregateRow(self.experiment, params, f"frac:{label}", frac))
                continue
            out.append(
                AggregateRow(self.experiment, params, f"mean:{metric}", sum(numeric) / len(numeric))
            )
        return out

    def metric_values(self, metric: str, **param_filter) -> list:
        """Raw string values of one metric at rows matching the filter."""
        wanted = {name: _fmt(value) for name, value in param_filter.items()}
        out = []
        for row in self.rows:
            if row.metric != metric:
                continue
            params = dict(row.params)
            if all(params.get(name) == value for name, value in wanted.items()):
                out.append(row.value)
        return out

    def mean_metric(self, metric: str, **param_filter) -> float:
        values = [float(v) for v in self.metric_values(metric, **param_filter)]
        if not values:
            raise ExperimentError(f"no rows for metric {metric!r} under {param_filter}")
        return sum(values) / len(values)

    def regime_fraction(self, label: str, **param_filter) -> float:
        values = self.metric_values("regime", **param_filter)
        if not values:
            raise ExperimentError(f"no regime rows under {param_filter}")
        return sum(1 for v in values if v == label) / len(values)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def instance_seed(master_seed: int, experiment: str, params: tuple, instance: int) -> int:
    """64-bit per-instance seed hashed from the master seed, experiment id,
    parameter point, and instance index."""
    stream = (experiment,) + tuple(f"{k}={v}" for k, v in params) + ("instance", instance)
    return derive_key(master_seed, stream) & ((1 << 64) - 1)


def compute_instance(experiment: str, params: dict, seed: int) -> list:
    """Recompute one instance's metrics from its parameter point and seed.

    `params` maps parameter names to their string form exactly as stored
    in the results CSV.  Returns [(metric, value-string), ...].
    """
    rng = RngSeed(seed)
    if experiment == "er":
        n, k = int(params["n"]), int(params["k"])
        p, w = float(params["p"]), float(params["w"])
        net = gen_er_multiplex(n, k, p, rng.spawn("net"))
        if params["model"] == "supra":
            op = build_supra(net, w)
        else:
            op = build_dynamic(net, DynamicCoupling.identity(n, k))
        part, _, degenerate = fiedler_bipartition(op.laplacian)
        return [
            ("frac_copies", _fmt(fraction_copies_together(part, n, k, "all"))),
            ("frac_copies_pairwise", _fmt(fraction_copies_together(part, n, k, "pairwise"))),
            ("degenerate", _fmt(degenerate)),
        ]

    if experiment == "fixed-sbm":
        n, k, p = int(params["n"]), int(params["k"]), float(params["p"])
        net, planted = gen_fixed_sbm_multiplex(n, k, p, rng.spawn("net"))
        if params["model"] == "supra":
            op = build_supra(net, float(params["w"]))
        else:
            op = build_dynamic(net, DynamicCoupling.identity(n, k))
        part, _, degenerate = fiedler_bipartition(op.laplacian)
        equal, _ = match_partitions(part, planted)
        return [("recovered", _fmt(equal)), ("degenerate", _fmt(degenerate))]

    if experiment in ("overlap", "overlap-supra"):
        n = int(params["n"])
        intra, inter = float(params["intra"]), float(params["inter"])
        net, planted1, planted2 = gen_overlap_multiplex(n, intra, inter, rng.spawn("net"))
        if experiment == "overlap":
            coupling = overlap_coupling(float(params["p"]), float(params["q"]), n)
            op = build_dynamic(net, coupling)
        else:
            op = build_supra(net, float(params["w"]))
        part, _, degenerate = fiedler_bipartition(op.laplacian)
        regime = classify_regime(part, planted1, planted2)
        return [("regime", regime), ("degenerate", _fmt(degenerate))]

    if experiment == "overlap-kway":
        n = int(params["n"])
        intra, inter = float(params["intra"]), float(params["inter"])
        net, planted1, planted2 = gen_overlap_multiplex(n, intra, inter, rng.spawn("net"))
        if params["model"] == "supra":
            op = build_supra(net, float(params["w"]))
        else:
            coupling = overlap_coupling(float(params["p"]), float(params["q"]), n)
            op = build_dynamic(net, coupling)
        part = spectral_kway(op.laplacian, 4, rng.spawn("cluster"))
        equal, _ = match_partitions(part, kway_target_partition(n))
        # used_clusters is always 4 after empty-cluster repair; major_clusters
        # (>= 5% of elements) is what collapses when the embedding only
        # supports fewer groups
        sizes = np.bincount(part.labels, minlength=4)
        major = int(np.sum(sizes >= max(1, len(part) // 20)))
        return [
            ("kway_match", _fmt(equal)),
            ("effective_clusters", _fmt(part.used_clusters)),
            ("major_clusters", _fmt(major)),
        ]

    raise ExperimentError(f"unknown experiment {experiment!r}")


def _run_task(task):
    experiment, params, instance, seed = task
    return compute_instance(experiment, dict(params), seed)


def _execute(experiment: str, param_names: tuple, points: list, instances: int,
             master_seed: int, jobs: int) -> SweepResult:
    """Run every (point, instance) task and collect rows in task order."""
    tasks = []
    for point in points:
        params = tuple((name, _fmt(point[name])) for name in param_names)
        for instance in range(instances):
            tasks.append((experiment, params, instance,
                          instance_seed(master_seed, experiment, params, instance)))
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            metric_lists = list(pool.map(_run_task, tasks, chunksize=4))
    else:
        metric_lists = [_run_task(task) for task in tasks]
    rows = []
    for (_, params, instance, seed), metrics in zip(tasks, metric_lists):
        for metric, value in metrics:
            rows.append(InstanceRow(experiment, params, instance, seed, metric, value))
    return SweepResult(experiment=experiment, param_names=param_names, rows=rows)


def _points(**grids) -> list:
    names = tuple(grids)
    out = []
    for combo in itertools.product(*grids.values()):
        out.append(dict(zip(names, combo)))
    return out


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------

def run_er_experiment(
    p_grid, k_grid, instances: int, model: str = "both",
    seed: int = DEFAULT_SEED, n: int = 100, w: float = 1.0, jobs: int = 1,
) -> SweepResult:
    """Random ER layers, both operator models, fraction of node copies
    grouped together by the Fiedler bipartition."""
    models = ("supra", "dynamic") if model == "both" else (model,)
    param_names = ("model", "p", "k", "n", "w")
    points = _points(model=models, p=list(p_grid), k=list(k_grid), n=[n], w=[w])
    return _execute("er", param_names, points, instances, seed, jobs)


def run_fixed_sbm_experiment(
    p_grid, w_grid, k_grid, instances: int, model: str = "both",
    seed: int = DEFAULT_SEED, n: int = 100, jobs: int = 1,
) -> SweepResult:
    """Identical planted two-block structure on every layer; exact recovery
    of the planted partition.  The supra model sweeps (p, w, k); the dynamic
    model (C = I) sweeps (p, k) with an empty w column."""
    param_names = ("model", "p", "w", "k", "n")
    points = []
    if model in ("both", "dynamic"):
        points += _points(model=["dynamic"], p=list(p_grid), w=[""], k=list(k_grid), n=[n])
    if model in ("both", "supra"):
        points += _points(model=["supra"], p=list(p_grid), w=list(w_grid), k=list(k_grid), n=[n])
    return _execute("fixed-sbm", param_names, points, instances, seed, jobs)


def run_overlap_experiment(
    p_grid, q_grid, instances: int, seed: int = DEFAULT_SEED,
    n: int = 100, intra: float = 0.9, inter: float = 0.1, jobs: int = 1,
) -> SweepResult:
    """Two overlapping planted structures, dynamic model over the layer
    relevance knobs (p, q); classifies the regime of each bipartition."""
    param_names = ("p", "q", "n", "intra", "inter")
    points = _points(p=list(p_grid), q=list(q_grid), n=[n], intra=[intra], inter=[inter])
    return _execute("overlap", param_names, points, instances, seed, jobs)


def run_overlap_supra_experiment(
    w_grid, instances: int, seed: int = DEFAULT_SEED,
    n: int = 100, intra: float = 0.9, inter: float = 0.1, jobs: int = 1,
) -> SweepResult:
    """Same planted structures under the supra operator, sweeping w."""
    param_names = ("w", "n", "intra", "inter")
    points = _points(w=list(w_grid), n=[n], intra=[intra], inter=[inter])
    return _execute("overlap-supra", param_names, points, instances, seed, jobs)


def run_overlap_kway(
    model: str, instances: int, seed: int = DEFAULT_SEED,
    w_grid=None, p_grid=None, q_grid=None,
    n: int = 100, intra: float = 0.9, inter: float = 0.1, jobs: int = 1,
) -> SweepResult:
    """4-way spectral clustering on the overlap nets: match against the
    layers-times-communities partition and count effective clusters."""
    param_names = ("model", "w", "p", "q", "n", "intra", "inter")
    if model == "supra":
        if not w_grid:
            raise ExperimentError("supra k-way sweep needs a w grid")
        points = _points(model=["supra"], w=list(w_grid), p=[""], q=[""],
                         n=[n], intra=[intra], inter=[inter])
    elif model == "dynamic":
        if not p_grid or not q_grid:
            raise ExperimentError("dynamic k-way sweep needs p and q grids")
        points = _points(model=["dynamic"], w=[""], p=list(p_grid), q=list(q_grid),
                         n=[n], intra=[intra], inter=[inter])
    else:
        raise ExperimentError(f"unknown model {model!r}")
    return _execute("overlap-kway", param_names, points, instances, seed, jobs)


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def write_results_csv(result: SweepResult, path) -> None:
    """results.csv: experiment, param:<name> columns, instance, seed,
    metric, value."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["experiment"] + [f"param:{name}" for name in result.param_names]
            + ["instance", "seed", "metric", "value"]
        )
        for row in result.rows:
            params = dict(row.params)
            writer.writerow(
                [row.experiment] + [params[name] for name in result.param_names]
                + [row.instance, row.seed, row.metric, row.value]
            )


def write_aggregate_csv(result: SweepResult, path) -> None:
    """Per-point means: experiment, param:<name> columns, metric, value."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["experiment"] + [f"param:{name}" for name in result.param_names]
            + ["metric", "value"]
        )
        for agg in result.aggregates():
            params = dict(agg.params)
            writer.writerow(
                [agg.experiment] + [params[name] for name in result.param_names]
                + [agg.metric, _fmt(agg.value)]
            )


def read_results_csv(path) -> tuple:
    """Read a results.csv back into (param_names, rows)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        param_names = tuple(col[len("param:"):] for col in header if col.startswith("param:"))
        rows = []
        for record in reader:
            fields = dict(zip(header, record))
            params = tuple((name, fields[f"param:{name}"]) for name in param_names)
            rows.append(
                InstanceRow(
                    experiment=fields["experiment"],
                    params=params,
                    instance=int(fields["instance"]),
                    seed=int(fields["seed"]),
                    metric=fields["metric"],
                    value=fields["value"],
                )
            )
    return param_names, rows


def heatmap_grid(rows, x: str, y: str, metric: str) -> tuple:
    """Aggregate instance rows into a dense (y, x) grid of one metric.

    Numeric metrics aggregate to their mean; label-valued metrics to the
    modal label (ties break lexicographically).  Returns (x_values,
    y_values, grid) with axis values sorted numerically when possible.
    """
    cells: dict = {}
    for row in rows:
        if row.metric != metric:
            continue
        params = dict(row.params)
        if x not in params or y not in params:
            raise ExperimentError(f"rows carry no parameters named {x!r}/{y!r}")
        cells.setdefault((params[x], params[y]), []).append(row.value)
    if not cells:
        raise ExperimentError(f"no rows with metric {metric!r}")

    def _axis(values):
        try:
            return sorted(values, key=float)
        except ValueError:
            return sorted(values)

    x_values = _axis({key[0] for key in cells})
    y_values = _axis({key[1] for key in cells})
    grid = []
    for yv in y_values:
        line = []
        for xv in x_values:
            bucket = cells.get((xv, yv))
            if bucket is None:
                line.append("")
                continue
            try:
                numeric = [float(v) for v in bucket]
                line.append(_fmt(sum(numeric) / len(numeric)))
            except ValueError:
                counts: dict = {}
                for v in bucket:
                    counts[v] = counts.get(v, 0) + 1
                best = min(counts, key=lambda lab: (-counts[lab], lab))
                line.append(best)
        grid.append(line)
    return x_values, y_values, grid


def write_heatmap_csv(rows, x: str, y: str, metric: str, path) -> None:
    x_values, y_values, grid = heatmap_grid(rows, x, y, metric)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"{y}\\{x}"] + list(x_values))
        for yv, line in zip(y_values, grid):
            writer.writerow([yv] + line)
