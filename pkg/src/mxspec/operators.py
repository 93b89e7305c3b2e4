"""Construction of the two nk x nk multiplex operators and their reductions.

Both operators share the node-copy index space (layer-major).  The supra
model couples the k copies of each node into a clique of fixed weight w;
the dynamical model mirrors each layer's neighborhoods across layers
through per-pair diagonal coupling matrices.  Either way the symmetric
matrix `adjacency` and its graph Laplacian `laplacian` (degree diagonal
minus adjacency) are what spectral clustering and cut analysis consume.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .core import DynamicCoupling, MultiplexNetwork, SupraWeight
from .errors import OperatorError, ParseError

SYMMETRY_RTOL = 1e-12


def symmetrize(mat: np.ndarray) -> np.ndarray:
    """Return (M + M^T) / 2."""
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise OperatorError(f"cannot symmetrize non-square matrix of shape {arr.shape}")
    return 0.5 * (arr + arr.T)


def laplacian(sym: np.ndarray) -> np.ndarray:
    """Graph Laplacian L = D - S of a symmetric matrix, D = diag(row sums)."""
    arr = np.asarray(sym, dtype=float)
    scale = max(1.0, float(np.abs(arr).max(initial=0.0)))
    if np.abs(arr - arr.T).max(initial=0.0) > SYMMETRY_RTOL * scale:
        raise OperatorError("laplacian requires a symmetric matrix")
    return np.diag(arr.sum(axis=1)) - arr


@dataclass(frozen=True)
class SupraOperator:
    """An nk x nk symmetric operator with its Laplacian and provenance.

    model is "supra" or "dynamic"; coupling holds the SupraWeight or
    DynamicCoupling it was built from.  Copies are indexed layer-major:
    copy of node i on layer a sits at a*n + i.
    """

    model: str
    n: int
    k: int
    adjacency: np.ndarray
    laplacian: np.ndarray
    coupling: object

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=float)
        m = self.n * self.k
        if adj.shape != (m, m):
            raise OperatorError(f"operator must be {m} x {m}, got {adj.shape}")
        scale = max(1.0, float(np.abs(adj).max(initial=0.0)))
        if np.abs(adj - adj.T).max(initial=0.0) > SYMMETRY_RTOL * scale:
            raise OperatorError("operator matrix drifted from symmetry")
        if np.any(np.diag(adj) != 0):
            raise OperatorError("operator matrix must have zero diagonal")
        lap = np.asarray(self.laplacian, dtype=float)
        if np.abs(lap.sum(axis=1)).max(initial=0.0) > 1e-10 * scale:
            raise OperatorError("Laplacian row sums exceed tolerance")
        adj = adj.copy()
        lap = lap.copy()
        adj.flags.writeable = False
        lap.flags.writeable = False
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "laplacian", lap)

    @property
    def num_copies(self) -> int:
        return self.n * self.k

    def block(self, a: int, b: int) -> np.ndarray:
        """The (a, b) layer block of the symmetric adjacency."""
        n = self.n
        return self.adjacency[a * n : (a + 1) * n, b * n : (b + 1) * n]


@dataclass(frozen=True)
class ReducedOperator:
    """n x n aggregate obtained by binding all copies of each node together."""

    adjacency: np.ndarray
    laplacian: np.ndarray


def build_supra(net: MultiplexNetwork, w: float | SupraWeight) -> SupraOperator:
    """Supra-adjacency operator: symmetrized layers on the diagonal blocks,
    w * I between every pair of distinct layers."""
    weight = w if isinstance(w, SupraWeight) else SupraWeight(float(w))
    n, k = net.n, net.k
    m = n * k
    adj = np.zeros((m, m))
    eye = np.eye(n) * weight.w
    for a in range(k):
        adj[a * n : (a + 1) * n, a * n : (a + 1) * n] = symmetrize(net.layers[a])
        for b in range(k):
            if a != b:
                adj[a * n : (a + 1) * n, b * n : (b + 1) * n] = eye
    adj = symmetrize(adj)  # guard against assembly drift
    return SupraOperator(
        model="supra", n=n, k=k, adjacency=adj, laplacian=laplacian(adj), coupling=weight
    )


def dynamic_raw(net: MultiplexNetwork, coupling: DynamicCoupling) -> np.ndarray:
    """The unsymmetrized dynamical block matrix: block (a, b) = C^{a,b} A^b."""
    n, k = net.n, net.k
    if coupling.k != k or coupling.n != n:
        raise OperatorError(
            f"coupling shaped {coupling.diag.shape} does not match network (k={k}, n={n})"
        )
    raw = np.zeros((n * k, n * k))
    for a in range(k):
        for b in range(k):
            # diagonal C^{a,b} times A^b scales rows of A^b
            raw[a * n : (a + 1) * n, b * n : (b + 1) * n] = (
                coupling.diag[a, b][:, None] * net.layers[b]
            )
    return raw


def build_dynamic(net: MultiplexNetwork, coupling: DynamicCoupling) -> SupraOperator:
    """Dynamical-coupling operator: assemble block (a, b) = C^{a,b} A^b,
    then symmetrize, so the copy pair (i on a, j on b) carries half of
    c^{a,b}_i w^b(i,j) + c^{b,a}_j w^a(j,i)."""
    adj = symmetrize(dynamic_raw(net, coupling))
    return SupraOperator(
        model="dynamic",
        n=net.n,
        k=net.k,
        adjacency=adj,
        laplacian=laplacian(adj),
        coupling=coupling,
    )


def disjoint_operator(net: MultiplexNetwork, model: str) -> SupraOperator:
    """The zero-coupling limit: block-diagonal operator whose Laplacian has
    one zero eigenvalue per connected layer component."""
    if model == "supra":
        return build_supra(net, 0.0)
    if model == "dynamic":
        return build_dynamic(net, DynamicCoupling.disjoint(net.n, net.k))
    raise OperatorError(f"unknown model {model!r}")


def reduce_indivisible(op: SupraOperator) -> ReducedOperator:
    """Bind all copies of each node together: J^T L J with J the stack of k
    identities.  The result is itself a graph Laplacian on the n nodes; for
    the supra model it equals the Laplacian of the summed symmetrized layers
    (the coupling cliques cancel), for the dynamic model the Laplacian of
    the coupling-weighted aggregate."""
    n, k = op.n, op.k
    lap = op.laplacian
    reduced = np.zeros((n, n))
    for a in range(k):
        for b in range(k):
            reduced += lap[a * n : (a + 1) * n, b * n : (b + 1) * n]
    reduced = symmetrize(reduced)
    agg = -reduced.copy()
    np.fill_diagonal(agg, 0.0)
    return ReducedOperator(adjacency=agg, laplacian=reduced)


def connected_components(adjacency: np.ndarray, atol: float = 0.0) -> np.ndarray:
    """Component label per index of the graph with edges where |A_ij| > atol.
    Union-find; labels are 0-based in order of first appearance."""
    m = adjacency.shape[0]
    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    rows, cols = np.nonzero(np.abs(adjacency) > atol)
    for i, j in zip(rows.tolist(), cols.tolist()):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    labels = np.empty(m, dtype=int)
    seen: dict[int, int] = {}
    for i in range(m):
        root = find(i)
        if root not in seen:
            seen[root] = len(seen)
        labels[i] = seen[root]
    return labels


def load_coupling(path: str | os.PathLike, n: int, k: int) -> DynamicCoupling:
    """Parse a .cpl coupling file.

    Lines are either ``<a> <b> <value>`` (C^{a,b} = value * I) or
    ``<a> <b> <node> <value>`` (one diagonal entry); later lines override
    earlier ones.  Pairs never mentioned default to the identity coupling.
    Comment lines start with ``%``.
    """
    diag = np.ones((k, k, n))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ParseError(f"line {lineno}: expected 3 or 4 fields, got {len(parts)}")
        try:
            a, b = int(parts[0]), int(parts[1])
            if len(parts) == 3:
                node, value = None, float(parts[2])
            else:
                node, value = int(parts[2]), float(parts[3])
        except ValueError:
            raise ParseError(f"line {lineno}: cannot parse coupling line {line!r}")
        if not (0 <= a < k and 0 <= b < k):
            raise ParseError(f"line {lineno}: layer pair ({a}, {b}) out of range [0, {k})")
        if value < 0:
            raise ParseError(f"line {lineno}: negative coupling value {value}")
        if node is None:
            diag[a, b, :] = value
        else:
            if not 0 <= node < n:
                raise ParseError(f"line {lineno}: node {node} out of range [0, {n})")
            diag[a, b, node] = value
    return DynamicCoupling(diag)
