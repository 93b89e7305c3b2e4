"""Multiplex network data model, node-copy indexing, and .mpx file I/O.

A multiplex network is a fixed set of n nodes carrying k layers, each layer
an n x n weighted directed adjacency matrix.  Entry A[i][j] holds the weight
of the directed edge from node j to node i.  Node copies are addressed
layer-major: the copy of node i on layer a has flat index a*n + i, with both
a and i 0-based everywhere in code and files (1-based only in prose).

The .mpx on-disk format is UTF-8 text: header lines ``#nodes <n>`` and
``#layers <k>``, comment lines starting with ``%``, then one edge per line,
whitespace-separated::

    <layer> <src j> <dst i> <weight>

All indices 0-based.  Unlisted entries are zero.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class MultiplexNetwork:
    """Immutable multiplex network: n nodes, k layers of n x n adjacency.

    Layer matrices are non-negative with zero diagonal (no self-loops).
    Arrays are locked read-only so instances can be shared across workers.
    """

    n: int
    k: int
    layers: tuple

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ParseError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")
        if len(self.layers) != self.k:
            raise ParseError(f"expected {self.k} layers, got {len(self.layers)}")
        frozen = []
        for a, mat in enumerate(self.layers):
            arr = np.asarray(mat, dtype=float)
            if arr.shape != (self.n, self.n):
                raise ParseError(
                    f"layer {a} has shape {arr.shape}, expected {(self.n, self.n)}"
                )
            if np.any(arr < 0):
                raise ParseError(f"layer {a} contains negative weights")
            if np.any(np.diag(arr) != 0):
                raise ParseError(f"layer {a} has non-zero diagonal (self-loop)")
            arr = arr.copy()
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "layers", tuple(frozen))

    @property
    def num_copies(self) -> int:
        return self.n * self.k


def flat_index(layer: int, node: int, n: int, k: int | None = None) -> int:
    """Map (layer, node) to the layer-major flat copy index layer*n + node."""
    if node < 0 or node >= n:
        raise ParseError(f"node index {node} out of range [0, {n})")
    if layer < 0 or (k is not None and layer >= k):
        raise ParseError(f"layer index {layer} out of range [0, {k})")
    return layer * n + node


def unflatten(idx: int, n: int) -> tuple[int, int]:
    """Inverse of flat_index: flat copy index -> (layer, node)."""
    if idx < 0:
        raise ParseError(f"flat index {idx} is negative")
    return idx // n, idx % n


@dataclass(frozen=True)
class SupraWeight:
    """Coupling for the supra-adjacency model: one scalar weight w >= 0
    placed on every inter-layer pair of copies of the same node."""

    w: float

    def __post_init__(self):
        if self.w < 0:
            raise ParseError(f"supra inter-layer weight must be >= 0, got {self.w}")


@dataclass(frozen=True)
class DynamicCoupling:
    """Coupling for the dynamical model: per layer pair (a, b) a diagonal
    matrix, stored as a length-n vector of its diagonal.

    `diag[a][b][i]` is the single coefficient multiplying layer b's
    adjacency row i when mirrored into layer a's block row.  The underlying
    model has two factors per pair (a mixing weight and a rate); only their
    product ever enters the operator, so only the product is stored.
    """

    diag: np.ndarray  # shape (k, k, n)

    def __post_init__(self):
        arr = np.asarray(self.diag, dtype=float)
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1]:
            raise ParseError(f"coupling must have shape (k, k, n), got {arr.shape}")
        if np.any(arr < 0):
            raise ParseError("coupling coefficients must be >= 0")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "diag", arr)

    @property
    def k(self) -> int:
        return self.diag.shape[0]

    @property
    def n(self) -> int:
        return self.diag.shape[2]

    @classmethod
    def identity(cls, n: int, k: int) -> "DynamicCoupling":
        """C = I for every layer pair (the all-layers-mirrored default)."""
        return cls(np.ones((k, k, n)))

    @classmethod
    def disjoint(cls, n: int, k: int) -> "DynamicCoupling":
        """C = I on the diagonal pairs, 0 off-diagonal (decoupled layers)."""
        diag = np.zeros((k, k, n))
        for a in range(k):
            diag[a, a, :] = 1.0
        return cls(diag)

    @classmethod
    def uniform(cls, values: Sequence[Sequence[float]], n: int) -> "DynamicCoupling":
        """Each pair (a, b) gets values[a][b] * I."""
        vals = np.asarray(values, dtype=float)
        k = vals.shape[0]
        return cls(np.broadcast_to(vals[:, :, None], (k, k, n)).copy())


def load_network(path: str | os.PathLike) -> MultiplexNetwork:
    """Parse a .mpx file into a MultiplexNetwork.

    Raises ParseError naming the offending line for malformed lines,
    out-of-range indices, self-loops, and negative weights.
    """
    n = None
    k = None
    edges = []  # (layer, src, dst, weight, lineno)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) != 2 or parts[0] not in ("nodes", "layers"):
                raise ParseError(f"line {lineno}: bad header {line!r}")
            try:
                value = int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer header value {parts[1]!r}")
            if value < 1:
                raise ParseError(f"line {lineno}: #{parts[0]} must be >= 1, got {value}")
            if parts[0] == "nodes":
                n = value
            else:
                k = value
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        try:
            layer, src, dst = int(parts[0]), int(parts[1]), int(parts[2])
            weight = float(parts[3])
        except ValueError:
            raise ParseError(f"line {lineno}: cannot parse edge {line!r}")
        edges.append((layer, src, dst, weight, lineno))

    if n is None or k is None:
        raise ParseError("missing #nodes or #layers header")

    mats = np.zeros((k, n, n))
    for layer, src, dst, weight, lineno in edges:
        if not 0 <= layer < k:
            raise ParseError(f"line {lineno}: layer {layer} out of range [0, {k})")
        if not (0 <= src < n and 0 <= dst < n):
            raise ParseError(f"line {lineno}: node index out of range [0, {n})")
        if src == dst:
            raise ParseError(f"line {lineno}: self-loop on node {src}")
        if weight < 0:
            raise ParseError(f"line {lineno}: negative weight {weight}")
        mats[layer, dst, src] = weight
    return MultiplexNetwork(n=n, k=k, layers=tuple(mats))


def save_network(net: MultiplexNetwork, path: str | os.PathLike) -> None:
    """Write a .mpx file; load_network inverts it exactly (weights are
    emitted with repr, which round-trips IEEE doubles)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#nodes {net.n}\n")
        fh.write(f"#layers {net.k}\n")
        for a in range(net.k):
            mat = net.layers[a]
            dst_idx, src_idx = np.nonzero(mat)
            for i, j in zip(dst_idx.tolist(), src_idx.tolist()):
                fh.write(f"{a} {j} {i} {float(mat[i, j])!r}\n")
