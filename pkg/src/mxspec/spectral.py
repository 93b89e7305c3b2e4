"""Symmetric eigendecomposition and spectral clustering.

Bipartitions come from the sign pattern of the eigenvector attached to the
smallest eigenvalue above a relative zero threshold (the Fiedler vector);
c-way clustering embeds each row into the first c eigenvectors (trivial one
included) and runs seeded Lloyd k-means with k-means++ initialization.

Disconnected operators are degenerate for the relaxation: the zero
eigenvalue is multiple and any eigenbasis of the nullspace is
solver-arbitrary, so the bipartition falls back to connected components
(component of index 0 vs the rest), which is deterministic and cuts no
edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import SpectralError

ZERO_ENTRY_TOL = 1e-12


@dataclass(frozen=True)
class EigenSystem:
    """Full decomposition: ascending eigenvalues, orthonormal eigenvector
    columns, and the relative threshold below which an eigenvalue counts
    as zero."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    zero_tolerance: float

    @property
    def zero_multiplicity(self) -> int:
        return int(np.sum(self.eigenvalues <= self.zero_tolerance))


@dataclass(frozen=True)
class Partition:
    """Cluster labels in {0..c-1} over node copies (or nodes, for reduced
    problems)."""

    labels: np.ndarray
    c: int
    domain: str = "copies"

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        if labels.ndim != 1:
            raise SpectralError("labels must be a 1-d vector")
        if labels.size and (labels.min() < 0 or labels.max() >= self.c):
            raise SpectralError(f"labels must lie in [0, {self.c})")
        labels = labels.copy()
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def used_clusters(self) -> int:
        return len(np.unique(self.labels))

    def indicator(self) -> np.ndarray:
        """+-1 indicator vector for a bipartition (label 0 -> +1)."""
        if self.c != 2:
            raise SpectralError("indicator vector is defined for bipartitions only")
        return np.where(self.labels == 0, 1.0, -1.0)


def eig_sym(mat: np.ndarray) -> EigenSystem:
    """Dense symmetric eigendecomposition with deterministic sign fixing:
    each eigenvector is flipped so its first entry of magnitude > 1e-12 is
    positive."""
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {arr.shape}")
    scale = max(1.0, float(np.abs(arr).max(initial=0.0)))
    if np.abs(arr - arr.T).max(initial=0.0) > 1e-10 * scale:
        raise SpectralError("matrix is not symmetric within 1e-10")
    values, vectors = np.linalg.eigh(0.5 * (arr + arr.T))
    for col in range(vectors.shape[1]):
        v = vectors[:, col]
        nonzero = np.nonzero(np.abs(v) > ZERO_ENTRY_TOL)[0]
        if nonzero.size and v[nonzero[0]] < 0:
            vectors[:, col] = -v
    lam_max = float(values[-1]) if values.size else 0.0
    tol = 1e-8 * max(1.0, abs(lam_max))
    return EigenSystem(eigenvalues=values, eigenvectors=vectors, zero_tolerance=tol)


def _component_bipartition(lap: np.ndarray) -> Partition:
    """Deterministic component split for degenerate (disconnected) inputs:
    the component containing index 0 vs everything else."""
    from .operators import connected_components

    off = -lap.copy()
    np.fill_diagonal(off, 0.0)
    comp = connected_components(off, atol=ZERO_ENTRY_TOL)
    labels = (comp != comp[0]).astype(int)
    return Partition(labels=labels, c=2)


def fiedler_bipartition(lap: np.ndarray) -> tuple[Partition, float, bool]:
    """Bipartition by the eigenvector of the smallest above-zero eigenvalue.

    Returns (partition, fiedler_value, degenerate).  Entries with
    |v_i| <= 1e-12 join the positive cluster (label 0).  When the zero
    eigenvalue is multiple the operator is disconnected: degenerate is True
    and the partition separates connected components instead of relying on
    an arbitrary nullspace basis.
    """
    arr = np.asarray(lap, dtype=float)
    if arr.shape[0] < 2:
        raise SpectralError("bipartition needs a matrix of size >= 2")
    system = eig_sym(arr)
    above = np.nonzero(system.eigenvalues > system.zero_tolerance)[0]
    degenerate = system.zero_multiplicity > 1
    fiedler_value = float(system.eigenvalues[above[0]]) if above.size else 0.0
    if degenerate:
        return _component_bipartition(arr), fiedler_value, True
    vec = system.eigenvectors[:, above[0]]
    labels = (vec < -ZERO_ENTRY_TOL).astype(int)
    return Partition(labels=labels, c=2), fiedler_value, False


def _kmeans_pp_init(points: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: first center uniform, the rest D^2-sampled."""
    m = points.shape[0]
    centers = np.empty((c, points.shape[1]))
    first = int(rng.integers(m))
    centers[0] = points[first]
    dist_sq = ((points - centers[0]) ** 2).sum(axis=1)
    for idx in range(1, c):
        total = dist_sq.sum()
        if total <= 0:
            # all points coincide with chosen centers; any choice works
            pick = int(rng.integers(m))
        else:
            r = rng.random() * total
            pick = int(np.searchsorted(np.cumsum(dist_sq), r, side="right"))
            pick = min(pick, m - 1)
        centers[idx] = points[pick]
        dist_sq = np.minimum(dist_sq, ((points - centers[idx]) ** 2).sum(axis=1))
    return centers


def _lloyd(points: np.ndarray, centers: np.ndarray, max_iter: int = 300) -> tuple[np.ndarray, float]:
    """Lloyd iterations to a fixed assignment.  Empty clusters are repaired
    by handing them the point currently farthest from its own center."""
    m, c = points.shape[0], centers.shape[0]
    labels = np.full(m, -1)
    for _ in range(max_iter):
        dists = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = dists.argmin(axis=1)
        for cluster in range(c):
            if not np.any(new_labels == cluster):
                own = dists[np.arange(m), new_labels]
                farthest = int(own.argmax())
                new_labels[farthest] = cluster
                dists[farthest] = np.inf
                dists[farthest, cluster] = 0.0
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for cluster in range(c):
            members = points[labels == cluster]
            if len(members):
                centers[cluster] = members.mean(axis=0)
    wcss = float(((points - centers[labels]) ** 2).sum())
    return labels, wcss


def spectral_kway(lap: np.ndarray, c: int, seed) -> Partition:
    """Unnormalized c-way spectral clustering: rows embedded into the first
    c eigenvectors (ascending, trivial included), then Lloyd k-means with
    k-means++ starts.  Runs 10 restarts on seeds derived deterministically
    from `seed` and keeps the lowest within-cluster sum of squares."""
    arr = np.asarray(lap, dtype=float)
    m = arr.shape[0]
    if c < 2:
        raise SpectralError(f"cluster count must be >= 2, got {c}")
    if c > m:
        raise SpectralError(f"cannot form {c} clusters from {m} elements")
    system = eig_sym(arr)
    points = np.ascontiguousarray(system.eigenvectors[:, :c])
    best_labels, best_wcss = None, np.inf
    for restart in range(10):
        rng = _restart_rng(seed, restart)
        centers = _kmeans_pp_init(points, c, rng)
        labels, wcss = _lloyd(points, centers)
        if wcss < best_wcss:
            best_labels, best_wcss = labels, wcss
    return Partition(labels=best_labels, c=c)


def _restart_rng(seed, restart: int) -> np.random.Generator:
    from .generators import RngSeed

    base = seed if isinstance(seed, RngSeed) else RngSeed(int(seed))
    return base.spawn("kmeans", restart).generator()


def match_partitions(a: Partition, b: Partition) -> tuple[bool, float]:
    """Best-bijection comparison of two partitions of the same elements.

    Builds the confusion matrix and solves the assignment problem for the
    label bijection maximizing agreement.  Returns (equal_up_to_relabel,
    agreement fraction); equality holds iff the best bijection matches
    every element.
    """
    if len(a) != len(b):
        raise SpectralError(f"partition lengths differ: {len(a)} vs {len(b)}")
    m = len(a)
    if m == 0:
        return True, 1.0
    size = max(a.c, b.c)
    confusion = np.zeros((size, size), dtype=np.int64)
    np.add.at(confusion, (a.labels, b.labels), 1)
    rows, cols = linear_sum_assignment(-confusion)
    matched = int(confusion[rows, cols].sum())
    agreement = matched / m
    return matched == m, agreement
